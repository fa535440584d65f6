#pragma once

#include <map>
#include <string>

#include "nhqm/operators.hpp"

namespace nhqm {

struct ModelSpec {
  std::string name;
  std::map<std::string, double> parameters;
  OperatorExpr expr;
  Representation recommended_rep;

  // Analytic expectations, where known.
  std::string transform_text;   // diagonal unitarizing transform, "" if none
  std::string weight_text;      // metric weight w(x), "" if none
  bool oscillator_spectrum = false;  // E_n = omega (2n+1)
  double omega = 1.0;
  bool eigenfunctions_x_times_ho = false;  // psi_n proportional to x psi_n^(ho)
};

/// H = p^2 + (2i/x) p - 2/x^2 + omega^2 x^2; similar to the oscillator via
/// T = 1/x, Hermitian under the weight 1/x^2.
ModelSpec paper_example(double omega);

ModelSpec harmonic_oscillator(double omega);

/// H = p^2 + x^2 (ix)^nu on the real line; requires nu > -2.
ModelSpec bender_family(double nu);

/// Grammar: complex literals (2, 1.5i, 3+2i, i), symbols x and p, + - * / ^
/// with standard precedence, parentheses, abs, exp, ipow(expr, nu). Products
/// may carry total p-degree at most 2, with x-dependent factors only to the
/// left of p. Constant subexpressions are folded.
OperatorExpr parse_expression(const std::string& text);

/// Same grammar without p.
ScalarExpr parse_scalar_expression(const std::string& text);

}  // namespace nhqm
