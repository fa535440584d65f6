#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <string>
#include <vector>

namespace nhqm {

/// Expression tree over the coordinate symbol x (and, before lowering to an
/// OperatorExpr, the momentum symbol p). Nodes are immutable and shared.
struct ExprNode;
using ScalarExpr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  enum class Op {
    Constant,  // value
    Symbol,    // symbol ('x' or 'p')
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Pow,   // a^ipower, integer exponent
    Abs,   // |a|
    Exp,   // e^a
    IPow,  // (i*a)^nu, principal branch continuous on R \ {0}
  };

  Op op;
  std::complex<double> value{};
  char symbol = 0;
  long ipower = 0;
  double nu = 0.0;
  ScalarExpr a, b;
};

ScalarExpr constant(std::complex<double> v);
ScalarExpr symbol(char s);
ScalarExpr add(ScalarExpr a, ScalarExpr b);
ScalarExpr sub(ScalarExpr a, ScalarExpr b);
ScalarExpr mul(ScalarExpr a, ScalarExpr b);
ScalarExpr div(ScalarExpr a, ScalarExpr b);
ScalarExpr neg(ScalarExpr a);  // folds Neg(Constant) into the constant
ScalarExpr pow_int(ScalarExpr a, long n);
ScalarExpr abs_of(ScalarExpr a);
ScalarExpr exp_of(ScalarExpr a);
ScalarExpr ipow(ScalarExpr a, double nu);

bool contains_symbol(const ScalarExpr& e, char s);
bool structurally_equal(const ScalarExpr& a, const ScalarExpr& b);

/// Evaluates at a real coordinate. Throws std::invalid_argument if the
/// expression still contains the momentum symbol.
std::complex<double> eval(const ScalarExpr& e, double x);

/// Evaluates with a matrix substituted for x. Only the polynomial subset
/// (constants, x, +, -, *, /, integer powers) is supported; division and
/// negative powers invert on the right.
Eigen::MatrixXcd eval_matrix(const ScalarExpr& e, const Eigen::MatrixXcd& x);

/// Prints in a form that parse_expression() maps back to the identical tree.
std::string to_string(const ScalarExpr& e);

/// A 1-D differential operator written as sum_k f_k(x) * p^k with p = -i d/dx
/// and every x-dependent factor standing left of p. At most one term per
/// power, powers ascending, p-degree <= 2.
struct OperatorTerm {
  ScalarExpr coeff;
  int p_power = 0;
};

struct OperatorExpr {
  std::vector<OperatorTerm> terms;

  /// Coefficient of d^k/dx^k, i.e. (-i)^k * coeff of p^k.
  std::complex<double> derivative_coefficient(int k, double x) const;
  bool has_power(int k) const;
};

std::string to_string(const OperatorExpr& e);
bool structurally_equal(const OperatorExpr& a, const OperatorExpr& b);

/// Lowers a parsed tree (possibly containing the symbol p) to normalized
/// operator form. Throws ParseError-compatible std::invalid_argument when the
/// p-degree exceeds 2, p appears inside a function argument, or an
/// x-dependent factor stands right of p.
OperatorExpr lower_to_operator(const ScalarExpr& e);

}  // namespace nhqm
