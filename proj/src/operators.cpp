#include "nhqm/operators.hpp"

#include <cmath>
#include <complex>

#include <fmt/format.h>

#include "nhqm/errors.hpp"

namespace nhqm {

namespace {

using cd = std::complex<double>;

bool finite(cd v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

// True when the subtree can blow up at x = 0: division by something that
// depends on x, or a negative integer power of an x-dependent base.
bool has_negative_x_power(const ScalarExpr& e) {
  if (!e) return false;
  switch (e->op) {
    case ExprNode::Op::Div:
      return contains_symbol(e->b, 'x') || has_negative_x_power(e->a);
    case ExprNode::Op::Pow:
      if (e->ipower < 0 && contains_symbol(e->a, 'x')) return true;
      return has_negative_x_power(e->a);
    default:
      return has_negative_x_power(e->a) || has_negative_x_power(e->b);
  }
}

}  // namespace

MatrixRep assemble_grid(const OperatorExpr& expr, const GridSpec& grid) {
  const int n = grid.size();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  const double h = grid.spacing;
  for (int j = 0; j < n; ++j) {
    const double x = grid.node(j);
    cd c0 = expr.derivative_coefficient(0, x);
    cd c1 = expr.derivative_coefficient(1, x);
    cd c2 = expr.derivative_coefficient(2, x);
    if (!finite(c0) || !finite(c1) || !finite(c2))
      throw AssemblyError(fmt::format("coefficient not finite at node {} (x = {})", j, x));
    m(j, j) += c0 - 2.0 * c2 / (h * h);
    if (j + 1 < n) m(j, j + 1) += c1 / (2.0 * h) + c2 / (h * h);
    if (j - 1 >= 0) m(j, j - 1) += -c1 / (2.0 * h) + c2 / (h * h);
  }
  return {std::move(m), grid, to_string(expr)};
}

MatrixRep assemble_basis(const OperatorExpr& expr, const BasisSpec& basis,
                         int quadrature_points) {
  for (const auto& t : expr.terms)
    if (has_negative_x_power(t.coeff))
      throw UnsupportedInBasisError(
          "coefficient has a negative power of x; use the grid representation");

  const int m = basis.size;
  const double w = basis.frequency;
  const int q = quadrature_points > 0 ? quadrature_points : 2 * m;
  // psi_m psi_n carries e^{-w x^2}; the rule's scaled weights put it back.
  QuadratureRule rule = gauss_hermite_rule(q, w);

  // Basis values at the quadrature nodes, one extra column for the ladder
  // derivative. Plain psi values underflow harmlessly at extreme nodes; the
  // Gaussian decay is compensated by the exp-scaled weights.
  Eigen::MatrixXd psi(q, m + 1);
  for (int i = 0; i < q; ++i) {
    const double x = rule.nodes[i];
    double prev = 0.0;
    double cur = std::pow(w / M_PI, 0.25) * std::exp(-w * x * x / 2.0);
    for (int n = 0; n <= m; ++n) {
      psi(i, n) = cur;
      double next = std::sqrt(2.0 * w / (n + 1)) * x * cur - std::sqrt(double(n) / (n + 1)) * prev;
      prev = cur;
      cur = next;
    }
  }

  const bool need1 = expr.has_power(1);
  const bool need2 = expr.has_power(2);
  Eigen::MatrixXd dpsi;
  if (need1) {
    // d/dx psi_n = sqrt(w/2) (sqrt(n) psi_{n-1} - sqrt(n+1) psi_{n+1})
    dpsi.resize(q, m);
    const double c = std::sqrt(w / 2.0);
    for (int n = 0; n < m; ++n) {
      dpsi.col(n) = -c * std::sqrt(double(n + 1)) * psi.col(n + 1);
      if (n > 0) dpsi.col(n) += c * std::sqrt(double(n)) * psi.col(n - 1);
    }
  }

  Eigen::MatrixXcd action = Eigen::MatrixXcd::Zero(q, m);
  for (int i = 0; i < q; ++i) {
    const double x = rule.nodes[i];
    cd c0 = expr.derivative_coefficient(0, x);
    cd c1 = need1 ? expr.derivative_coefficient(1, x) : cd(0.0);
    cd c2 = need2 ? expr.derivative_coefficient(2, x) : cd(0.0);
    if (!finite(c0) || !finite(c1) || !finite(c2))
      throw AssemblyError(fmt::format("coefficient not finite at quadrature node x = {}", x));
    for (int n = 0; n < m; ++n) {
      cd a = c0 * psi(i, n);
      if (need1) a += c1 * dpsi(i, n);
      if (need2) {
        // psi_n'' = (w^2 x^2 - w(2n+1)) psi_n, exact from the defining ODE
        a += c2 * (w * w * x * x - w * (2 * n + 1)) * psi(i, n);
      }
      action(i, n) = a;
    }
  }

  Eigen::MatrixXcd mat =
      psi.leftCols(m).transpose().cast<cd>() * rule.scaled_weights.asDiagonal() * action;
  return {std::move(mat), basis, to_string(expr)};
}

std::pair<MatrixRep, MatrixRep> position_momentum_matrices(const Representation& rep) {
  const int n = rep_size(rep);
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(n, n);
  if (is_grid(rep)) {
    const auto& g = std::get<GridSpec>(rep);
    const cd factor(0.0, -1.0 / (2.0 * g.spacing));
    for (int j = 0; j < n; ++j) {
      x(j, j) = g.node(j);
      if (j + 1 < n) p(j, j + 1) = factor;
      if (j - 1 >= 0) p(j, j - 1) = -factor;
    }
  } else {
    const auto& b = std::get<BasisSpec>(rep);
    for (int k = 0; k + 1 < n; ++k) {
      double xe = std::sqrt((k + 1) / (2.0 * b.frequency));
      double pe = std::sqrt(b.frequency * (k + 1) / 2.0);
      x(k, k + 1) = x(k + 1, k) = xe;
      p(k, k + 1) = cd(0.0, -pe);
      p(k + 1, k) = cd(0.0, pe);
    }
  }
  return {MatrixRep{std::move(x), rep, "x"}, MatrixRep{std::move(p), rep, "p"}};
}

Spectrum spectrum_of(const MatrixRep& a) {
  Spectrum s = eig_dense(a.matrix);
  if (is_grid(a.rep)) {
    flag_localized_modes(s);
  } else if (std::get<BasisSpec>(a.rep).size >= 16) {
    // Tiny bases have no meaningful truncation corner to diagnose.
    flag_tail_modes(s);
  }
  return s;
}

}  // namespace nhqm
