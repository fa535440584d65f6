#include "nhqm/canonical.hpp"

#include <cmath>

#include <fmt/format.h>

#include "nhqm/errors.hpp"

namespace nhqm {

namespace {

double residual(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& g) {
  return (g * a - a.adjoint() * g).norm() / (g.norm() * a.norm());
}

Eigen::MatrixXcd test_span(const Representation& rep, int k) {
  const int n = rep_size(rep);
  if (k < 1 || 2 * k > n) throw std::invalid_argument("test-vector count must be in [1, size/2]");
  Eigen::MatrixXcd v(n, k);
  if (is_grid(rep)) {
    const auto& g = std::get<GridSpec>(rep);
    const double half_width = g.half_points * g.spacing;
    for (int i = 0; i < k; ++i) {
      double sigma = k > 1 ? 1.0 + (half_width / 4.0 - 1.0) * i / (k - 1) : 1.0;
      for (int j = 0; j < n; ++j) {
        double x = g.node(j);
        v(j, i) = std::exp(-x * x / (2.0 * sigma * sigma));
      }
    }
  } else {
    v.setZero();
    for (int i = 0; i < k; ++i) v(i, i) = 1.0;
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(v);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(n, k);
}

}  // namespace

MatrixRep similarity_transform(const MatrixRep& a, const TransformMap& t) {
  if (t.t.rows() != a.matrix.rows()) throw std::invalid_argument("transform size mismatch");
  return {t.inv * a.matrix * t.t, a.rep,
          fmt::format("similarity({}, cond {:.3g})", a.provenance, t.condition)};
}

CanonicalPair canonical_pair(const TransformMap& t, const Representation& rep,
                             double threshold) {
  auto [x, p] = position_momentum_matrices(rep);
  CanonicalPair pair;
  pair.xc = similarity_transform(x, t);
  pair.xc.provenance = "x^c";
  pair.pc = similarity_transform(p, t);
  pair.pc.provenance = "p^c";
  pair.source = t;

  InnerProduct flat = InnerProduct::flat();
  Eigen::MatrixXcd g_flat = gram_matrix(flat, rep);
  Eigen::MatrixXcd eta = t.t.adjoint() * g_flat * t.t;
  eta = 0.5 * (eta + eta.adjoint()).eval();

  pair.report.threshold = threshold;
  for (const auto* a : {&pair.xc, &pair.pc}) {
    HermiticityRow row;
    row.label = a->provenance;
    row.residual_l2 = residual(a->matrix, g_flat);
    row.residual_h = residual(a->matrix, eta);
    row.hermitian_l2 = row.residual_l2 <= threshold;
    row.hermitian_h = row.residual_h <= threshold;
    pair.report.rows.push_back(std::move(row));
  }
  return pair;
}

double commutator_residual(const CanonicalPair& pair, int modes) {
  Eigen::MatrixXcd q = test_span(pair.xc.rep, modes);
  const int n = static_cast<int>(q.rows());
  Eigen::MatrixXcd comm = pair.xc.matrix * pair.pc.matrix - pair.pc.matrix * pair.xc.matrix -
                          std::complex<double>(0, 1) * Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd projected = q * (q.adjoint() * (comm * q));
  double worst = 0.0;
  for (int i = 0; i < projected.cols(); ++i) worst = std::max(worst, projected.col(i).norm());
  return worst;
}

HermiticityReport hermiticity_table(const MatrixRep& h, const MatrixRep& xc,
                                    const MatrixRep& pc, const MatrixRep& hhat,
                                    const MatrixRep& x, const MatrixRep& p,
                                    const InnerProduct& ip_l2, const InnerProduct& ip_h,
                                    double threshold) {
  Eigen::MatrixXcd g_l2 = gram_matrix(ip_l2, h.rep);
  Eigen::MatrixXcd g_h = gram_matrix(ip_h, h.rep);
  HermiticityReport report;
  report.threshold = threshold;
  const std::pair<const char*, const MatrixRep*> entries[] = {
      {"H", &h}, {"x^c", &xc}, {"p^c", &pc}, {"Hhat", &hhat}, {"x", &x}, {"p", &p}};
  for (const auto& [label, a] : entries) {
    HermiticityRow row;
    row.label = label;
    row.residual_l2 = residual(a->matrix, g_l2);
    row.residual_h = residual(a->matrix, g_h);
    row.hermitian_l2 = row.residual_l2 <= threshold;
    row.hermitian_h = row.residual_h <= threshold;
    report.rows.push_back(std::move(row));
  }
  return report;
}

double canonical_form_residual(const MatrixRep& h, const CanonicalPair& pair,
                               const OperatorExpr& form) {
  const int n = static_cast<int>(h.matrix.rows());
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& term : form.terms) {
    Eigen::MatrixXcd factor = eval_matrix(term.coeff, pair.xc.matrix);
    for (int k = 0; k < term.p_power; ++k) factor = (factor * pair.pc.matrix).eval();
    acc += factor;
  }
  return (h.matrix - acc).norm() / h.matrix.norm();
}

double canonical_form_residual_restricted(const MatrixRep& h, const CanonicalPair& pair,
                                          const OperatorExpr& form, int test_vectors) {
  if (!is_grid(h.rep))
    throw std::invalid_argument("restricted residual is defined on grid representations");
  const auto& grid = std::get<GridSpec>(h.rep);
  const int n = grid.size();
  const double half_width = grid.half_points * grid.spacing;

  Eigen::MatrixXcd templ = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& term : form.terms) {
    Eigen::MatrixXcd factor = eval_matrix(term.coeff, pair.xc.matrix);
    for (int k = 0; k < term.p_power; ++k) factor = (factor * pair.pc.matrix).eval();
    templ += factor;
  }
  Eigen::MatrixXcd diff = h.matrix - templ;

  Eigen::VectorXd mask(n);
  for (int j = 0; j < n; ++j) {
    double ax = std::abs(grid.node(j));
    mask[j] = (ax > 0.5 && ax < half_width - 1.0) ? 1.0 : 0.0;
  }

  const int k = std::max(1, test_vectors);
  double worst = 0.0;
  for (int i = 0; i < k; ++i) {
    double sigma = k > 1 ? 1.0 + (half_width / 4.0 - 1.0) * i / (k - 1) : 1.0;
    Eigen::VectorXcd u(n);
    for (int j = 0; j < n; ++j) {
      double x = grid.node(j);
      u[j] = x * std::exp(-x * x / (2.0 * sigma * sigma));
    }
    u /= u.norm();
    Eigen::VectorXcd r = diff * u;
    worst = std::max(worst, (mask.asDiagonal() * r).norm() / (h.matrix * u).norm());
  }
  return worst;
}

TransformMap eigenmap_T(const Spectrum& s_from, const Spectrum& s_to, int count) {
  if (count < 1) throw std::invalid_argument("eigenmap: count must be positive");
  auto from_idx = s_from.physical_indices();
  auto to_idx = s_to.physical_indices();
  if (count > static_cast<int>(from_idx.size()) || count > static_cast<int>(to_idx.size()))
    throw std::invalid_argument("eigenmap: not enough eigenpairs");
  const int n = static_cast<int>(s_from.right_vectors.rows());
  Eigen::MatrixXcd a(n, count), b(n, count);
  for (int k = 0; k < count; ++k) {
    a.col(k) = s_from.right_vectors.col(from_idx[k]);
    b.col(k) = s_to.right_vectors.col(to_idx[k]);
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
  double cond = svd.singularValues()(0) / svd.singularValues()(count - 1);
  if (!(cond <= 1e8))
    throw ConditioningError(fmt::format("eigenvector block condition {} exceeds 1e8", cond));

  // Thin QR of the source block: T = I + (B R^-1 - Q) Q^dag maps column k of A
  // to column k of B and is the identity on the orthogonal complement.
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd qthin = qr.householderQ() * Eigen::MatrixXcd::Identity(n, count);
  Eigen::MatrixXcd r = qr.matrixQR().topRows(count).triangularView<Eigen::Upper>();
  Eigen::MatrixXcd correction =
      b * r.inverse() - qthin;

  TransformMap map;
  map.t = Eigen::MatrixXcd::Identity(n, n) + correction * qthin.adjoint();
  map.inv = map.t.partialPivLu().inverse();
  map.condition = map.t.norm() * map.inv.norm() / n;
  return map;
}

}  // namespace nhqm
