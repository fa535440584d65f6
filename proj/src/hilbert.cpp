#include "nhqm/hilbert.hpp"

#include <cmath>

#include <fmt/format.h>

#include "nhqm/errors.hpp"

namespace nhqm {

namespace {

using cd = std::complex<double>;

void check_hermitian_pd(const Eigen::MatrixXcd& g, const char* what) {
  if ((g - g.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, g.cwiseAbs().maxCoeff()))
    throw MetricError(fmt::format("{}: Gram matrix is not Hermitian", what));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (!(lo > 1e-12 * std::max(hi, 0.0)))
    throw MetricError(fmt::format("{}: Gram matrix is not positive definite (min eig {})", what, lo));
}

}  // namespace

InnerProduct InnerProduct::flat() { return {}; }

InnerProduct InnerProduct::weighted(ScalarExpr w) {
  InnerProduct ip;
  ip.kind = Kind::Weighted;
  ip.weight = std::move(w);
  return ip;
}

InnerProduct InnerProduct::with_metric(Eigen::MatrixXcd eta) {
  InnerProduct ip;
  ip.kind = Kind::Metric;
  ip.metric = std::move(eta);
  return ip;
}

InnerProduct InnerProduct::eigenbasis_delta(const Spectrum& s) {
  InnerProduct ip;
  ip.kind = Kind::EigenbasisDelta;
  ip.right_basis = s.right_vectors;
  return ip;
}

Eigen::MatrixXcd gram_matrix(const InnerProduct& ip, const Representation& rep) {
  const int n = rep_size(rep);
  switch (ip.kind) {
    case InnerProduct::Kind::Flat: {
      double scale = is_grid(rep) ? std::get<GridSpec>(rep).spacing : 1.0;
      return scale * Eigen::MatrixXcd::Identity(n, n);
    }
    case InnerProduct::Kind::Weighted: {
      if (!is_grid(rep)) throw MetricError("weighted inner product requires a grid representation");
      const auto& g = std::get<GridSpec>(rep);
      Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(n, n);
      for (int j = 0; j < n; ++j) {
        cd w = eval(ip.weight, g.node(j));
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
          throw MetricError(fmt::format("weight not finite at node {} (x = {})", j, g.node(j)));
        if (std::abs(w.imag()) > 1e-12 * std::abs(w.real()) || !(w.real() > 0.0))
          throw MetricError(fmt::format("weight not positive at node {} (x = {})", j, g.node(j)));
        gram(j, j) = g.spacing * w.real();
      }
      return gram;
    }
    case InnerProduct::Kind::Metric: {
      if (ip.metric.rows() != n) throw MetricError("metric size does not match representation");
      check_hermitian_pd(ip.metric, "metric");
      return ip.metric;
    }
    case InnerProduct::Kind::EigenbasisDelta: {
      if (ip.right_basis.rows() != n) throw MetricError("eigenbasis size does not match representation");
      Eigen::MatrixXcd inv = ip.right_basis.partialPivLu().inverse();
      Eigen::MatrixXcd gram = inv.adjoint() * inv;
      gram = 0.5 * (gram + gram.adjoint()).eval();
      check_hermitian_pd(gram, "eigenbasis-delta");
      return gram;
    }
  }
  throw MetricError("unknown inner-product kind");
}

InnerProduct metric_from_spectrum(const Spectrum& s) {
  if (!(s.basis_condition <= 1e10))
    throw ConditioningError(fmt::format(
        "eigenbasis condition {} too large for a metric construction", s.basis_condition));
  Eigen::MatrixXcd eta = s.left_vectors * s.left_vectors.adjoint();
  eta = 0.5 * (eta + eta.adjoint()).eval();
  return InnerProduct::with_metric(std::move(eta));
}

TransformMap unitarizing_map(const InnerProduct& ip_metric) {
  if (ip_metric.kind != InnerProduct::Kind::Metric)
    throw MetricError("unitarizing map needs an explicit metric");
  const Eigen::MatrixXcd& eta = ip_metric.metric;
  if ((eta - eta.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, eta.cwiseAbs().maxCoeff()))
    throw MetricError("metric is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(eta);
  const auto& lam = es.eigenvalues();
  double hi = lam.maxCoeff();
  if (!(lam.minCoeff() > 1e-12 * std::max(hi, 0.0)))
    throw MetricError("metric is not positive definite");
  Eigen::VectorXd root = lam.cwiseSqrt();
  TransformMap map;
  map.t = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
  map.inv = es.eigenvectors() * root.cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
  map.condition = root.maxCoeff() / root.minCoeff();
  return map;
}

TransformMap diagonal_map(const ScalarExpr& expr, const GridSpec& grid) {
  const int n = grid.size();
  TransformMap map;
  map.t = Eigen::MatrixXcd::Zero(n, n);
  map.inv = Eigen::MatrixXcd::Zero(n, n);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int j = 0; j < n; ++j) {
    cd v = eval(expr, grid.node(j));
    double m = std::abs(v);
    if (!std::isfinite(m) || m == 0.0 || !std::isfinite(1.0 / m))
      throw SingularMapError(fmt::format("transform vanishes or blows up at node {} (x = {})",
                                         j, grid.node(j)));
    map.t(j, j) = v;
    map.inv(j, j) = 1.0 / v;
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  map.condition = hi / lo;
  return map;
}

double pseudo_hermiticity_residual(const MatrixRep& h, const InnerProduct& ip) {
  Eigen::MatrixXcd g = gram_matrix(ip, h.rep);
  return (g * h.matrix - h.matrix.adjoint() * g).norm() / (g.norm() * h.matrix.norm());
}

double pseudo_hermiticity_residual_restricted(const MatrixRep& h, const InnerProduct& ip,
                                              int test_vectors) {
  if (!is_grid(h.rep))
    throw MetricError("restricted residual is defined on grid representations");
  const auto& grid = std::get<GridSpec>(h.rep);
  const int n = grid.size();
  const double half_width = grid.half_points * grid.spacing;
  Eigen::MatrixXcd g = gram_matrix(ip, h.rep);

  Eigen::MatrixXcd g_inv_root;
  if ((g - Eigen::MatrixXcd(g.diagonal().asDiagonal())).norm() == 0.0) {
    g_inv_root = Eigen::MatrixXcd(
        g.diagonal().real().cwiseSqrt().cwiseInverse().cast<std::complex<double>>().asDiagonal());
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
    g_inv_root = es.eigenvectors() *
                 es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                 es.eigenvectors().adjoint();
  }

  Eigen::MatrixXcd defect = g * h.matrix - h.matrix.adjoint() * g;
  const double scale = g.norm() * h.matrix.norm();
  double worst = 0.0;
  const int k = std::max(1, test_vectors);
  for (int i = 0; i < k; ++i) {
    double sigma = k > 1 ? 1.0 + (half_width / 4.0 - 1.0) * i / (k - 1) : 1.0;
    Eigen::VectorXcd u(n);
    for (int j = 0; j < n; ++j) {
      double x = grid.node(j);
      u[j] = std::exp(-x * x / (2.0 * sigma * sigma));
    }
    u = (g_inv_root * u).eval();
    u /= u.norm();
    worst = std::max(worst, (defect * u).norm() / scale);
  }
  return worst;
}

double orthonormality_defect(const Spectrum& s, const InnerProduct& ip,
                             const Representation& rep, int count) {
  Eigen::MatrixXcd g = gram_matrix(ip, rep);
  auto idx = s.physical_indices();
  if (count > static_cast<int>(idx.size()))
    throw std::invalid_argument("orthonormality_defect: not enough eigenpairs");
  Eigen::MatrixXcd v(s.right_vectors.rows(), count);
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXcd psi = s.right_vectors.col(idx[k]);
    double gn = std::sqrt(std::abs((psi.adjoint() * g * psi)(0, 0).real()));
    v.col(k) = psi / gn;
  }
  Eigen::MatrixXcd m = v.adjoint() * g * v;
  return (m - Eigen::MatrixXcd::Identity(count, count)).cwiseAbs().maxCoeff();
}

MatrixRep adjoint_wrt(const MatrixRep& a, const InnerProduct& ip) {
  Eigen::MatrixXcd g = gram_matrix(ip, a.rep);
  Eigen::MatrixXcd adj = g.partialPivLu().solve(a.matrix.adjoint() * g);
  return {std::move(adj), a.rep, "adjoint(" + a.provenance + ")"};
}

}  // namespace nhqm
