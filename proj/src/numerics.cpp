#include "nhqm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nhqm/errors.hpp"

#define lapack_complex_double std::complex<double>
#define lapack_complex_float std::complex<float>
#include <lapacke.h>

namespace nhqm {

Eigen::VectorXd GridSpec::nodes() const {
  Eigen::VectorXd x(size());
  for (int i = 0; i < size(); ++i) x[i] = node(i);
  return x;
}

GridSpec make_grid(double domain_half_width, int half_points) {
  if (!(domain_half_width > 0.0)) throw std::invalid_argument("domain half-width must be positive");
  if (half_points < 2) throw std::invalid_argument("need at least 2 half-points");
  return {half_points, domain_half_width / half_points};
}

double hermite_function(int n, double omega, double x) {
  if (n < 0) throw std::invalid_argument("hermite_function: n must be nonnegative");
  if (!(omega > 0.0)) throw std::invalid_argument("hermite_function: omega must be positive");
  double prev = 0.0;
  double cur = std::pow(omega / M_PI, 0.25) * std::exp(-omega * x * x / 2.0);
  for (int k = 0; k < n; ++k) {
    double next = std::sqrt(2.0 * omega / (k + 1)) * x * cur - std::sqrt(double(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

// psi_{Q-1}(t) for omega = 1 with overflow-safe exponent tracking; returns
// log |psi| and lets the caller form exp-scaled weights directly.
double log_abs_hermite_top(int q, double t) {
  double prev = 0.0;
  double cur = std::pow(M_PI, -0.25);
  double log_scale = -t * t / 2.0;
  for (int k = 0; k < q - 1; ++k) {
    double next = std::sqrt(2.0 / (k + 1)) * t * cur - std::sqrt(double(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
    double m = std::abs(cur);
    if (m > 1e100 || (m > 0.0 && m < 1e-100)) {
      cur /= m;
      prev /= m;
      log_scale += std::log(m);
    }
  }
  return log_scale + std::log(std::abs(cur));
}

}  // namespace

QuadratureRule gauss_hermite_rule(int points, double omega) {
  if (points < 1) throw std::invalid_argument("gauss_hermite_rule: need at least one point");
  if (!(omega > 0.0)) throw std::invalid_argument("gauss_hermite_rule: omega must be positive");
  const int q = points;
  Eigen::VectorXd t(q);
  Eigen::VectorXd w(q);
  if (q == 1) {
    t[0] = 0.0;
    w[0] = std::sqrt(M_PI);
  } else {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(q, q);
    for (int k = 1; k < q; ++k) jac(k - 1, k) = jac(k, k - 1) = std::sqrt(k / 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
    t = es.eigenvalues();
    for (int i = 0; i < q; ++i) w[i] = std::sqrt(M_PI) * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
  }
  const double root = std::sqrt(omega);
  QuadratureRule rule;
  rule.nodes = t / root;
  rule.weights = w / root;
  rule.scaled_weights.resize(q);
  for (int i = 0; i < q; ++i) {
    // w_i e^{t^2} = 1 / (Q psi_{Q-1}(t_i)^2), evaluated in log space
    double lw = -std::log(double(q)) - 2.0 * log_abs_hermite_top(q, t[i]);
    rule.scaled_weights[i] = std::exp(lw) / root;
  }
  return rule;
}

bool eigenvalue_is_real(std::complex<double> e) {
  return std::abs(e.imag()) <= std::max(1e-6, 1e-6 * std::abs(e.real()));
}

std::vector<int> Spectrum::physical_indices() const {
  std::vector<int> idx;
  for (int i = 0; i < eigenvalues.size(); ++i)
    if (suspect.empty() || !suspect[i]) idx.push_back(i);
  return idx;
}

Spectrum Spectrum::physical() const {
  const auto idx = physical_indices();
  Spectrum out;
  out.eigenvalues.resize(idx.size());
  out.right_vectors.resize(right_vectors.rows(), idx.size());
  out.left_vectors.resize(left_vectors.rows(), idx.size());
  out.residuals.resize(idx.size());
  out.basis_condition = basis_condition;
  out.ill_conditioned = ill_conditioned;
  out.suspect.assign(idx.size(), false);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out.eigenvalues[k] = eigenvalues[idx[k]];
    out.right_vectors.col(k) = right_vectors.col(idx[k]);
    out.left_vectors.col(k) = left_vectors.col(idx[k]);
    out.residuals[k] = residuals[idx[k]];
  }
  return out;
}

namespace {

struct RawEig {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;
};

RawEig eig_complex(const Eigen::MatrixXcd& a) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXcd work = a;
  RawEig out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, work.data(), n, out.values.data(),
                           nullptr, 1, out.vectors.data(), n);
  if (info != 0) throw EigenSolverError("zgeev failed to converge (info=" + std::to_string(info) + ")");
  return out;
}

// Real matrices go through dgeev so that real eigenvalues stay exactly real.
RawEig eig_real(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXd work = a;
  Eigen::VectorXd wr(n), wi(n);
  Eigen::MatrixXd vr(n, n);
  int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'V', n, work.data(), n, wr.data(), wi.data(),
                           nullptr, 1, vr.data(), n);
  if (info != 0) throw EigenSolverError("dgeev failed to converge (info=" + std::to_string(info) + ")");
  RawEig out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int j = 0; j < n; ++j) {
    out.values[j] = {wr[j], wi[j]};
    if (wi[j] > 0.0 && j + 1 < n) {
      out.vectors.col(j) = vr.col(j) + std::complex<double>(0, 1) * vr.col(j + 1);
      out.vectors.col(j + 1) = vr.col(j) - std::complex<double>(0, 1) * vr.col(j + 1);
      ++j;
      out.values[j] = {wr[j], wi[j]};
    } else {
      out.vectors.col(j) = vr.col(j).cast<std::complex<double>>();
    }
  }
  return out;
}

double inverse_participation(const Eigen::VectorXcd& v) {
  double s = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    double a2 = std::norm(v[i]);
    s += a2 * a2;
  }
  return s;
}

}  // namespace

Spectrum eig_dense(const Eigen::MatrixXcd& a) {
  if (a.rows() == 0 || a.rows() != a.cols()) throw std::invalid_argument("eig_dense: square matrix required");
  if (!a.allFinite()) throw std::invalid_argument("eig_dense: matrix has non-finite entries");
  const int n = static_cast<int>(a.rows());

  RawEig raw = a.imag().isZero(0.0) ? eig_real(a.real()) : eig_complex(a);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    const auto &u = raw.values[i], &v = raw.values[j];
    if (u.real() != v.real()) return u.real() < v.real();
    return u.imag() < v.imag();
  });

  Spectrum s;
  s.eigenvalues.resize(n);
  s.right_vectors.resize(n, n);
  for (int k = 0; k < n; ++k) {
    s.eigenvalues[k] = raw.values[order[k]];
    Eigen::VectorXcd v = raw.vectors.col(order[k]);
    v /= v.norm();
    int peak = 0;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      double m = std::abs(v[i]);
      if (m > best) {
        best = m;
        peak = i;
      }
    }
    std::complex<double> ph = v[peak] / std::abs(v[peak]);
    s.right_vectors.col(k) = v / ph;
  }

  const double norm_a = a.norm();
  s.residuals.resize(n);
  for (int k = 0; k < n; ++k)
    s.residuals[k] = (a * s.right_vectors.col(k) - s.eigenvalues[k] * s.right_vectors.col(k)).norm() /
                     (norm_a > 0.0 ? norm_a : 1.0);

  // Condition estimate and left vectors from an LU factorization of Psi.
  Eigen::MatrixXcd lu = s.right_vectors;
  std::vector<int> piv(n);
  int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, lu.data(), n, piv.data());
  double rcond = 0.0;
  if (info == 0) {
    double norm1 = 0.0;
    for (int j = 0; j < n; ++j) norm1 = std::max(norm1, s.right_vectors.col(j).cwiseAbs().sum());
    LAPACKE_zgecon(LAPACK_COL_MAJOR, '1', n, lu.data(), n, norm1, &rcond);
  }
  s.basis_condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  s.ill_conditioned = !(s.basis_condition <= 1e12);

  if (info == 0 && s.basis_condition <= 1e8) {
    Eigen::MatrixXcd inv = lu;
    LAPACKE_zgetri(LAPACK_COL_MAJOR, n, inv.data(), n, piv.data());
    s.left_vectors = inv.adjoint();
  } else {
    // Fall back to an independent decomposition of the adjoint, pairing each
    // left vector with the right eigenvalue closest to its conjugate.
    RawEig adj = eig_complex(a.adjoint());
    s.left_vectors.resize(n, n);
    std::vector<bool> used(n, false);
    for (int k = 0; k < n; ++k) {
      int pick = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j) {
        if (used[j]) continue;
        double d = std::abs(adj.values[j] - std::conj(s.eigenvalues[k]));
        if (d < best) {
          best = d;
          pick = j;
        }
      }
      used[pick] = true;
      Eigen::VectorXcd phi = adj.vectors.col(pick);
      std::complex<double> overlap = phi.dot(s.right_vectors.col(k));  // phi^dag psi
      if (std::abs(overlap) < 1e-300) throw ConditioningError("left/right eigenvector pairing degenerate");
      s.left_vectors.col(k) = phi / std::conj(overlap);
    }
  }

  s.suspect.assign(n, false);
  return s;
}

void flag_localized_modes(Spectrum& s, double ipr_threshold) {
  const int n = static_cast<int>(s.eigenvalues.size());
  if (static_cast<int>(s.suspect.size()) != n) s.suspect.assign(n, false);
  for (int k = 0; k < n; ++k)
    if (inverse_participation(s.right_vectors.col(k)) > ipr_threshold) s.suspect[k] = true;
}

void flag_tail_modes(Spectrum& s, double tail_fraction, double mass_threshold) {
  const int n = static_cast<int>(s.eigenvalues.size());
  const int rows = static_cast<int>(s.right_vectors.rows());
  if (static_cast<int>(s.suspect.size()) != n) s.suspect.assign(n, false);
  const int tail_start = rows - std::max(1, static_cast<int>(tail_fraction * rows));
  for (int k = 0; k < n; ++k) {
    double tail = s.right_vectors.col(k).segment(tail_start, rows - tail_start).squaredNorm();
    if (tail > mass_threshold) s.suspect[k] = true;
  }
}

}  // namespace nhqm
