#include "nhqm/evolution.hpp"

#include <cmath>

namespace nhqm {

EvolutionResult spectral_propagate(const Spectrum& s, const Eigen::VectorXcd& psi0,
                                   const Eigen::VectorXd& times, const InnerProduct& ip,
                                   const Representation& rep) {
  const int n = static_cast<int>(s.right_vectors.rows());
  if (psi0.size() != n) throw std::invalid_argument("initial state size mismatch");
  if (times.size() == 0) throw std::invalid_argument("empty time list");
  if (psi0.norm() == 0.0) throw std::invalid_argument("initial state is zero");

  Eigen::MatrixXcd g = gram_matrix(ip, rep);

  EvolutionResult out;
  out.times = times;
  out.expansion_coefficients = s.left_vectors.adjoint() * psi0;
  out.discarded_fraction =
      (psi0 - s.right_vectors * out.expansion_coefficients).norm() / psi0.norm();
  for (int k = 0; k < s.eigenvalues.size(); ++k)
    if (!eigenvalue_is_real(s.eigenvalues[k])) out.complex_spectrum = true;

  const int nt = static_cast<int>(times.size());
  out.states.resize(n, nt);
  out.l2_norms.resize(nt);
  out.h_norms.resize(nt);
  for (int t = 0; t < nt; ++t) {
    Eigen::VectorXcd c = out.expansion_coefficients;
    for (int k = 0; k < c.size(); ++k)
      c[k] *= std::exp(std::complex<double>(0.0, -1.0) * s.eigenvalues[k] * times[t]);
    Eigen::VectorXcd psi = s.right_vectors * c;
    out.states.col(t) = psi;
    out.l2_norms[t] = psi.norm();
    out.h_norms[t] = std::sqrt(std::abs((psi.adjoint() * g * psi)(0, 0).real()));
  }
  return out;
}

Eigen::VectorXcd two_mode_initial_state(const Spectrum& s) {
  auto idx = s.physical_indices();
  if (idx.size() < 2) throw std::invalid_argument("need at least two physical modes");
  const Eigen::VectorXcd a = s.right_vectors.col(idx[0]);
  for (std::size_t j = 1; j < idx.size(); ++j) {
    const Eigen::VectorXcd b = s.right_vectors.col(idx[j]);
    if (std::abs(a.dot(b)) > 1e-6) {
      Eigen::VectorXcd mix = a + b;
      return mix / mix.norm();
    }
  }
  // All later modes are flat-orthogonal to the ground mode; fall back to the
  // first excited one.
  Eigen::VectorXcd mix = a + s.right_vectors.col(idx[1]);
  return mix / mix.norm();
}

}  // namespace nhqm
