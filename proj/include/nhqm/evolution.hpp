#pragma once

#include "nhqm/hilbert.hpp"

namespace nhqm {

struct EvolutionResult {
  Eigen::VectorXd times;
  Eigen::MatrixXcd states;  // column per time point
  Eigen::VectorXd l2_norms;
  Eigen::VectorXd h_norms;
  Eigen::VectorXcd expansion_coefficients;  // c_n = phi_n^dag psi0
  bool complex_spectrum = false;            // some eigenvalue classified non-real
  double discarded_fraction = 0.0;          // part of psi0 outside the eigenbasis span
};

/// psi(t) = sum_n c_n e^{-i E_n t} psi_n with c_n = phi_n^dag psi0;
/// l2_norms = ||psi(t)||_2, h_norms = sqrt(psi^dag G psi) for G from ip.
EvolutionResult spectral_propagate(const Spectrum& s, const Eigen::VectorXcd& psi0,
                                   const Eigen::VectorXd& times, const InnerProduct& ip,
                                   const Representation& rep);

/// Normalized sum of the two lowest physical modes that have a nonzero mutual
/// flat overlap, so the L2 norm of the evolved state visibly oscillates.
Eigen::VectorXcd two_mode_initial_state(const Spectrum& s);

}  // namespace nhqm
