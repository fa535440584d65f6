#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace nhqm {

/// Uniform half-offset grid: nodes x_j = (j + 1/2) h for j = -N .. N-1.
/// No node sits at x = 0 and the node set is symmetric about 0.
struct GridSpec {
  int half_points = 0;  // N; total node count is 2N
  double spacing = 0.0;

  int size() const { return 2 * half_points; }
  double node(int i) const { return (i - half_points + 0.5) * spacing; }
  Eigen::VectorXd nodes() const;
};

/// Truncated harmonic-oscillator eigenbasis psi_n of p^2 + omega^2 x^2,
/// n = 0 .. size-1.
struct BasisSpec {
  int size = 0;
  double frequency = 1.0;
};

GridSpec make_grid(double domain_half_width, int half_points);

/// L2-normalized eigenfunction of p^2 + omega^2 x^2 with eigenvalue
/// omega(2n+1), by the stable three-term recurrence.
double hermite_function(int n, double omega, double x);

struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;         // native weights of exp(-omega x^2)
  Eigen::VectorXd scaled_weights;  // weights * exp(+omega x^2), overflow-safe
};

/// Gauss-Hermite rule: sum_i w_i f(x_i) ~ integral f(x) exp(-omega x^2) dx,
/// exact for polynomials of degree <= 2Q-1. scaled_weights absorb the
/// Gaussian so that sum_i sw_i g(x_i) ~ integral g(x) dx for g that already
/// decays like the basis functions.
QuadratureRule gauss_hermite_rule(int points, double omega);

/// Eigenvalue realness test: |Im E| <= max(1e-6, 1e-6 |Re E|).
bool eigenvalue_is_real(std::complex<double> e);

/// Full eigensystem of a dense complex matrix with biorthogonal left
/// vectors. Eigenvalues sorted by (Re, Im) ascending; each right vector has
/// unit 2-norm with its largest-magnitude entry made real positive.
struct Spectrum {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd right_vectors;  // columns psi_n
  Eigen::MatrixXcd left_vectors;   // columns phi_n, phi^dag psi = I
  Eigen::VectorXd residuals;       // ||A psi - E psi||_2 / ||A||_F
  double basis_condition = 0.0;
  bool ill_conditioned = false;  // basis_condition > 1e12

  /// True where the eigenvector is a discretization artifact (collapse mode
  /// of a singular potential, truncation-corner mode); set by the flagging
  /// helpers below, all-false straight out of eig_dense. "Lowest k physical"
  /// selections skip flagged pairs.
  std::vector<bool> suspect;

  /// Indices of the non-suspect pairs, in spectral order.
  std::vector<int> physical_indices() const;

  /// Copy restricted to the non-suspect pairs.
  Spectrum physical() const;
};

Spectrum eig_dense(const Eigen::MatrixXcd& a);

/// Flags eigenvectors concentrated on a handful of grid nodes (inverse
/// participation ratio sum|v_i|^4 above the threshold). On a fine grid these
/// are collapse modes of singular potentials, not physical states.
void flag_localized_modes(Spectrum& s, double ipr_threshold = 0.25);

/// Flags eigenvectors whose coefficient mass sits in the top tail_fraction of
/// basis indices; those live at the truncation corner of the basis.
void flag_tail_modes(Spectrum& s, double tail_fraction = 0.25, double mass_threshold = 0.5);

}  // namespace nhqm
