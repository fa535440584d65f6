#pragma once

#include "nhqm/expr.hpp"
#include "nhqm/operators.hpp"

namespace nhqm {

/// Inner product (u,v) = u^dag G v. The Gram matrix G depends on the
/// representation: flat is h*I on a grid and I on basis coefficients;
/// weighted is h*diag(w(x_j)) (grid only); metric carries an explicit
/// Hermitian positive-definite eta; eigenbasis_delta declares
/// (psi_n, psi_m) = delta_nm for a given eigensystem, G = (Psi^-1)^dag Psi^-1.
struct InnerProduct {
  enum class Kind { Flat, Weighted, Metric, EigenbasisDelta };

  Kind kind = Kind::Flat;
  ScalarExpr weight;             // Weighted
  Eigen::MatrixXcd metric;       // Metric
  Eigen::MatrixXcd right_basis;  // EigenbasisDelta: the right-vector matrix

  static InnerProduct flat();
  static InnerProduct weighted(ScalarExpr w);
  static InnerProduct with_metric(Eigen::MatrixXcd eta);
  static InnerProduct eigenbasis_delta(const Spectrum& s);
};

Eigen::MatrixXcd gram_matrix(const InnerProduct& ip, const Representation& rep);

/// Metric realizing (psi_n, psi_m) = delta_nm for the given eigensystem.
InnerProduct metric_from_spectrum(const Spectrum& s);

/// Invertible map with (u,v)_eta = (T u)^dag (T v).
struct TransformMap {
  Eigen::MatrixXcd t;
  Eigen::MatrixXcd inv;
  double condition = 1.0;
};

/// Positive Hermitian square root of the metric: T = eta^{1/2}, T^dag T = eta.
TransformMap unitarizing_map(const InnerProduct& ip_metric);

/// T = diag(expr(x_j)) with its exact inverse.
TransformMap diagonal_map(const ScalarExpr& expr, const GridSpec& grid);

/// ||G H - H^dag G||_F / (||G||_F ||H||_F).
double pseudo_hermiticity_residual(const MatrixRep& h, const InnerProduct& ip);

/// Same defect measured only on smooth states: u_i = normalized
/// G^{-1/2} (Gaussian of width s_i), widths spanning [1, L/4], and the result
/// is max_i ||(G H - H^dag G) u_i||_2 / (||G||_F ||H||_F). For stencil
/// assemblies this isolates the O(h^2) interior error from the
/// boundary/singularity rows that dominate the Frobenius norm.
double pseudo_hermiticity_residual_restricted(const MatrixRep& h, const InnerProduct& ip,
                                              int test_vectors = 8);

/// ||M - I||_max over the k x k Gram matrix M_nm = psi_n^dag G psi_m of the
/// first k non-suspect eigenvectors, each normalized to unit G-norm first.
double orthonormality_defect(const Spectrum& s, const InnerProduct& ip,
                             const Representation& rep, int count);

}  // namespace nhqm
