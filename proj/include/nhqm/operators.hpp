#pragma once

#include <string>
#include <utility>
#include <variant>

#include "nhqm/expr.hpp"
#include "nhqm/numerics.hpp"

namespace nhqm {

using Representation = std::variant<GridSpec, BasisSpec>;

inline bool is_grid(const Representation& r) { return std::holds_alternative<GridSpec>(r); }
inline int rep_size(const Representation& r) {
  return is_grid(r) ? std::get<GridSpec>(r).size() : std::get<BasisSpec>(r).size;
}

/// Dense matrix of an operator together with the representation it lives in.
struct MatrixRep {
  Eigen::MatrixXcd matrix;
  Representation rep;
  std::string provenance;
};

/// Finite-difference assembly: d/dx -> (v_{j+1} - v_{j-1})/(2h),
/// d^2/dx^2 -> (v_{j+1} - 2 v_j + v_{j-1})/h^2, multiplication -> diagonal,
/// zero values beyond both ends.
MatrixRep assemble_grid(const OperatorExpr& expr, const GridSpec& grid);

/// Galerkin matrix (m,n) = integral psi_m (expr psi_n) dx by Gauss-Hermite
/// quadrature; derivatives of the basis functions taken analytically.
/// quadrature_points <= 0 selects the default Q = 2M. Coefficients with
/// negative powers of x are rejected (use the grid representation).
MatrixRep assemble_basis(const OperatorExpr& expr, const BasisSpec& basis,
                         int quadrature_points = 0);

std::pair<MatrixRep, MatrixRep> position_momentum_matrices(const Representation& rep);

struct InnerProduct;  // hilbert.hpp

/// Matrix of the adjoint with respect to (u,v) = u^dag G v: G^{-1} A^dag G.
MatrixRep adjoint_wrt(const MatrixRep& a, const InnerProduct& ip);

/// eig_dense plus representation-appropriate artifact flagging: localized
/// collapse modes on grids, truncation-corner modes in the basis.
Spectrum spectrum_of(const MatrixRep& a);

}  // namespace nhqm
