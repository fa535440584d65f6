#pragma once

#include <string>
#include <vector>

#include "nhqm/hilbert.hpp"

namespace nhqm {

struct HermiticityRow {
  std::string label;
  double residual_l2 = 0.0;
  double residual_h = 0.0;
  bool hermitian_l2 = false;
  bool hermitian_h = false;
};

struct HermiticityReport {
  std::vector<HermiticityRow> rows;
  double threshold = 1e-8;
};

/// Canonical pair x^c = T^-1 x T, p^c = T^-1 p T together with the map that
/// produced it and a Hermiticity report against the metric T^dag G_flat T.
struct CanonicalPair {
  MatrixRep xc;
  MatrixRep pc;
  TransformMap source;
  HermiticityReport report;
};

MatrixRep similarity_transform(const MatrixRep& a, const TransformMap& t);

CanonicalPair canonical_pair(const TransformMap& t, const Representation& rep,
                             double threshold = 1e-3);

/// max_i || P ([xc,pc] - iI) q_i ||_2 where the q_i are k orthonormalized
/// smooth test vectors (grid: centered Gaussians with widths spanning
/// [1, L/4]; basis: the first k coordinate vectors) and P projects back onto
/// their span.
double commutator_residual(const CanonicalPair& pair, int modes);

HermiticityReport hermiticity_table(const MatrixRep& h, const MatrixRep& xc,
                                    const MatrixRep& pc, const MatrixRep& hhat,
                                    const MatrixRep& x, const MatrixRep& p,
                                    const InnerProduct& ip_l2, const InnerProduct& ip_h,
                                    double threshold);

/// || H - template(x^c, p^c) ||_F / ||H||_F, the template evaluated by literal
/// matrix substitution in the written order (no symmetrization).
double canonical_form_residual(const MatrixRep& h, const CanonicalPair& pair,
                               const OperatorExpr& form);

/// Same defect measured only on smooth in-domain states and interior rows
/// (grid representations): test vectors u_i = x * Gaussian with widths
/// spanning [1, L/4], rows restricted to 0.5 < |x| < L - 1, and the result is
/// max_i ||(H - template(xc,pc)) u_i||_restricted / ||H u_i||_2. Stencil
/// assemblies converge at O(h^2) in this measure; the Frobenius version above
/// does not because squared first differences and the compact second
/// difference differ at matrix level.
double canonical_form_residual_restricted(const MatrixRep& h, const CanonicalPair& pair,
                                          const OperatorExpr& form, int test_vectors = 8);

/// Map taking the first k non-suspect eigenvectors of one spectrum onto those
/// of another (identity on the orthogonal complement of the source span).
TransformMap eigenmap_T(const Spectrum& s_from, const Spectrum& s_to, int count);

}  // namespace nhqm
