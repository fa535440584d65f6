// End-to-end acceptance checks. Takes the CLI binary path as argv[1]; prints
// one PASS/FAIL line per criterion and exits with the number of failures.
#include <array>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "nhqm/canonical.hpp"
#include "nhqm/evolution.hpp"
#include "nhqm/models.hpp"

using namespace nhqm;
using cd = std::complex<double>;
using json = nlohmann::json;

namespace {

std::string g_cli;
int g_failures = 0;

void report(int criterion, const std::string& what, bool ok, const std::string& detail) {
  fmt::print("{} criterion {:2}: {} ({})\n", ok ? "PASS" : "FAIL", criterion, what, detail);
  if (!ok) ++g_failures;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = g_cli + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  RunResult r;
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

Spectrum paper_spectrum(int half_points) {
  ModelSpec m = paper_example(1.0);
  return spectrum_of(assemble_grid(m.expr, make_grid(10.0, half_points)));
}

// 1. The mixed-term model has the oscillator spectrum 2n+1 and the error
//    falls by ~4x when the grid is refined.
void criterion_1() {
  Spectrum s400 = paper_spectrum(400);
  Spectrum s800 = paper_spectrum(800);
  auto worst = [](const Spectrum& s) {
    auto idx = s.physical_indices();
    double w = 0.0;
    bool all_real = true;
    for (int n = 0; n < 8; ++n) {
      cd e = s.eigenvalues[idx[n]];
      all_real = all_real && eigenvalue_is_real(e);
      w = std::max(w, std::abs(e - cd(2.0 * n + 1.0)) / (2.0 * n + 1.0));
    }
    return std::pair{w, all_real};
  };
  auto [w400, real400] = worst(s400);
  auto [w800, real800] = worst(s800);
  double ratio = w400 / w800;
  bool ok = real400 && real800 && w400 <= 1e-2 && ratio >= 3.2 && ratio <= 4.8;
  report(1, "spectrum matches 2n+1 and converges at O(h^2)",
         ok, fmt::format("worst rel err {:.3g} -> {:.3g}, ratio {:.3g}", w400, w800, ratio));
}

// 2. Eigenfunctions are x times the oscillator eigenfunctions, node by node.
void criterion_2() {
  GridSpec g = make_grid(10.0, 400);
  Spectrum s = paper_spectrum(400);
  auto idx = s.physical_indices();
  double worst = 0.0;
  for (int n = 0; n <= 4; ++n) {
    Eigen::VectorXcd psi = s.right_vectors.col(idx[n]);
    Eigen::VectorXcd ref(g.size());
    for (int j = 0; j < g.size(); ++j)
      ref[j] = g.node(j) * hermite_function(n, 1.0, g.node(j));
    ref.normalize();
    cd overlap = ref.adjoint() * psi;
    psi *= std::abs(overlap) > 0 ? std::conj(overlap) / std::abs(overlap) : cd(1.0);
    worst = std::max(worst, (psi - ref).cwiseAbs().maxCoeff());
  }
  report(2, "eigenfunctions equal x times oscillator modes", worst <= 1e-2,
         fmt::format("worst node-wise residual {:.3g} for n <= 4", worst));
}

// 3. Eigenvectors are orthonormal under the weighted product, visibly
//    non-orthogonal under the flat one.
void criterion_3() {
  GridSpec g = make_grid(10.0, 400);
  Spectrum s = paper_spectrum(400);
  InnerProduct w = InnerProduct::weighted(parse_scalar_expression("1/x^2"));
  double dw = orthonormality_defect(s, w, g, 8);
  double df = orthonormality_defect(s, InnerProduct::flat(), g, 8);
  report(3, "orthonormal in the modified product only", dw <= 1e-2 && df >= 0.05,
         fmt::format("weighted defect {:.3g}, flat defect {:.3g}", dw, df));
}

// 4. Pseudo-Hermiticity: exact for the algebraic assembly, O(h^2) on smooth
//    states for the stencil assembly.
void criterion_4() {
  GridSpec g = make_grid(10.0, 400);
  auto [x, p] = position_momentum_matrices(g);
  Eigen::MatrixXcd hhat = p.matrix * p.matrix + x.matrix * x.matrix;
  Eigen::MatrixXcd xinv = x.matrix.diagonal().cwiseInverse().asDiagonal();
  MatrixRep h_alg{x.matrix * hhat * xinv, g, "H"};
  InnerProduct w = InnerProduct::weighted(parse_scalar_expression("1/x^2"));
  double r_alg = pseudo_hermiticity_residual(h_alg, w);

  ModelSpec m = paper_example(1.0);
  double r400 = pseudo_hermiticity_residual_restricted(assemble_grid(m.expr, g), w, 8);
  double r800 = pseudo_hermiticity_residual_restricted(
      assemble_grid(m.expr, make_grid(10.0, 800)), w, 8);
  double ratio = r400 / r800;
  bool ok = r_alg <= 1e-12 && ratio >= 3.2 && ratio <= 4.8;
  report(4, "metric relation exact (algebraic) and O(h^2) (stencil)", ok,
         fmt::format("algebraic {:.3g}; stencil {:.3g} -> {:.3g}, ratio {:.3g}",
                     r_alg, r400, r800, ratio));
}

// 5. Canonical commutator: small on smooth grid states; in a basis the only
//    deviation from iI is the exact truncation corner.
void criterion_5() {
  GridSpec g = make_grid(10.0, 400);
  TransformMap t = diagonal_map(parse_scalar_expression("1/x"), g);
  CanonicalPair cp = canonical_pair(t, g);
  double comm = commutator_residual(cp, 8);

  const int m = 6;
  TransformMap id;
  id.t = Eigen::MatrixXcd::Identity(m, m);
  id.inv = id.t;
  id.condition = 1.0;
  CanonicalPair cb = canonical_pair(id, BasisSpec{m, 1.0});
  Eigen::MatrixXcd dev = cb.xc.matrix * cb.pc.matrix - cb.pc.matrix * cb.xc.matrix -
                         cd(0.0, 1.0) * Eigen::MatrixXcd::Identity(m, m);
  dev(m - 1, m - 1) -= cd(0.0, -static_cast<double>(m));
  double corner = dev.cwiseAbs().maxCoeff();
  report(5, "canonical pair commutator", comm <= 1e-2 && corner <= 1e-12,
         fmt::format("grid residual {:.3g}, basis corner deviation {:.3g}", comm, corner));
}

// 6. Canonical form: exact for the algebraic route, O(h^2) on smooth interior
//    states for the stencil route.
void criterion_6() {
  OperatorExpr form = parse_expression("p^2 + x^2");
  GridSpec g = make_grid(10.0, 400);
  auto [x, p] = position_momentum_matrices(g);
  TransformMap t = diagonal_map(parse_scalar_expression("1/x"), g);
  CanonicalPair cp = canonical_pair(t, g);
  Eigen::MatrixXcd hhat = p.matrix * p.matrix + x.matrix * x.matrix;
  MatrixRep h_alg{t.inv * hhat * t.t, g, "H"};
  double r_alg = canonical_form_residual(h_alg, cp, form);

  ModelSpec m = paper_example(1.0);
  double r[2];
  int i = 0;
  for (int n : {400, 800}) {
    GridSpec gn = make_grid(10.0, n);
    MatrixRep h = assemble_grid(m.expr, gn);
    TransformMap tn = diagonal_map(parse_scalar_expression("1/x"), gn);
    CanonicalPair cn = canonical_pair(tn, gn);
    r[i++] = canonical_form_residual_restricted(h, cn, form);
  }
  double ratio = r[0] / r[1];
  bool ok = r_alg <= 1e-12 && ratio >= 3.2 && ratio <= 4.8;
  report(6, "operator reduces to the oscillator template", ok,
         fmt::format("algebraic {:.3g}; stencil {:.3g} -> {:.3g}, ratio {:.3g}",
                     r_alg, r[0], r[1], ratio));
}

// 7. The Hermiticity-table verdict pattern, through the CLI.
void criterion_7() {
  RunResult r = run_cli("verify --model paper-example --assembly algebraic");
  bool pattern = false;
  try {
    pattern = json::parse(r.out)["pattern_matched"].get<bool>();
  } catch (...) {
  }
  report(7, "Hermiticity table pattern via the CLI", r.exit_code == 0 && pattern,
         fmt::format("exit {}, pattern_matched {}", r.exit_code, pattern));
}

// 8. Anharmonic family: real spectra for nu >= 0, a complex pair at
//    nu = -0.5, and stability of the retained levels under basis doubling.
void criterion_8() {
  bool ok = true;
  std::string detail;
  for (double nu : {0.0, 0.5, 1.0}) {
    ModelSpec m = bender_family(nu);
    Spectrum s200 = spectrum_of(assemble_basis(m.expr, BasisSpec{200, 1.0}, 0));
    Spectrum s400 = spectrum_of(assemble_basis(m.expr, BasisSpec{400, 1.0}, 0));
    auto i200 = s200.physical_indices();
    auto i400 = s400.physical_indices();
    double move = 0.0;
    for (int k = 0; k < 6; ++k) {
      cd e = s200.eigenvalues[i200[k]];
      if (std::abs(e.imag()) > 1e-3 * std::abs(e.real())) ok = false;
      move = std::max(move, std::abs(e - s400.eigenvalues[i400[k]]));
      if (nu == 0.0 && std::abs(e - cd(2.0 * k + 1.0)) > 1e-6) ok = false;
    }
    if (move >= 1e-4) ok = false;
    detail += fmt::format("nu={} move {:.2g}; ", nu, move);
  }
  ModelSpec mneg = bender_family(-0.5);
  Spectrum sneg = spectrum_of(assemble_basis(mneg.expr, BasisSpec{200, 1.0}, 0));
  auto ineg = sneg.physical_indices();
  bool pair_found = false;
  for (int a = 0; a < 10; ++a)
    for (int b = a + 1; b < 10; ++b) {
      cd ea = sneg.eigenvalues[ineg[a]], eb = sneg.eigenvalues[ineg[b]];
      if (std::abs(ea.imag()) > 1e-2 && std::abs(ea - std::conj(eb)) <= 1e-6 * std::abs(ea))
        pair_found = true;
    }
  ok = ok && pair_found;
  report(8, "real-to-complex transition across the family", ok,
         detail + fmt::format("nu=-0.5 conjugate pair {}", pair_found ? "found" : "missing"));
}

// 9. Unitary evolution in the metric norm, oscillating flat norm.
void criterion_9() {
  RunResult r = run_cli("evolve --model paper-example --format json");
  double drift = 1e30, range = 0.0;
  bool complex_spectrum = true;
  try {
    json j = json::parse(r.out);
    drift = j["h_norm_relative_drift"].get<double>();
    range = j["l2_norm_relative_range"].get<double>();
    complex_spectrum = j["complex_spectrum"].get<bool>();
  } catch (...) {
  }
  bool ok = r.exit_code == 0 && !complex_spectrum && drift <= 1e-8 && range >= 1e-3;
  report(9, "metric norm conserved, flat norm oscillates", ok,
         fmt::format("exit {}, drift {:.3g}, range {:.3g}", r.exit_code, drift, range));
}

// 10. The eigenvector-matching map carries the operator onto the oscillator.
void criterion_10() {
  GridSpec g = make_grid(10.0, 400);
  ModelSpec m = paper_example(1.0);
  MatrixRep h = assemble_grid(m.expr, g);
  Spectrum sh = spectrum_of(h);
  Spectrum sho = spectrum_of(assemble_grid(parse_expression("p^2 + x^2"), g));
  TransformMap t = eigenmap_T(sh, sho, 8);
  Eigen::MatrixXcd mapped = t.t * h.matrix * t.inv;
  double hnorm = h.matrix.norm();
  auto ih = sh.physical_indices();
  auto iho = sho.physical_indices();
  double worst = 0.0;
  for (int n = 0; n < 8; ++n) {
    Eigen::VectorXcd psi = sho.right_vectors.col(iho[n]);
    worst = std::max(worst,
                     (mapped * psi - sh.eigenvalues[ih[n]] * psi).norm() / hnorm);
  }
  report(10, "mapped operator acts diagonally on oscillator modes", worst <= 1e-6,
         fmt::format("worst relative action residual {:.3g}", worst));
}

// 11. Every CLI command is byte-deterministic under a fixed configuration.
void criterion_11() {
  std::string cfg_path = "/tmp/acceptance_config.ini";
  {
    std::ofstream cfg(cfg_path);
    cfg << "[model]\nname = paper-example\n\n[representation]\ngrid = 10:150\n\n"
           "[task]\ncount = 5\n";
  }
  std::vector<std::string> cmds = {
      "spectrum --config " + cfg_path,
      "verify --config " + cfg_path + " --assembly algebraic",
      "sweep --nu 0:0.5:0.5 --basis 32 --count 3",
      "evolve --model harmonic --basis 16 --tmax 1 --steps 10 --metric flat",
  };
  bool ok = true;
  for (const auto& c : cmds) {
    RunResult a = run_cli(c);
    RunResult b = run_cli(c);
    if (a.out.empty() || a.out != b.out || a.exit_code != b.exit_code) ok = false;
  }
  std::remove(cfg_path.c_str());
  report(11, "CLI output is byte-identical across reruns", ok,
         fmt::format("{} command pairs compared", cmds.size()));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    fmt::print(stderr, "usage: acceptance <path-to-cli>\n");
    return 64;
  }
  g_cli = argv[1];
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  fmt::print("{}\n", g_failures == 0 ? "all criteria passed" : "some criteria FAILED");
  return g_failures;
}
