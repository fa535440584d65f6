// Command-line surface: spectrum / verify / sweep / evolve.
#include <complex>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "nhqm/canonical.hpp"
#include "nhqm/errors.hpp"
#include "nhqm/evolution.hpp"
#include "nhqm/models.hpp"

using json = nlohmann::ordered_json;
using namespace nhqm;

namespace {

constexpr int kSchemaVersion = 1;

// ---------- output formatting ----------

int g_precision = 12;

double rounded(double v) {
  if (!std::isfinite(v)) return v;
  return std::stod(fmt::format("{:.{}g}", v, g_precision));
}

std::string num_str(double v) { return fmt::format("{:.{}g}", v, g_precision); }

// ---------- config file ----------

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line, section;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line is not key = value: " + line);
    auto strip = [](std::string s) {
      auto a = s.find_first_not_of(" \t");
      auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = strip(line.substr(0, eq));
    std::string value = strip(line.substr(eq + 1));
    kv[section.empty() ? key : section + "." + key] = value;
  }
  return kv;
}

// ---------- shared options ----------

struct CommonOpts {
  std::string model;
  std::string expr;
  double omega = 1.0;
  std::string grid;   // "L:N"
  std::string basis;  // "M" or "M:Q"
  int count = 8;
  std::string format;  // json|csv
  std::string output;
  int precision = 12;
};

void add_common(CLI::App* cmd, CommonOpts& o, const std::map<std::string, std::string>& cfg) {
  auto get = [&](const char* key) -> std::optional<std::string> {
    auto it = cfg.find(key);
    if (it == cfg.end()) return std::nullopt;
    return it->second;
  };
  if (auto v = get("model.name")) o.model = *v;
  if (auto v = get("model.expr")) o.expr = *v;
  if (auto v = get("model.omega")) o.omega = std::stod(*v);
  if (auto v = get("representation.grid")) o.grid = *v;
  if (auto v = get("representation.basis")) o.basis = *v;
  if (auto v = get("task.count")) o.count = std::stoi(*v);
  if (auto v = get("output.format")) o.format = *v;
  if (auto v = get("output.path")) o.output = *v;
  if (auto v = get("output.precision")) o.precision = std::stoi(*v);

  cmd->add_option("--model", o.model, "built-in model: paper-example | harmonic | bender");
  cmd->add_option("--expr", o.expr, "operator expression, e.g. \"p^2 + x^2\"");
  cmd->add_option("--omega", o.omega, "oscillator frequency");
  cmd->add_option("--grid", o.grid, "grid representation L:N");
  cmd->add_option("--basis", o.basis, "basis representation M or M:Q");
  cmd->add_option("--count", o.count, "number of eigenvalues to report");
  cmd->add_option("--format", o.format, "output format json|csv");
  cmd->add_option("--output", o.output, "output path (default stdout)");
  cmd->add_option("--precision", o.precision, "significant digits in output");
}

std::pair<double, int> parse_grid_arg(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("--grid expects L:N");
  return {std::stod(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
}

std::pair<int, int> parse_basis_arg(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) return {std::stoi(s), 0};
  return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
}

struct Problem {
  ModelSpec model;
  Representation rep;
  int quadrature = 0;
};

Problem build_problem(const CommonOpts& o, double nu) {
  if (!o.model.empty() && !o.expr.empty())
    throw std::invalid_argument("give either --model or --expr, not both");
  Problem p;
  if (o.model == "paper-example") {
    p.model = paper_example(o.omega);
  } else if (o.model == "harmonic") {
    p.model = harmonic_oscillator(o.omega);
  } else if (o.model == "bender") {
    p.model = bender_family(nu);
  } else if (o.model.empty() && !o.expr.empty()) {
    p.model.name = "expr";
    p.model.expr = parse_expression(o.expr);
    p.model.recommended_rep = make_grid(10.0, 400);
    p.model.omega = o.omega;
  } else {
    throw std::invalid_argument(o.model.empty() ? "no model or expression given"
                                                : "unknown model: " + o.model);
  }
  if (!o.grid.empty() && !o.basis.empty())
    throw std::invalid_argument("give either --grid or --basis, not both");
  if (!o.grid.empty()) {
    auto [l, n] = parse_grid_arg(o.grid);
    p.rep = make_grid(l, n);
  } else if (!o.basis.empty()) {
    auto [m, q] = parse_basis_arg(o.basis);
    if (m < 1) throw std::invalid_argument("basis size must be positive");
    p.rep = BasisSpec{m, p.model.omega > 0 ? p.model.omega : 1.0};
    p.quadrature = q;
  } else {
    p.rep = p.model.recommended_rep;
  }
  return p;
}

MatrixRep assemble(const Problem& p) {
  if (is_grid(p.rep)) return assemble_grid(p.model.expr, std::get<GridSpec>(p.rep));
  return assemble_basis(p.model.expr, std::get<BasisSpec>(p.rep), p.quadrature);
}

json rep_json(const Problem& p) {
  json j;
  if (is_grid(p.rep)) {
    const auto& g = std::get<GridSpec>(p.rep);
    j["kind"] = "grid";
    j["L"] = rounded(g.half_points * g.spacing);
    j["N"] = g.half_points;
  } else {
    const auto& b = std::get<BasisSpec>(p.rep);
    j["kind"] = "basis";
    j["M"] = b.size;
    j["Q"] = p.quadrature > 0 ? p.quadrature : 2 * b.size;
    j["omega"] = rounded(b.frequency);
  }
  return j;
}

json model_json(const Problem& p) {
  json j;
  j["name"] = p.model.name;
  for (const auto& [k, v] : p.model.parameters) j[k] = rounded(v);
  return j;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << text;
}

// ---------- commands ----------

int cmd_spectrum(const CommonOpts& o, double nu) {
  Problem p = build_problem(o, nu);
  MatrixRep h = assemble(p);
  Spectrum s = spectrum_of(h);

  auto idx = s.physical_indices();
  int count = std::min<int>(o.count, static_cast<int>(idx.size()));
  json eigs = json::array();
  int n_real = 0, n_complex = 0;
  for (int k = 0; k < count; ++k) {
    std::complex<double> e = s.eigenvalues[idx[k]];
    bool real = eigenvalue_is_real(e);
    (real ? n_real : n_complex)++;
    eigs.push_back({{"re", rounded(e.real())},
                    {"im", rounded(e.imag())},
                    {"real_flag", real},
                    {"residual", rounded(s.residuals[idx[k]])}});
  }
  json out;
  out["schema"] = kSchemaVersion;
  out["model"] = model_json(p);
  out["representation"] = rep_json(p);
  out["eigenvalues"] = eigs;
  out["basis_condition"] = rounded(s.basis_condition);
  out["ill_conditioned"] = s.ill_conditioned;
  out["realness_summary"] = {{"count_real", n_real}, {"count_complex", n_complex}};
  emit(out.dump(2) + "\n", o.output);
  return 0;
}

struct VerifyOpts {
  std::string transform;
  std::string assembly = "stencil";
};

int cmd_verify(const CommonOpts& o, const VerifyOpts& v, double nu) {
  Problem p = build_problem(o, nu);
  std::string transform_text = !v.transform.empty() ? v.transform : p.model.transform_text;
  if (transform_text.empty())
    throw std::invalid_argument("verify needs a transform (--transform or a built-in model with one)");
  if (v.assembly != "stencil" && v.assembly != "algebraic")
    throw std::invalid_argument("--assembly must be stencil or algebraic");

  ScalarExpr t_expr = parse_scalar_expression(transform_text);
  TransformMap t;
  if (is_grid(p.rep)) {
    t = diagonal_map(t_expr, std::get<GridSpec>(p.rep));
  } else {
    if (contains_symbol(t_expr, 'x'))
      throw std::invalid_argument("x-dependent transforms need a grid representation");
    std::complex<double> c = eval(t_expr, 0.0);
    int n = rep_size(p.rep);
    t.t = c * Eigen::MatrixXcd::Identity(n, n);
    t.inv = (1.0 / c) * Eigen::MatrixXcd::Identity(n, n);
    t.condition = 1.0;
  }

  auto [x, pmat] = position_momentum_matrices(p.rep);
  const double w2 = p.model.omega * p.model.omega;

  MatrixRep h, hhat;
  if (v.assembly == "algebraic") {
    // Exact matrix products: Hhat = P^2 + w^2 X^2, H = T^-1 Hhat T.
    hhat = MatrixRep{pmat.matrix * pmat.matrix + w2 * x.matrix * x.matrix, p.rep, "Hhat"};
    h = similarity_transform(hhat, t);
    h.provenance = "H";
  } else {
    h = assemble(p);
    TransformMap t_swapped{t.inv, t.t, t.condition};
    hhat = similarity_transform(h, t_swapped);  // Hhat = T H T^-1
    hhat.provenance = "Hhat";
  }

  const double threshold = v.assembly == "algebraic" ? 1e-8 : 1e-3;
  CanonicalPair pair = canonical_pair(t, p.rep, threshold);

  InnerProduct ip_flat = InnerProduct::flat();
  Eigen::MatrixXcd g_flat = gram_matrix(ip_flat, p.rep);
  Eigen::MatrixXcd eta = t.t.adjoint() * g_flat * t.t;
  eta = 0.5 * (eta + eta.adjoint()).eval();
  InnerProduct ip_h = InnerProduct::with_metric(eta);

  HermiticityReport table =
      hermiticity_table(h, pair.xc, pair.pc, hhat, x, pmat, ip_flat, ip_h, threshold);

  double comm = commutator_residual(pair, std::min(o.count, rep_size(p.rep) / 2));

  std::optional<double> form_residual, form_residual_smooth;
  if (p.model.oscillator_spectrum) {
    OperatorExpr form =
        parse_expression(fmt::format("p^2 + {}*x^2", w2));
    form_residual = canonical_form_residual(h, pair, form);
    if (is_grid(p.rep))
      form_residual_smooth = canonical_form_residual_restricted(h, pair, form, 8);
  }

  double pseudo = pseudo_hermiticity_residual(h, ip_h);
  std::optional<double> pseudo_smooth;
  if (is_grid(p.rep)) pseudo_smooth = pseudo_hermiticity_residual_restricted(h, ip_h, 8);

  // The squared first-difference inside the algebraic route decouples the
  // odd/even sublattices and produces degenerate pairs whose eigenvectors are
  // arbitrary mixtures, so the Gram diagnostic always uses the direct
  // discretization of the operator expression.
  Spectrum s = spectrum_of(v.assembly == "algebraic" ? assemble(p) : h);
  double defect = orthonormality_defect(
      s, ip_h, p.rep, std::min<int>(o.count, static_cast<int>(s.physical_indices().size())));

  // Expected verdict pattern. A transform with metric proportional to the
  // flat one leaves every operator Hermitian in both products; otherwise the
  // enforced cells follow the worked example: H non-Hermitian in L2 but
  // Hermitian in the metric product, the reverse for Hhat, x and p Hermitian
  // in L2, the canonical pair Hermitian in the metric product.
  bool metric_is_flat =
      (eta - (eta.trace() / static_cast<double>(eta.rows())) *
                 Eigen::MatrixXcd::Identity(eta.rows(), eta.cols()))
          .cwiseAbs()
          .maxCoeff() <= 1e-10 * eta.cwiseAbs().maxCoeff();
  auto row = [&](const char* label) -> const HermiticityRow& {
    for (const auto& r : table.rows)
      if (r.label == label) return r;
    throw std::logic_error("missing table row");
  };
  bool pattern;
  if (metric_is_flat) {
    pattern = true;
    for (const auto& r : table.rows) pattern = pattern && r.hermitian_l2 && r.hermitian_h;
  } else {
    pattern = !row("H").hermitian_l2 && row("H").hermitian_h && row("Hhat").hermitian_l2 &&
              !row("Hhat").hermitian_h && row("x").hermitian_l2 && row("p").hermitian_l2 &&
              row("x^c").hermitian_h && row("p^c").hermitian_h;
  }

  json out;
  out["schema"] = kSchemaVersion;
  out["model"] = model_json(p);
  out["representation"] = rep_json(p);
  out["assembly"] = v.assembly;
  out["transform"] = transform_text;
  out["threshold"] = rounded(threshold);
  json rows = json::array();
  for (const auto& r : table.rows)
    rows.push_back({{"operator", r.label},
                    {"residual_L2", rounded(r.residual_l2)},
                    {"residual_H", rounded(r.residual_h)},
                    {"hermitian_L2", r.hermitian_l2},
                    {"hermitian_H", r.hermitian_h}});
  out["table1"] = rows;
  out["commutator_residual"] = rounded(comm);
  if (form_residual)
    out["canonical_form_residual"] = rounded(*form_residual);
  else
    out["canonical_form_residual"] = nullptr;
  if (form_residual_smooth)
    out["canonical_form_residual_smooth"] = rounded(*form_residual_smooth);
  out["pseudo_hermiticity_residual"] = rounded(pseudo);
  if (pseudo_smooth)
    out["pseudo_hermiticity_residual_smooth"] = rounded(*pseudo_smooth);
  out["orthonormality_defect"] = rounded(defect);
  out["pattern_matched"] = pattern;
  emit(out.dump(2) + "\n", o.output);
  return pattern ? 0 : 4;
}

struct SweepOpts {
  std::string nu_range;  // a:b:step
};

int cmd_sweep(const CommonOpts& o, const SweepOpts& so) {
  if (so.nu_range.empty()) throw std::invalid_argument("sweep needs --nu a:b:step");
  auto c1 = so.nu_range.find(':');
  auto c2 = c1 == std::string::npos ? std::string::npos : so.nu_range.find(':', c1 + 1);
  if (c2 == std::string::npos) throw std::invalid_argument("--nu expects a:b:step");
  double lo = std::stod(so.nu_range.substr(0, c1));
  double hi = std::stod(so.nu_range.substr(c1 + 1, c2 - c1 - 1));
  double step = std::stod(so.nu_range.substr(c2 + 1));
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument("malformed sweep range");

  std::vector<double> nus;
  for (int i = 0;; ++i) {
    double nu = lo + i * step;
    if (nu > hi + 1e-12) break;
    nus.push_back(nu);
    if (lo == hi) break;
  }

  CommonOpts opts = o;
  if (opts.model.empty() && opts.expr.empty()) opts.model = "bender";

  auto eval_point = [&](double nu) {
    Problem p = build_problem(opts, nu);
    Spectrum s = spectrum_of(assemble(p));
    auto idx = s.physical_indices();
    int count = std::min<int>(opts.count, static_cast<int>(idx.size()));
    std::vector<std::complex<double>> eigs(count);
    for (int k = 0; k < count; ++k) eigs[k] = s.eigenvalues[idx[k]];
    return eigs;
  };

  std::vector<std::future<std::vector<std::complex<double>>>> futures;
  futures.reserve(nus.size());
  for (double nu : nus)
    futures.push_back(std::async(std::launch::async, eval_point, nu));

  std::string csv = "nu,index,re,im,real_flag\n";
  for (std::size_t i = 0; i < nus.size(); ++i) {
    auto eigs = futures[i].get();
    for (std::size_t k = 0; k < eigs.size(); ++k)
      csv += fmt::format("{},{},{},{},{}\n", num_str(nus[i]), k, num_str(eigs[k].real()),
                         num_str(eigs[k].imag()), eigenvalue_is_real(eigs[k]) ? "true" : "false");
  }
  emit(csv, o.output);
  return 0;
}

struct EvolveOpts {
  double tmax = 10.0;
  int steps = 200;
  std::string metric = "auto";
};

int cmd_evolve(const CommonOpts& o, const EvolveOpts& eo, double nu) {
  if (!(eo.tmax > 0.0) || eo.steps < 1) throw std::invalid_argument("need tmax > 0 and steps >= 1");
  Problem p = build_problem(o, nu);
  MatrixRep h = assemble(p);
  Spectrum s = spectrum_of(h);

  InnerProduct ip;
  if (eo.metric == "auto")
    ip = metric_from_spectrum(s);
  else if (eo.metric == "flat")
    ip = InnerProduct::flat();
  else
    ip = InnerProduct::weighted(parse_scalar_expression(eo.metric));

  Eigen::VectorXcd psi0 = two_mode_initial_state(s);
  Eigen::VectorXd times(eo.steps + 1);
  for (int i = 0; i <= eo.steps; ++i) times[i] = eo.tmax * i / eo.steps;

  EvolutionResult r = spectral_propagate(s, psi0, times, ip, p.rep);

  double h_drift = r.h_norms.maxCoeff() / r.h_norms.minCoeff() - 1.0;
  double l2_range = r.l2_norms.maxCoeff() / r.l2_norms.minCoeff() - 1.0;

  std::string csv = "t,l2_norm,h_norm\n";
  for (int i = 0; i < times.size(); ++i)
    csv += fmt::format("{},{},{}\n", num_str(times[i]), num_str(r.l2_norms[i]),
                       num_str(r.h_norms[i]));

  json summary;
  summary["schema"] = kSchemaVersion;
  summary["model"] = model_json(p);
  summary["representation"] = rep_json(p);
  summary["metric"] = eo.metric;
  summary["h_norm_relative_drift"] = rounded(h_drift);
  summary["l2_norm_relative_range"] = rounded(l2_range);
  summary["complex_spectrum"] = r.complex_spectrum;
  summary["discarded_fraction"] = rounded(r.discarded_fraction);

  if (o.format == "json") {
    emit(summary.dump(2) + "\n", o.output);
  } else if (!o.output.empty()) {
    emit(csv, o.output);
    std::cout << summary.dump(2) << "\n";
  } else {
    std::cout << csv;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hilbert-space toolkit for non-Hermitian Hamiltonians with real spectra"};
  app.require_subcommand(1);

  // The config file seeds option defaults; command-line flags win.
  std::map<std::string, std::string> cfg;
  std::string config_path;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--config" && i + 1 < argc)
      config_path = argv[i + 1];
    else if (a.rfind("--config=", 0) == 0)
      config_path = a.substr(9);
  }
  try {
    if (!config_path.empty()) cfg = read_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  CommonOpts common;
  VerifyOpts verify_opts;
  SweepOpts sweep_opts;
  EvolveOpts evolve_opts;
  double nu = 0.0;
  std::string nu_text;
  if (auto it = cfg.find("model.nu"); it != cfg.end()) nu_text = it->second;
  if (auto it = cfg.find("task.transform"); it != cfg.end()) verify_opts.transform = it->second;
  if (auto it = cfg.find("task.assembly"); it != cfg.end()) verify_opts.assembly = it->second;
  if (auto it = cfg.find("task.tmax"); it != cfg.end()) evolve_opts.tmax = std::stod(it->second);
  if (auto it = cfg.find("task.steps"); it != cfg.end()) evolve_opts.steps = std::stoi(it->second);
  if (auto it = cfg.find("task.metric"); it != cfg.end()) evolve_opts.metric = it->second;

  auto* spectrum_cmd = app.add_subcommand("spectrum", "eigenvalues and realness summary");
  add_common(spectrum_cmd, common, cfg);
  spectrum_cmd->add_option("--nu", nu_text, "Bender exponent");
  spectrum_cmd->add_option("--config", config_path, "config file (key = value sections)");

  auto* verify_cmd = app.add_subcommand("verify", "Hermiticity table and canonical-pair checks");
  add_common(verify_cmd, common, cfg);
  verify_cmd->add_option("--nu", nu_text, "Bender exponent");
  verify_cmd->add_option("--transform", verify_opts.transform, "diagonal transform expression");
  verify_cmd->add_option("--assembly", verify_opts.assembly, "stencil | algebraic");
  verify_cmd->add_option("--config", config_path, "config file");

  auto* sweep_cmd = app.add_subcommand("sweep", "eigenvalues across a nu range");
  add_common(sweep_cmd, common, cfg);
  sweep_cmd->add_option("--nu", sweep_opts.nu_range, "range a:b:step");
  sweep_cmd->add_option("--config", config_path, "config file");
  if (auto it = cfg.find("task.nu"); it != cfg.end()) sweep_opts.nu_range = it->second;

  auto* evolve_cmd = app.add_subcommand("evolve", "time evolution with norm tracking");
  add_common(evolve_cmd, common, cfg);
  evolve_cmd->add_option("--nu", nu_text, "Bender exponent");
  evolve_cmd->add_option("--tmax", evolve_opts.tmax, "final time");
  evolve_cmd->add_option("--steps", evolve_opts.steps, "number of time steps");
  evolve_cmd->add_option("--metric", evolve_opts.metric, "auto | flat | weight expression");
  evolve_cmd->add_option("--config", config_path, "config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!nu_text.empty()) nu = std::stod(nu_text);
    g_precision = std::clamp(common.precision, 1, 17);
    if (spectrum_cmd->parsed()) return cmd_spectrum(common, nu);
    if (verify_cmd->parsed()) return cmd_verify(common, verify_opts, nu);
    if (sweep_cmd->parsed()) return cmd_sweep(common, sweep_opts);
    if (evolve_cmd->parsed()) return cmd_evolve(common, evolve_opts, nu);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error at position " << e.position() << ": " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedInBasisError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
