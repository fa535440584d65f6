#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nhqm/evolution.hpp"
#include "nhqm/models.hpp"

using namespace nhqm;
using cd = std::complex<double>;

namespace {

Eigen::VectorXd linspace(double a, double b, int n) {
  Eigen::VectorXd t(n);
  for (int k = 0; k < n; ++k) t[k] = a + (b - a) * k / (n - 1);
  return t;
}

}  // namespace

TEST_CASE("Hermitian evolution conserves the flat norm") {
  Eigen::MatrixXcd a(3, 3);
  a << 2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0;
  Spectrum s = eig_dense(a);
  Eigen::VectorXcd psi0(3);
  psi0 << 1.0, cd(0.0, 1.0), 0.5;
  psi0.normalize();
  EvolutionResult r = spectral_propagate(s, psi0, linspace(0.0, 5.0, 21),
                                         InnerProduct::flat(), BasisSpec{3, 1.0});
  CHECK(!r.complex_spectrum);
  CHECK(r.discarded_fraction <= 1e-12);
  for (int k = 0; k < 21; ++k) CHECK(r.l2_norms[k] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("t = 0 reconstructs the initial state") {
  Eigen::MatrixXcd a(2, 2);
  a << 1.0, 1.0, 0.0, 2.0;
  Spectrum s = eig_dense(a);
  Eigen::VectorXcd psi0(2);
  psi0 << 0.6, 0.8;
  EvolutionResult r = spectral_propagate(s, psi0, linspace(0.0, 1.0, 2),
                                         InnerProduct::flat(), BasisSpec{2, 1.0});
  CHECK((r.states.col(0) - psi0).norm() <= 1e-12);
}

TEST_CASE("propagation composes in time") {
  Eigen::MatrixXcd a(2, 2);
  a << 1.0, 1.0, 0.0, 2.0;
  Spectrum s = eig_dense(a);
  Eigen::VectorXcd psi0(2);
  psi0 << 0.6, 0.8;
  Eigen::VectorXd t1(1), t2(1), t3(1);
  t1 << 0.7;
  t2 << 0.4;
  t3 << 1.1;
  InnerProduct ip = InnerProduct::flat();
  BasisSpec rep{2, 1.0};
  EvolutionResult a1 = spectral_propagate(s, psi0, t1, ip, rep);
  EvolutionResult a2 = spectral_propagate(s, a1.states.col(0), t2, ip, rep);
  EvolutionResult whole = spectral_propagate(s, psi0, t3, ip, rep);
  CHECK((a2.states.col(0) - whole.states.col(0)).norm() <= 1e-10);
}

TEST_CASE("mixed-term model: metric norm constant, flat norm oscillates") {
  ModelSpec m = paper_example(1.0);
  GridSpec g = make_grid(10.0, 400);
  Spectrum s = spectrum_of(assemble_grid(m.expr, g));
  InnerProduct ip = metric_from_spectrum(s);
  Eigen::VectorXcd psi0 = two_mode_initial_state(s);
  EvolutionResult r = spectral_propagate(s, psi0, linspace(0.0, 6.0, 61), ip, g);
  CHECK(!r.complex_spectrum);
  CHECK(r.discarded_fraction <= 1e-8);
  double h0 = r.h_norms[0];
  double drift = 0.0, l2_min = 1e30, l2_max = 0.0;
  for (int k = 0; k < 61; ++k) {
    drift = std::max(drift, std::abs(r.h_norms[k] - h0) / h0);
    l2_min = std::min(l2_min, r.l2_norms[k]);
    l2_max = std::max(l2_max, r.l2_norms[k]);
  }
  CHECK(drift <= 1e-8);
  CHECK((l2_max - l2_min) / l2_min >= 1e-3);
}

TEST_CASE("a non-real spectrum is reported") {
  ModelSpec m = bender_family(-0.5);
  Spectrum s = spectrum_of(assemble_basis(m.expr, BasisSpec{64, 1.0}, 128));
  Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(64);
  psi0[0] = 1.0;
  EvolutionResult r = spectral_propagate(s, psi0, linspace(0.0, 1.0, 5),
                                         InnerProduct::flat(), BasisSpec{64, 1.0});
  CHECK(r.complex_spectrum);
}

TEST_CASE("input validation") {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(2, 2);
  Spectrum s = eig_dense(a);
  Eigen::VectorXcd psi0(2);
  psi0 << 1.0, 0.0;
  InnerProduct ip = InnerProduct::flat();
  BasisSpec rep{2, 1.0};
  // empty time vector
  CHECK_THROWS_AS(spectral_propagate(s, psi0, Eigen::VectorXd(), ip, rep),
                  std::invalid_argument);
  // dimension mismatch
  Eigen::VectorXcd bad(3);
  bad << 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(spectral_propagate(s, bad, linspace(0.0, 1.0, 2), ip, rep),
                  std::invalid_argument);
  // zero initial state
  CHECK_THROWS_AS(spectral_propagate(s, Eigen::VectorXcd::Zero(2), linspace(0.0, 1.0, 2),
                                     ip, rep),
                  std::invalid_argument);
}
