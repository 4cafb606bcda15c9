#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dnls/analysis.hpp"

using namespace dnls;
using cd = std::complex<double>;

namespace {

Eigen::ArrayXcd gaussian(const Eigen::ArrayXd& x, double amp, double center, double width,
                         double k0 = 0.0) {
  Eigen::ArrayXcd u(x.size());
  const Eigen::ArrayXd env = amp * (-(x - center).square() / (2.0 * width * width)).exp();
  u.real() = env * (k0 * x).cos();
  u.imag() = env * (k0 * x).sin();
  return u;
}

}  // namespace

TEST_CASE("fit recovers a synthetic exact decay law") {
  const double eps = 0.3, p = 0.25, C = 3.0;
  std::vector<double> t, norms;
  for (int i = 0; i < 200; ++i) {
    const double ti = std::pow(10.0, 0.02 * i);  // 1 .. 1e4 roughly
    t.push_back(ti);
    norms.push_back(C * std::pow(1.0 + eps * eps * std::log(ti), -p));
  }
  const auto fit = analysis::fit_log_decay(t, norms, eps, 2.0, 1e4);
  CHECK(fit.p == doctest::Approx(p).epsilon(1e-12));
  CHECK(fit.amplitude == doctest::Approx(C).epsilon(1e-12));
  CHECK(fit.residual_rms < 1e-12);
}

TEST_CASE("fit input validation") {
  std::vector<double> t = {1.0, 2.0, 3.0}, n = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(analysis::fit_log_decay(t, n, 0.3, 1.0, 3.0), std::invalid_argument);
  std::vector<double> t2, n2;
  for (int i = 0; i < 20; ++i) {
    t2.push_back(i + 1.0);
    n2.push_back(i == 5 ? -1.0 : 1.0);  // nonpositive norm
  }
  CHECK_THROWS_AS(analysis::fit_log_decay(t2, n2, 0.3, 1.0, 20.0), std::invalid_argument);
}

TEST_CASE("remainder diagnostics structure") {
  Grid1D g;
  g.M = 512;
  Simulator sim(catalog("two_component_lnss"), g);
  const Eigen::ArrayXd x = g.x();

  SUBCASE("second component zero kills rho via R-symmetry") {
    SimState s = sim.initial_state({gaussian(x, 0.2, 0.0, 1.0), Eigen::ArrayXcd::Zero(g.M)});
    s.t = 2.0;
    const auto d = analysis::remainder_diagnostics(sim, s);
    // u2 = 0: R1 couples only to |u2|^2 -> 0, and rho_2-part vanishes with alpha2
    CHECK(d.R1.abs().maxCoeff() < 1e-14);
    CHECK(d.rho.abs().maxCoeff() < 1e-14);
  }

  SUBCASE("identical components give antisymmetric-zero rho") {
    const Eigen::ArrayXcd phi = gaussian(x, 0.2, 0.0, 1.0);
    SimState s = sim.initial_state({phi, phi});
    s.t = 3.0;
    const auto d = analysis::remainder_diagnostics(sim, s);
    CHECK((d.R1 - d.R2).abs().maxCoeff() < 1e-13);
    CHECK(d.rho.abs().maxCoeff() < 1e-13);
  }

  SUBCASE("requires t >= 1 and two components") {
    SimState s = sim.initial_state({gaussian(x, 0.2, 0.0, 1.0), gaussian(x, 0.1, 1.0, 1.0)});
    s.t = 0.5;
    CHECK_THROWS_AS(analysis::remainder_diagnostics(sim, s), std::invalid_argument);
  }
}

TEST_CASE("m estimators on a short two-component run") {
  Grid1D g;
  g.M = 512;
  g.L = 30.0;
  Simulator sim(catalog("two_component_lnss"), g);
  const Eigen::ArrayXd x = g.x();
  const double eps = 0.2;
  const Eigen::ArrayXcd psi1 = gaussian(x, 1.0, 0.0, 1.0, 1.0);
  const Eigen::ArrayXcd psi2 = gaussian(x, 1.0, 0.0, 1.0, -1.0);

  SolverConfig cfg;
  cfg.t_end = 40.0;
  cfg.output_times = log_schedule(1.0, 40.0, 25);
  cfg.output_times.push_back(2.0);
  std::sort(cfg.output_times.begin(), cfg.output_times.end());

  SimState s0 = sim.initial_state({(eps * psi1).eval(), (eps * psi2).eval()});
  const auto res = sim.run(s0, cfg, nullptr, true);
  const auto est = analysis::estimate_m(sim, res.snapshots);

  CHECK(est.T == doctest::Approx(40.0));
  // xi ascending
  for (Eigen::Index k = 1; k < est.xi.size(); ++k) CHECK(est.xi[k] > est.xi[k - 1]);

  // the two estimators agree where the prediction is significant
  const double scale = est.m_large_T.abs().maxCoeff();
  REQUIRE(scale > 0.0);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < est.xi.size(); ++k)
    if (std::abs(est.m_large_T[k]) > 0.1 * scale)
      worst = std::max(worst,
                       std::abs(est.m_prop42[k] - est.m_large_T[k]) / std::abs(est.m_large_T[k]));
  CHECK(worst < 0.10);

  // Plancherel consistency with the conservation-law difference:
  // integral m_hat dxi = ||u1(T)||^2 - ||u2(T)||^2
  const double integral = est.m_large_T.sum() * g.dxi();
  const auto& fin = res.norms.back();
  CHECK(integral ==
        doctest::Approx(fin.l2[0] * fin.l2[0] - fin.l2[1] * fin.l2[1]).epsilon(1e-6));

  // antisymmetry under swapping components and data
  SimState s0s = sim.initial_state({(eps * psi2).eval(), (eps * psi1).eval()});
  const auto ress = sim.run(s0s, cfg, nullptr, true);
  const auto ests = analysis::estimate_m(sim, ress.snapshots);
  CHECK((ests.m_large_T + est.m_large_T).abs().maxCoeff() < 1e-12);
}

TEST_CASE("estimate_m requires the t = 2 anchor") {
  Grid1D g;
  g.M = 256;
  Simulator sim(catalog("two_component_lnss"), g);
  SimState s = sim.initial_state(
      {gaussian(g.x(), 0.1, 0.0, 1.0), gaussian(g.x(), 0.1, 0.0, 2.0)});
  SolverConfig cfg;
  cfg.t_end = 5.0;
  cfg.output_times = {1.0, 3.0, 5.0};
  const auto res = sim.run(s, cfg, nullptr, true);
  CHECK_THROWS_AS(analysis::estimate_m(sim, res.snapshots), std::invalid_argument);
}

TEST_CASE("decoupling metric") {
  SimState s;
  s.alpha.resize(2);
  s.alpha[0] = Eigen::ArrayXcd::Zero(8);
  s.alpha[1] = Eigen::ArrayXcd::Zero(8);
  s.alpha[0][2] = cd(3.0, 0.0);
  s.alpha[1][5] = cd(0.0, 2.0);
  // disjoint supports: product vanishes
  CHECK(analysis::decoupling_metric(s) == 0.0);
  s.alpha[1][2] = cd(0.0, 0.5);
  CHECK(analysis::decoupling_metric(s) == doctest::Approx(1.5));
}

TEST_CASE("scattering state copies the final snapshot") {
  SimState a, b;
  a.t = 1.0;
  b.t = 10.0;
  a.alpha = {Eigen::ArrayXcd::Ones(4)};
  b.alpha = {(2.0 * Eigen::ArrayXcd::Ones(4)).eval()};
  const auto sc = analysis::extract_scattering_state({a, b});
  CHECK(sc.T == 10.0);
  CHECK(sc.phi_plus_hat[0][0] == cd(2.0, 0.0));
}

TEST_CASE("free-flow profile reconstruction") {
  // stationary-phase regime needs xi = x/t inside the grid band: large L
  Grid1D g;
  g.L = 4000.0;
  g.M = 16384;
  CubicNonlinearity zero(1, {1.0}, {});
  Simulator sim(zero, g);
  SimState s = sim.initial_state({gaussian(g.x(), 0.5, 0.0, 1.0)});

  SUBCASE("error is small by t = 1e3 and does not grow when t doubles") {
    // free flow: alpha is t-independent; stay below the wraparound time ~ L/3
    s.t = 500.0;
    const auto err1 = analysis::profile_reconstruction_error(sim, s);
    s.t = 1000.0;
    const auto err2 = analysis::profile_reconstruction_error(sim, s);
    CHECK(err2.window_fraction > 0.5);
    CHECK(err2.linf_error[0] < 1e-2);
    CHECK(err2.linf_error[0] <= err1.linf_error[0] * 1.05);
  }

  SUBCASE("zero field reconstructs exactly") {
    SimState z;
    z.t = 100.0;
    z.alpha = {Eigen::ArrayXcd::Zero(g.M)};
    const auto err = analysis::profile_reconstruction_error(sim, z);
    CHECK(err.linf_error[0] == 0.0);
  }
}

TEST_CASE("epsilon expansion ratios on a tiny setup") {
  Grid1D g;
  g.L = 30.0;
  g.M = 512;
  const Eigen::ArrayXd x = g.x();
  std::vector<Eigen::ArrayXcd> psi = {gaussian(x, 1.0, 0.0, 1.0, 1.0),
                                      gaussian(x, 1.0, 0.0, 1.5, -1.0)};
  SolverConfig cfg;
  cfg.t_end = 30.0;
  const auto rep = analysis::verify_epsilon_expansion(catalog("two_component_lnss"), psi,
                                                      {0.2, 0.1}, g, cfg);
  REQUIRE(rep.r.size() == 2);
  REQUIRE(rep.ratios.size() == 1);
  CHECK(rep.r[0] > rep.r[1]);           // remainder shrinks with eps
  CHECK(rep.ratios[0] > 4.0);           // beyond-quadratic scaling
  CHECK(rep.t_end == doctest::Approx(30.0));
}
