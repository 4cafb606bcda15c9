#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dnls/analysis.hpp"
#include "dnls/classify.hpp"
#include "dnls/experiment.hpp"
#include "dnls/io.hpp"
#include "dnls/profile.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error(path + ": cannot open");
  return json::parse(is);
}

// Accepts a catalog name, an inline JSON string, or a path to a JSON file.
json nonlinearity_arg(const std::string& arg) {
  for (const auto& name : dnls::catalog_names())
    if (name == arg) return json(arg);
  if (!arg.empty() && arg.front() == '{') return json::parse(arg);
  return load_json_file(arg);
}

dnls::ExperimentConfig load_config(const std::string& path) {
  return dnls::config_from_json(load_json_file(path));
}

fs::path resolve_out(const std::string& out, const std::string& name) {
  if (!out.empty()) return out;
  return dnls::default_out_root() / name;
}

int cmd_classify(const std::string& spec, std::uint64_t seed, int xi_samples, int y_samples) {
  const dnls::CubicNonlinearity N = dnls::resolve_nonlinearity(nonlinearity_arg(spec));
  json out;
  out["mass_resonance_ok"] = dnls::check_mass_resonance(N).empty();
  if (N.components() == 1) {
    out["gauge_invariant"] = dnls::is_gauge_invariant(N);
    if (N.mass(1) == 1.0 && out["gauge_invariant"].get<bool>()) {
      const auto nu = dnls::nu_polynomial(N);
      const auto cls = dnls::classify_single(nu);
      out["class"] = dnls::to_string(cls.tag);
      out["supImNu"] = cls.sup_im_nu;
      out["c0"] = cls.c0;
      out["xi0"] = cls.xi0;
      out["tolerance_based"] = cls.tolerance_based;
      // default lifespan data: unit Gaussian spectrum on the default grid
      dnls::Grid1D grid;
      const Eigen::ArrayXd xi = grid.xi();
      Eigen::ArrayXcd psi_hat = (-xi.square() / 2.0).exp().cast<std::complex<double>>();
      const auto lb = dnls::lifespan_bound(nu, xi, psi_hat);
      out["lifespan"] = {{"bound", std::isfinite(lb.bound) ? json(lb.bound) : json("inf")},
                         {"argmax_xi", lb.argmax_xi}};
    }
  }
  std::vector<double> xis = dnls::default_xi_samples(dnls::HermitianLevel::b1);
  if (xi_samples > 0) {
    xis.clear();
    for (int i = 0; i < xi_samples; ++i)
      xis.push_back(-20.0 + 40.0 * i / std::max(1, xi_samples - 1));
  }
  const Eigen::MatrixXcd H = Eigen::MatrixXcd::Identity(N.components(), N.components());
  for (auto lvl : {dnls::HermitianLevel::b0, dnls::HermitianLevel::b1, dnls::HermitianLevel::b3}) {
    const auto v = dnls::check_hermitian_condition(N, H, lvl, xis, y_samples, seed);
    json hv = {{"holds_on_samples", v.holds_on_samples},
               {"min_margin", v.min_margin},
               {"constant", v.constant},
               {"seed", v.seed}};
    if (v.witness) hv["witness_xi"] = v.witness->xi;
    out["hermitian"][dnls::to_string(lvl)] = hv;
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_lifespan(const std::string& config_path) {
  const auto c = load_config(config_path);
  const auto N = dnls::resolve_nonlinearity(c.nonlinearity);
  if (N.components() != 1 || N.mass(1) != 1.0) {
    std::cerr << "error: lifespan bound requires a single-component equation with m = 1\n";
    return 2;
  }
  const auto nu = dnls::nu_polynomial(N);
  dnls::SpectralTransform tr(c.grid);
  const auto psi = dnls::build_initial_profiles(c);
  const Eigen::ArrayXcd psi_hat = tr.forward((c.epsilon * psi[0]).eval());
  const auto lb = dnls::lifespan_bound(nu, c.grid.xi(), psi_hat);
  json out = {{"bound", std::isfinite(lb.bound) ? json(lb.bound) : json("inf")},
              {"argmax_xi", lb.argmax_xi},
              {"epsilon", c.epsilon}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_profile(const std::string& spec, double xi, double a0_re, double a0_im, double tau_end) {
  const auto N = dnls::resolve_nonlinearity(nonlinearity_arg(spec));
  const auto nu = dnls::nu_polynomial(N);
  const double a0_sq = a0_re * a0_re + a0_im * a0_im;
  json rows = json::array();
  dnls::profile::SingleProfileState s;
  s.xi = Eigen::ArrayXd::Constant(1, xi);
  s.A = Eigen::ArrayXcd::Constant(1, std::complex<double>(a0_re, a0_im));
  const double dtau = tau_end / 400.0;
  for (int i = 0; i <= 400; ++i) {
    rows.push_back({{"tau", s.tau},
                    {"re", s.A[0].real()},
                    {"im", s.A[0].imag()},
                    {"mod2_closed", dnls::profile::closed_form_modulus_sq(nu, xi, a0_sq, s.tau)}});
    if (i < 400) dnls::profile::profile_step_single(s, dtau, nu);
  }
  std::cout << json{{"xi", xi}, {"nu", {nu(xi).real(), nu(xi).imag()}}, {"trajectory", rows}}.dump(2)
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classification and asymptotics toolkit for cubic derivative Schrödinger systems"};
  app.require_subcommand(1);

  std::string config_path, out_dir, nl_spec;
  std::uint64_t seed = 0;
  int jobs = 1, xi_samples = 0, y_samples = 64;

  auto* classify = app.add_subcommand("classify", "Classify a nonlinearity and emit a JSON verdict");
  classify->add_option("nonlinearity", nl_spec, "catalog name, inline JSON, or JSON file")
      ->required();
  classify->add_option("--seed", seed);
  classify->add_option("--xi-samples", xi_samples);
  classify->add_option("--y-samples", y_samples);

  auto* lifespan = app.add_subcommand("lifespan", "Lifespan lower-bound scale for a config");
  lifespan->add_option("--config", config_path)->required();

  auto* simulate = app.add_subcommand("simulate", "Run a full experiment pipeline");
  simulate->add_option("--config", config_path)->required();
  simulate->add_option("--out", out_dir);
  simulate->add_option("--seed", seed);
  simulate->add_option("--jobs", jobs);

  double prof_xi = 0.0, prof_re = 1.0, prof_im = 0.0, prof_tau = 20.0;
  auto* profile = app.add_subcommand("profile", "Integrate the limit profile ODE at fixed xi");
  profile->add_option("nonlinearity", nl_spec)->required();
  profile->add_option("--xi", prof_xi);
  profile->add_option("--re", prof_re);
  profile->add_option("--im", prof_im);
  profile->add_option("--tau-end", prof_tau);

  std::string run_dir;
  auto* analyze = app.add_subcommand("analyze", "Re-run analysis on a persisted run directory");
  analyze->add_option("dir", run_dir)->required();

  std::vector<std::string> report_dirs;
  std::string report_out = "report.csv";
  auto* report = app.add_subcommand("report", "Comparison table across run directories");
  report->add_option("dirs", report_dirs);
  report->add_option("--out", report_out);

  auto* catalog = app.add_subcommand("catalog", "List built-in nonlinearities");

  CLI11_PARSE(app, argc, argv);

  try {
    if (classify->parsed()) return cmd_classify(nl_spec, seed, xi_samples, y_samples);
    if (lifespan->parsed()) return cmd_lifespan(config_path);
    if (simulate->parsed()) {
      auto c = load_config(config_path);
      if (simulate->count("--seed")) c.seed = seed;
      return dnls::run_experiment(c, resolve_out(out_dir, c.name));
    }
    if (profile->parsed()) return cmd_profile(nl_spec, prof_xi, prof_re, prof_im, prof_tau);
    if (analyze->parsed()) return dnls::analyze_run(run_dir);
    if (report->parsed()) {
      std::vector<fs::path> dirs(report_dirs.begin(), report_dirs.end());
      return dnls::write_report(dirs, report_out, std::cout);
    }
    if (catalog->parsed()) {
      for (const auto& name : dnls::catalog_names()) {
        std::cout << name << '\n';
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
