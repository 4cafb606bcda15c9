#include "dnls/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dnls/analysis.hpp"
#include "dnls/classify.hpp"
#include "dnls/io.hpp"

namespace dnls {
namespace {

using nlohmann::json;

std::string policy_name(SolverConfig::Policy p) {
  return p == SolverConfig::Policy::Fixed ? "fixed" : "log";
}

SolverConfig::Policy policy_from_name(const std::string& s) {
  if (s == "fixed") return SolverConfig::Policy::Fixed;
  if (s == "log") return SolverConfig::Policy::LogGraded;
  throw std::invalid_argument("unknown solver policy: " + s);
}

void write_failed_marker(const std::filesystem::path& dir, const std::string& message) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream os(dir / "FAILED");
  os << message << '\n';
}

std::vector<double> snapshot_times(const ExperimentConfig& c) {
  std::vector<double> times;
  if (!c.solver.output_times.empty()) {
    times = c.solver.output_times;
  } else if (c.solver.t_end > 1.0) {
    times = log_schedule(1.0, c.solver.t_end, std::max(2, c.snapshot_count));
  }
  if (c.analysis.m_estimate || c.analysis.decoupling) {
    // the quadrature-based m estimator anchors at t = 2
    bool has_two = false;
    for (double t : times)
      if (std::abs(t - 2.0) < 1e-9) has_two = true;
    if (!has_two && c.solver.t_end > 2.0) times.push_back(2.0);
  }
  std::sort(times.begin(), times.end());
  return times;
}

json classify_report(const CubicNonlinearity& N, const Eigen::ArrayXd& xi_grid,
                     const Eigen::ArrayXcd& psi_hat, bool want_lifespan, std::uint64_t seed) {
  json rep;
  const auto violations = check_mass_resonance(N);
  rep["mass_resonance_ok"] = violations.empty();

  if (N.components() == 1) {
    rep["gauge_invariant"] = is_gauge_invariant(N);
    if (N.mass(1) == 1.0 && rep["gauge_invariant"].get<bool>()) {
      const NuPolynomial nu = nu_polynomial(N);
      const DissipativityClass cls = classify_single(nu);
      rep["class"] = to_string(cls.tag);
      rep["supImNu"] = cls.sup_im_nu;
      rep["c0"] = cls.c0;
      rep["xi0"] = cls.xi0;
      rep["tolerance_based"] = cls.tolerance_based;
      if (want_lifespan) {
        const LifespanBound lb = lifespan_bound(nu, xi_grid, psi_hat);
        rep["lifespan"] = {{"bound", std::isfinite(lb.bound) ? json(lb.bound) : json("inf")},
                           {"argmax_xi", lb.argmax_xi}};
      }
    }
  }

  const auto xis = default_xi_samples(HermitianLevel::b1);
  const Eigen::MatrixXcd H = Eigen::MatrixXcd::Identity(N.components(), N.components());
  for (HermitianLevel lvl : {HermitianLevel::b0, HermitianLevel::b1}) {
    const HermitianVerdict v = check_hermitian_condition(N, H, lvl, xis, 64, seed);
    json hv = {{"holds_on_samples", v.holds_on_samples},
               {"min_margin", v.min_margin},
               {"constant", v.constant},
               {"seed", v.seed}};
    if (v.witness) hv["witness_xi"] = v.witness->xi;
    rep["hermitian"][to_string(lvl)] = hv;
  }
  return rep;
}

struct LoadedNorms {
  std::vector<double> t;
  std::vector<std::vector<double>> l2;  // per component
};

LoadedNorms read_norms_csv(const std::filesystem::path& file, int n) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error(file.string() + ": cannot open");
  LoadedNorms out;
  out.l2.resize(n);
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() < static_cast<std::size_t>(1 + n)) continue;
    out.t.push_back(row[0]);
    for (int j = 0; j < n; ++j) out.l2[j].push_back(row[1 + j]);
  }
  return out;
}

// The analysis stage shared between run_experiment and analyze_run.
void do_analysis(const ExperimentConfig& c, const Simulator& sim,
                 const std::vector<SimState>& snapshots, const LoadedNorms& norms,
                 const std::filesystem::path& dir) {
  const int n = sim.nonlinearity().components();

  if (c.analysis.fit) {
    json fits = json::array();
    for (int j = 0; j < n; ++j) {
      const auto fit = analysis::fit_log_decay(norms.t, norms.l2[j], c.epsilon,
                                               c.analysis.fit->t_min, c.analysis.fit->t_max, "L2",
                                               j + 1);
      fits.push_back({{"component", fit.component},
                      {"p", fit.p},
                      {"amplitude", fit.amplitude},
                      {"residual_rms", fit.residual_rms},
                      {"t_min", fit.t_min},
                      {"t_max", fit.t_max},
                      {"norm_kind", fit.norm_kind}});
    }
    io::write_json(dir / "fit.json", {{"epsilon", c.epsilon}, {"fits", fits}});
  }

  if (c.analysis.m_estimate && n == 2 && !snapshots.empty()) {
    const auto est = analysis::estimate_m(sim, snapshots);
    const auto psi = build_initial_profiles(c);
    Eigen::ArrayXcd p1 = sim.transform().forward(psi[0]);
    Eigen::ArrayXcd p2 = sim.transform().forward(psi[1]);
    Eigen::ArrayXd pred_fft =
        c.epsilon * c.epsilon * (p1.abs2() - p2.abs2());
    // reorder to ascending xi to match the estimator output
    const Eigen::ArrayXd xi = sim.grid().xi();
    std::vector<Eigen::Index> idx(xi.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return xi[a] < xi[b]; });
    Eigen::ArrayXd pred(xi.size());
    for (Eigen::Index k = 0; k < xi.size(); ++k) pred[k] = pred_fft[idx[k]];
    io::write_m_estimate_csv(dir / "m_estimate.csv", est, pred);
  }

  if (c.analysis.decoupling && n == 2) {
    std::vector<double> t, metric;
    for (const auto& s : snapshots) {
      t.push_back(s.t);
      metric.push_back(analysis::decoupling_metric(s));
    }
    io::write_decoupling_csv(dir / "decoupling.csv", t, metric);
  }

  if (c.analysis.eps_sweep && n == 2) {
    SolverConfig sweep_cfg = c.solver;
    sweep_cfg.t_end = c.analysis.eps_sweep->t_end;
    sweep_cfg.output_times.clear();
    const auto rep = analysis::verify_epsilon_expansion(
        sim.nonlinearity(), build_initial_profiles(c), c.analysis.eps_sweep->eps, sim.grid(),
        sweep_cfg);
    io::write_json(dir / "epsilon_scaling.json", {{"eps", rep.eps},
                                                  {"r", rep.r},
                                                  {"ratios", rep.ratios},
                                                  {"t_end", rep.t_end}});
  }
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.name = j.value("name", std::string("run"));
  c.nonlinearity = j.at("nonlinearity");
  c.epsilon = j.value("epsilon", 0.3);
  if (j.contains("data")) {
    const auto& d = j.at("data");
    if (d.is_object() && d.contains("file")) {
      c.data.file = d.at("file").get<std::string>();
    } else {
      for (const auto& g : d) {
        GaussianSpec spec;
        spec.amplitude = g.value("amplitude", 1.0);
        spec.center = g.value("center", 0.0);
        spec.width = g.value("width", 1.0);
        spec.kshift = g.value("kshift", 0.0);
        c.data.gaussians.push_back(spec);
      }
    }
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    c.grid.L = g.value("L", 60.0);
    c.grid.M = g.value("M", 2048);
    c.grid.dealias = g.value("dealias", true);
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    c.solver.policy = policy_from_name(s.value("policy", std::string("log")));
    c.solver.dt0 = s.value("dt0", 0.01);
    c.solver.tau_step = s.value("tau_step", 0.02);
    c.solver.dt_max = s.value("dt_max", 0.25);
    c.solver.t_end = s.value("t_end", 1.0e4);
    c.snapshot_count = s.value("snapshots", 50);
  }
  c.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("analysis")) {
    const auto& a = j.at("analysis");
    c.analysis.classify = a.value("classify", true);
    c.analysis.lifespan = a.value("lifespan", true);
    c.analysis.m_estimate = a.value("m_estimate", false);
    c.analysis.decoupling = a.value("decoupling", false);
    if (a.contains("fit")) {
      FitRequest f;
      f.t_min = a.at("fit").value("t_min", 100.0);
      f.t_max = a.at("fit").value("t_max", 1.0e4);
      c.analysis.fit = f;
    }
    if (a.contains("eps_sweep")) {
      EpsSweepRequest e;
      e.eps = a.at("eps_sweep").at("eps").get<std::vector<double>>();
      e.t_end = a.at("eps_sweep").value("t_end", 200.0);
      c.analysis.eps_sweep = e;
    }
  }
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["nonlinearity"] = c.nonlinearity;
  j["epsilon"] = c.epsilon;
  if (c.data.file) {
    j["data"] = {{"file", *c.data.file}};
  } else {
    json arr = json::array();
    for (const auto& g : c.data.gaussians)
      arr.push_back({{"amplitude", g.amplitude},
                     {"center", g.center},
                     {"width", g.width},
                     {"kshift", g.kshift}});
    j["data"] = arr;
  }
  j["grid"] = {{"L", c.grid.L}, {"M", c.grid.M}, {"dealias", c.grid.dealias}};
  j["solver"] = {{"policy", policy_name(c.solver.policy)},
                 {"dt0", c.solver.dt0},
                 {"tau_step", c.solver.tau_step},
                 {"dt_max", c.solver.dt_max},
                 {"t_end", c.solver.t_end},
                 {"snapshots", c.snapshot_count}};
  j["seed"] = c.seed;
  json a;
  a["classify"] = c.analysis.classify;
  a["lifespan"] = c.analysis.lifespan;
  a["m_estimate"] = c.analysis.m_estimate;
  a["decoupling"] = c.analysis.decoupling;
  if (c.analysis.fit) a["fit"] = {{"t_min", c.analysis.fit->t_min}, {"t_max", c.analysis.fit->t_max}};
  if (c.analysis.eps_sweep)
    a["eps_sweep"] = {{"eps", c.analysis.eps_sweep->eps}, {"t_end", c.analysis.eps_sweep->t_end}};
  j["analysis"] = a;
  return j;
}

std::vector<Eigen::ArrayXcd> build_initial_profiles(const ExperimentConfig& c) {
  if (c.data.file) {
    const SimState s = io::read_snapshot(*c.data.file);
    SpectralTransform tr(c.grid);
    std::vector<Eigen::ArrayXcd> psi;
    for (const auto& a : s.alpha) {
      if (a.size() != c.grid.M) throw std::invalid_argument("data file grid mismatch");
      psi.push_back(tr.inverse(a));
    }
    return psi;
  }
  const Eigen::ArrayXd x = c.grid.x();
  std::vector<Eigen::ArrayXcd> psi;
  for (const auto& g : c.data.gaussians) {
    const Eigen::ArrayXd envelope =
        g.amplitude * (-((x - g.center) / g.width).square() / 2.0).exp();
    const Eigen::ArrayXd phase = g.kshift * x;
    Eigen::ArrayXcd field(x.size());
    field.real() = envelope * phase.cos();
    field.imag() = envelope * phase.sin();
    psi.push_back(std::move(field));
  }
  return psi;
}

int run_experiment(const ExperimentConfig& c, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  json manifest;
  try {
    const CubicNonlinearity N = resolve_nonlinearity(c.nonlinearity);
    c.grid.validate();
    if (c.epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
    if (!c.data.file && static_cast<int>(c.data.gaussians.size()) != N.components())
      throw std::invalid_argument("initial data must supply one entry per component");

    manifest["config"] = config_to_json(c);
    manifest["nonlinearity_resolved"] = nonlinearity_to_json(N);
    manifest["format_version"] = 1;
    manifest["thread_count"] = 1;
    io::write_json(out_dir / "manifest.json", manifest);

    Simulator sim(N, c.grid);
    auto psi = build_initial_profiles(c);
    std::vector<Eigen::ArrayXcd> phi;
    for (const auto& p : psi) phi.push_back((c.epsilon * p).eval());

    if (c.analysis.classify) {
      const Eigen::ArrayXcd psi1_hat = sim.transform().forward(phi[0]);
      io::write_json(out_dir / "verdict.json",
                     classify_report(N, c.grid.xi(), psi1_hat, c.analysis.lifespan, c.seed));
    }

    SolverConfig solver = c.solver;
    solver.output_times = snapshot_times(c);

    int snap_index = 0;
    std::vector<Observables> norms;
    auto on_snapshot = [&](const SimState& s, const Observables& o) {
      char name[32];
      std::snprintf(name, sizeof(name), "alpha_%04d.bin", snap_index++);
      io::write_snapshot(out_dir / name, s);
      norms.push_back(o);
    };

    SimState state = sim.initial_state(phi);
    RunResult result;
    try {
      result = sim.run(std::move(state), solver, on_snapshot, true);
    } catch (const DivergenceError& e) {
      io::write_norms_csv(out_dir / "norms.csv", norms);
      write_failed_marker(out_dir, e.what());
      std::cerr << "error: " << e.what() << '\n';
      return 3;
    }
    io::write_norms_csv(out_dir / "norms.csv", result.norms);

    LoadedNorms ln;
    for (const auto& o : result.norms) {
      ln.t.push_back(o.t);
      if (ln.l2.empty()) ln.l2.resize(o.l2.size());
      for (std::size_t j = 0; j < o.l2.size(); ++j) ln.l2[j].push_back(o.l2[j]);
    }
    do_analysis(c, sim, result.snapshots, ln, out_dir);
    return 0;
  } catch (const std::exception& e) {
    write_failed_marker(out_dir, e.what());
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

int analyze_run(const std::filesystem::path& dir) {
  try {
    const io::RunData run = io::read_run(dir);
    const ExperimentConfig c = config_from_json(run.manifest.at("config"));
    const CubicNonlinearity N = resolve_nonlinearity(c.nonlinearity);
    Simulator sim(N, c.grid);
    const LoadedNorms norms = read_norms_csv(dir / "norms.csv", N.components());
    do_analysis(c, sim, run.snapshots, norms, dir);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

int write_report(const std::vector<std::filesystem::path>& dirs,
                 const std::filesystem::path& out_csv, std::ostream& text) {
  if (dirs.empty()) {
    std::cerr << "error: no run directories given\n";
    return 2;
  }
  std::ofstream csv(out_csv);
  csv << "run,class,p,final_l2,decoupling_final,status\n" << std::setprecision(10);
  text << std::left << std::setw(28) << "run" << std::setw(8) << "class" << std::setw(12) << "p"
       << std::setw(16) << "final L2" << std::setw(14) << "decoupling" << "status\n";
  for (const auto& dir : dirs) {
    std::string name = dir.filename().string();
    std::string cls = "-", status = "ok";
    double p = std::nan(""), final_l2 = std::nan(""), dec = std::nan("");
    try {
      const json manifest = io::read_json(dir / "manifest.json");
      name = manifest.at("config").value("name", name);
      if (std::filesystem::exists(dir / "FAILED")) status = "failed";
      if (std::filesystem::exists(dir / "verdict.json")) {
        const json v = io::read_json(dir / "verdict.json");
        if (v.contains("class")) cls = v.at("class").get<std::string>();
      }
      if (std::filesystem::exists(dir / "fit.json")) {
        const json f = io::read_json(dir / "fit.json");
        if (!f.at("fits").empty()) p = f.at("fits")[0].at("p").get<double>();
      }
      if (std::filesystem::exists(dir / "norms.csv")) {
        const auto n = read_norms_csv(dir / "norms.csv", 1);
        if (!n.l2[0].empty()) final_l2 = n.l2[0].back();
      }
      if (std::filesystem::exists(dir / "decoupling.csv")) {
        std::ifstream is(dir / "decoupling.csv");
        std::string line, last;
        std::getline(is, line);
        while (std::getline(is, line))
          if (!line.empty()) last = line;
        if (!last.empty()) dec = std::stod(last.substr(last.find(',') + 1));
      }
    } catch (const std::exception&) {
      status = "incomplete";
    }
    csv << name << ',' << cls << ',' << p << ',' << final_l2 << ',' << dec << ',' << status << '\n';
    text << std::setw(28) << name << std::setw(8) << cls << std::setw(12) << p << std::setw(16)
         << final_l2 << std::setw(14) << dec << status << '\n';
  }
  return 0;
}

std::filesystem::path default_out_root() {
  if (const char* env = std::getenv("DNLS_OUT_ROOT")) return env;
  return std::filesystem::current_path() / "runs";
}

}  // namespace dnls
