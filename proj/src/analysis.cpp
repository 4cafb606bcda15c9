#include "dnls/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dnls::analysis {

DecayFit fit_log_decay(const std::vector<double>& t, const std::vector<double>& norms, double eps,
                       double t_min, double t_max, const std::string& norm_kind, int component) {
  if (t.size() != norms.size()) throw std::invalid_argument("series length mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_min || t[i] > t_max) continue;
    if (norms[i] <= 0.0) throw std::invalid_argument("norms must be positive in the fit window");
    xs.push_back(std::log(1.0 + eps * eps * std::log(t[i])));
    ys.push_back(std::log(norms[i]));
  }
  if (xs.size() < 10) throw std::invalid_argument("fit window has fewer than 10 samples");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("degenerate fit window (all t equal)");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;

  DecayFit fit;
  fit.p = -slope;
  fit.amplitude = std::exp(intercept);
  fit.t_min = t_min;
  fit.t_max = t_max;
  fit.norm_kind = norm_kind;
  fit.component = component;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + slope * xs[i]);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  return fit;
}

RemainderDiagnostics remainder_diagnostics(const Simulator& sim, const SimState& state) {
  if (sim.nonlinearity().components() != 2)
    throw std::invalid_argument("remainder diagnostics require a two-component state");
  if (state.t < 1.0) throw std::invalid_argument("remainder diagnostics require t >= 1");

  const auto u = sim.physical_fields(state);
  const auto& T = sim.transform();
  const Eigen::ArrayXd xi = sim.grid().xi();

  RemainderDiagnostics out;
  for (int j = 0; j < 2; ++j) {
    const int o = 1 - j;
    const Eigen::ArrayXcd cubic =
        u[static_cast<std::size_t>(o)].abs2().cast<std::complex<double>>() *
        u[static_cast<std::size_t>(j)];
    // F U(-t)[.] = e^{+i t xi^2/(2 m_j)} F[.]
    const double mj = sim.nonlinearity().masses()[static_cast<std::size_t>(j)];
    const Eigen::ArrayXcd phase = (xi.square() * (state.t / (2.0 * mj)))
                                      .unaryExpr([](double a) {
                                        return std::complex<double>(std::cos(a), std::sin(a));
                                      });
    const Eigen::ArrayXcd transported = phase * T.forward(cubic);
    const Eigen::ArrayXcd R =
        state.alpha[static_cast<std::size_t>(o)].abs2().cast<std::complex<double>>() *
            state.alpha[static_cast<std::size_t>(j)] / state.t -
        transported;
    if (j == 0)
      out.R1 = R;
    else
      out.R2 = R;
  }
  out.rho = 2.0 * ((state.alpha[0].conjugate() * out.R1).real() -
                   (state.alpha[1].conjugate() * out.R2).real());
  return out;
}

namespace {

Eigen::ArrayXd diff_sq(const SimState& s) { return s.alpha[0].abs2() - s.alpha[1].abs2(); }

}  // namespace

MEstimate estimate_m(const Simulator& sim, const std::vector<SimState>& snapshots) {
  const SimState* at2 = nullptr;
  for (const auto& s : snapshots)
    if (std::abs(s.t - 2.0) < 1e-9) at2 = &s;
  if (!at2 || snapshots.empty())
    throw std::invalid_argument("estimate_m needs snapshots at t = 2 and the final time");
  const SimState& fin = snapshots.back();

  MEstimate est;
  est.T = fin.t;
  Eigen::ArrayXd large_T = diff_sq(fin);
  Eigen::ArrayXd prop42 = diff_sq(*at2);

  // trapezoid of rho(t, xi) over the snapshots in [2, T]
  Eigen::ArrayXd rho_prev;
  double t_prev = 0.0;
  for (const auto& s : snapshots) {
    if (s.t < 2.0 - 1e-9) continue;
    const Eigen::ArrayXd rho = remainder_diagnostics(sim, s).rho;
    if (rho_prev.size() > 0) prop42 += 0.5 * (s.t - t_prev) * (rho + rho_prev);
    rho_prev = rho;
    t_prev = s.t;
  }

  // report on the ascending-xi ordering
  const Eigen::ArrayXd xi = sim.grid().xi();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(xi.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return xi[a] < xi[b]; });
  est.xi.resize(xi.size());
  est.m_large_T.resize(xi.size());
  est.m_prop42.resize(xi.size());
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    est.xi[i] = xi[order[static_cast<std::size_t>(i)]];
    est.m_large_T[i] = large_T[order[static_cast<std::size_t>(i)]];
    est.m_prop42[i] = prop42[order[static_cast<std::size_t>(i)]];
  }
  est.tail_estimate = (est.m_large_T - est.m_prop42).abs().maxCoeff();
  return est;
}

void MAccumulator::observe(const Simulator& sim, const SimState& state) {
  if (state.t < t_anchor_ - 1e-9) return;
  const Eigen::ArrayXd rho = remainder_diagnostics(sim, state).rho;
  if (!started_) {
    if (std::abs(state.t - t_anchor_) > 1e-6)
      throw std::invalid_argument("first observation must land on the anchor time");
    anchor_diff_ = diff_sq(state);
    integral_ = Eigen::ArrayXd::Zero(rho.size());
    started_ = true;
  } else {
    integral_ += 0.5 * (state.t - prev_t_) * (rho + prev_rho_);
  }
  prev_rho_ = rho;
  prev_t_ = state.t;
  last_t_ = state.t;
  last_diff_ = diff_sq(state);
}

MEstimate MAccumulator::finalize(const Simulator& sim) const {
  if (!started_ || last_t_ <= t_anchor_)
    throw std::invalid_argument("no observations past the anchor time");
  const Eigen::ArrayXd prop42 = anchor_diff_ + integral_;

  const Eigen::ArrayXd xi = sim.grid().xi();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(xi.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return xi[a] < xi[b]; });

  MEstimate est;
  est.T = last_t_;
  est.xi.resize(xi.size());
  est.m_large_T.resize(xi.size());
  est.m_prop42.resize(xi.size());
  for (Eigen::Index k = 0; k < xi.size(); ++k) {
    est.xi[k] = xi[order[static_cast<std::size_t>(k)]];
    est.m_large_T[k] = last_diff_[order[static_cast<std::size_t>(k)]];
    est.m_prop42[k] = prop42[order[static_cast<std::size_t>(k)]];
  }
  est.tail_estimate = (est.m_large_T - est.m_prop42).abs().maxCoeff();
  return est;
}

EpsilonScalingReport verify_epsilon_expansion(const CubicNonlinearity& N,
                                              const std::vector<Eigen::ArrayXcd>& psi,
                                              const std::vector<double>& eps_list,
                                              const Grid1D& grid, SolverConfig config) {
  if (eps_list.size() < 2) throw std::invalid_argument("need at least two epsilon values");
  if (N.components() != 2) throw std::invalid_argument("epsilon sweep is for two components");

  Simulator sim(N, grid);
  const Eigen::ArrayXd pred_unit =
      sim.transform().forward(psi[0]).abs2() - sim.transform().forward(psi[1]).abs2();

  EpsilonScalingReport rep;
  rep.eps = eps_list;
  rep.t_end = config.t_end;
  for (double eps : eps_list) {
    std::vector<Eigen::ArrayXcd> data;
    for (const auto& f : psi) data.push_back(eps * f);
    RunResult rr = sim.run(sim.initial_state(data), config, nullptr, true);
    const Eigen::ArrayXd m_hat = diff_sq(rr.snapshots.back());
    rep.r.push_back((m_hat - eps * eps * pred_unit).abs().maxCoeff());
  }
  for (std::size_t i = 0; i + 1 < rep.r.size(); ++i) rep.ratios.push_back(rep.r[i] / rep.r[i + 1]);
  return rep;
}

double decoupling_metric(const SimState& state) {
  if (state.alpha.size() != 2) throw std::invalid_argument("decoupling metric needs two components");
  return (state.alpha[0] * state.alpha[1]).abs().maxCoeff();
}

ScatterState extract_scattering_state(const std::vector<SimState>& snapshots) {
  if (snapshots.empty()) throw std::invalid_argument("empty trajectory");
  ScatterState sc;
  sc.T = snapshots.back().t;
  sc.phi_plus_hat = snapshots.back().alpha;
  return sc;
}

ReconstructionError profile_reconstruction_error(const Simulator& sim, const SimState& state) {
  if (state.t < 1.0) throw std::invalid_argument("reconstruction error requires t >= 1");
  const auto u = sim.physical_fields(state);
  const Grid1D& g = sim.grid();
  const Eigen::ArrayXd x = g.x();
  const Eigen::ArrayXd xi = g.xi();
  const double xi_max = g.dxi() * (g.M / 2 - 1);

  // ascending-xi copies for interpolation
  std::vector<Eigen::ArrayXcd> alpha_sorted(state.alpha.size());
  Eigen::ArrayXd xi_sorted(xi.size());
  {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(xi.size()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return xi[a] < xi[b]; });
    for (std::size_t j = 0; j < state.alpha.size(); ++j)
      alpha_sorted[j].resize(xi.size());
    for (Eigen::Index i = 0; i < xi.size(); ++i) {
      xi_sorted[i] = xi[order[static_cast<std::size_t>(i)]];
      for (std::size_t j = 0; j < state.alpha.size(); ++j)
        alpha_sorted[j][i] = state.alpha[j][order[static_cast<std::size_t>(i)]];
    }
  }

  ReconstructionError out;
  Eigen::Index used = 0;
  for (std::size_t j = 0; j < state.alpha.size(); ++j) {
    const double mj = sim.nonlinearity().masses()[j];
    // sqrt(m_j/(i t)) with the principal branch
    const std::complex<double> amp = std::sqrt(std::complex<double>(mj, 0.0) /
                                               (std::complex<double>(0.0, 1.0) * state.t));
    double worst = 0.0;
    Eigen::Index cnt = 0;
    for (int m = 0; m < g.M; ++m) {
      const double s = mj * x[m] / state.t;
      if (std::abs(s) > xi_max) continue;
      ++cnt;
      // linear interpolation of alpha_j at s
      Eigen::Index lo = 0, hi = xi_sorted.size() - 1;
      while (hi - lo > 1) {
        const Eigen::Index mid = (lo + hi) / 2;
        (xi_sorted[mid] <= s ? lo : hi) = mid;
      }
      const double w = (s - xi_sorted[lo]) / (xi_sorted[lo + 1] - xi_sorted[lo]);
      const std::complex<double> a =
          alpha_sorted[j][lo] * (1.0 - w) + alpha_sorted[j][lo + 1] * w;
      const double phase = mj * x[m] * x[m] / (2.0 * state.t);
      const std::complex<double> v =
          amp * a * std::complex<double>(std::cos(phase), std::sin(phase));
      worst = std::max(worst, std::abs(u[j][m] - v));
    }
    used = std::max(used, cnt);
    out.linf_error.push_back(worst);
  }
  out.window_fraction = static_cast<double>(used) / g.M;
  return out;
}

}  // namespace dnls::analysis
