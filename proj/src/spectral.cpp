#include "dnls/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/FFT>

namespace dnls {

Eigen::ArrayXd Grid1D::x() const {
  return Eigen::ArrayXd::LinSpaced(M, 0, M - 1) * dx() - L;
}

Eigen::ArrayXd Grid1D::xi() const {
  Eigen::ArrayXd out(M);
  for (int k = 0; k < M; ++k) out[k] = dxi() * (k < M / 2 ? k : k - M);
  return out;
}

Eigen::ArrayXd Grid1D::dealias_mask() const {
  Eigen::ArrayXd out(M);
  for (int k = 0; k < M; ++k) {
    const int kk = k < M / 2 ? k : k - M;
    out[k] = std::abs(kk) < M / 3 ? 1.0 : 0.0;
  }
  return out;
}

void Grid1D::validate() const {
  if (L <= 0.0) throw std::invalid_argument("grid half-length must be positive");
  if (M < 4 || (M & (M - 1)) != 0) throw std::invalid_argument("grid size must be a power of two");
}

SpectralTransform::SpectralTransform(Grid1D grid) : grid_(grid) {
  grid_.validate();
  sign_ = Eigen::ArrayXd(grid_.M);
  for (int k = 0; k < grid_.M; ++k) sign_[k] = k % 2 == 0 ? 1.0 : -1.0;
}

Eigen::ArrayXcd SpectralTransform::forward(const Eigen::ArrayXcd& physical) const {
  if (physical.size() != grid_.M) throw std::invalid_argument("field length mismatch");
  static thread_local Eigen::FFT<double> fft;
  Eigen::VectorXcd in = physical.matrix();
  Eigen::VectorXcd out(grid_.M);
  fft.fwd(out, in);
  return out.array() * sign_ * (grid_.dx() / std::sqrt(2.0 * M_PI));
}

Eigen::ArrayXcd SpectralTransform::inverse(const Eigen::ArrayXcd& spectral) const {
  if (spectral.size() != grid_.M) throw std::invalid_argument("field length mismatch");
  static thread_local Eigen::FFT<double> fft;
  Eigen::VectorXcd in = (spectral * sign_ * (std::sqrt(2.0 * M_PI) / grid_.dx())).matrix();
  Eigen::VectorXcd out(grid_.M);
  fft.inv(out, in);
  return out.array();
}

std::vector<double> log_schedule(double t_first, double t_end, int count) {
  if (count < 2 || t_first <= 0.0 || t_end <= t_first)
    throw std::invalid_argument("invalid schedule parameters");
  std::vector<double> out;
  const double r = std::log(t_end / t_first) / (count - 1);
  for (int i = 0; i < count; ++i) out.push_back(t_first * std::exp(r * i));
  out.back() = t_end;
  return out;
}

std::vector<Eigen::ArrayXcd> evaluate_nonlinearity(const CubicNonlinearity& N,
                                                   const std::vector<Eigen::ArrayXcd>& u,
                                                   const Grid1D& grid) {
  Simulator sim(N, grid);
  SimState s;
  s.t = 0.0;
  for (const auto& f : u) s.alpha.push_back(sim.transform().forward(f));
  // at t = 0 the propagator is the identity, so rhs = -i F[N]
  auto r = sim.rhs(s);
  std::vector<Eigen::ArrayXcd> out;
  for (auto& g : r)
    out.push_back(sim.transform().inverse(g * std::complex<double>(0.0, 1.0)));
  return out;
}

namespace {

// e^{i theta} elementwise
Eigen::ArrayXcd unit_phase(const Eigen::ArrayXd& theta) {
  return theta.unaryExpr(
      [](double a) { return std::complex<double>(std::cos(a), std::sin(a)); });
}

}  // namespace

Simulator::Simulator(CubicNonlinearity N, Grid1D grid)
    : N_(std::move(N)), grid_(grid), transform_(grid), xi_(grid.xi()),
      mask_((grid.dealias ? grid.dealias_mask() : Eigen::ArrayXd::Ones(grid.M))
                .cast<std::complex<double>>()) {
  const int n = N_.components();
  terms_by_component_.resize(static_cast<std::size_t>(n));
  for (const auto& [key, coeff] : N_.terms()) {
    CompiledTerm ct;
    ct.coeff = coeff.value();
    for (int i = 0; i < 3; ++i) {
      const Factor& f = key.second[static_cast<std::size_t>(i)];
      ct.factors[static_cast<std::size_t>(i)] = {f.k <= n ? f.k - 1 : f.k - n - 1, f.k > n, f.l};
    }
    terms_by_component_[static_cast<std::size_t>(key.first - 1)].push_back(ct);
  }
}

SimState Simulator::initial_state(const std::vector<Eigen::ArrayXcd>& phi) const {
  if (static_cast<int>(phi.size()) != N_.components())
    throw std::invalid_argument("initial data component count mismatch");
  SimState s;
  s.t = 0.0;
  for (const auto& f : phi) s.alpha.push_back(transform_.forward(f));
  return s;
}

std::vector<Eigen::ArrayXcd> Simulator::physical_fields(const SimState& s) const {
  std::vector<Eigen::ArrayXcd> u;
  for (std::size_t j = 0; j < s.alpha.size(); ++j) {
    const double mj = N_.masses()[j];
    const Eigen::ArrayXcd phase = unit_phase(-s.t / (2.0 * mj) * xi_.square());
    u.push_back(transform_.inverse(phase * s.alpha[j]));
  }
  return u;
}

std::vector<Eigen::ArrayXcd> Simulator::rhs_at(double t,
                                               const std::vector<Eigen::ArrayXcd>& alpha) const {
  const int n = N_.components();
  std::vector<Eigen::ArrayXcd> u(static_cast<std::size_t>(n)), ux(static_cast<std::size_t>(n));
  std::vector<Eigen::ArrayXcd> conj_phase(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double mj = N_.masses()[static_cast<std::size_t>(j)];
    const Eigen::ArrayXcd phase = unit_phase(-t / (2.0 * mj) * xi_.square());
    const Eigen::ArrayXcd uhat = phase * alpha[static_cast<std::size_t>(j)] * mask_;
    u[static_cast<std::size_t>(j)] = transform_.inverse(uhat);
    Eigen::ArrayXcd duhat = uhat;
    duhat.real() = -xi_ * uhat.imag();
    duhat.imag() = xi_ * uhat.real();
    ux[static_cast<std::size_t>(j)] = transform_.inverse(duhat);
    conj_phase[static_cast<std::size_t>(j)] = phase.conjugate();
  }

  std::vector<Eigen::ArrayXcd> out;
  for (int j = 0; j < n; ++j) {
    Eigen::ArrayXcd nl = Eigen::ArrayXcd::Zero(grid_.M);
    for (const CompiledTerm& t3 : terms_by_component_[static_cast<std::size_t>(j)]) {
      Eigen::ArrayXcd prod = Eigen::ArrayXcd::Constant(grid_.M, t3.coeff);
      for (const CompiledFactor& f : t3.factors) {
        const Eigen::ArrayXcd& field =
            f.deriv == 0 ? u[static_cast<std::size_t>(f.base)] : ux[static_cast<std::size_t>(f.base)];
        if (f.conj)
          prod *= field.conjugate();
        else
          prod *= field;
      }
      nl += prod;
    }
    out.push_back(std::complex<double>(0.0, -1.0) * conj_phase[static_cast<std::size_t>(j)] *
                  (transform_.forward(nl) * mask_));
  }
  return out;
}

std::vector<Eigen::ArrayXcd> Simulator::rhs(const SimState& s) const { return rhs_at(s.t, s.alpha); }

void Simulator::step_rk4(SimState& s, double dt) const {
  const std::size_t n = s.alpha.size();
  const auto k1 = rhs_at(s.t, s.alpha);
  std::vector<Eigen::ArrayXcd> tmp(n);
  for (std::size_t j = 0; j < n; ++j) tmp[j] = s.alpha[j] + 0.5 * dt * k1[j];
  const auto k2 = rhs_at(s.t + 0.5 * dt, tmp);
  for (std::size_t j = 0; j < n; ++j) tmp[j] = s.alpha[j] + 0.5 * dt * k2[j];
  const auto k3 = rhs_at(s.t + 0.5 * dt, tmp);
  for (std::size_t j = 0; j < n; ++j) tmp[j] = s.alpha[j] + dt * k3[j];
  const auto k4 = rhs_at(s.t + dt, tmp);
  for (std::size_t j = 0; j < n; ++j)
    s.alpha[j] += (dt / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  s.t += dt;
}

Observables Simulator::observables(const SimState& s) const {
  Observables o;
  o.t = s.t;
  const auto u = physical_fields(s);
  const Eigen::ArrayXd x = grid_.x();
  for (std::size_t j = 0; j < s.alpha.size(); ++j) {
    const double l2sq = (s.alpha[j].abs2().sum()) * grid_.dxi();
    o.l2.push_back(std::sqrt(l2sq));
    o.linf.push_back(u[j].abs().maxCoeff());
    o.mass_total += l2sq;
    double strip = 0.0;
    for (int m = 0; m < grid_.M; ++m)
      if (std::abs(x[m]) > 7.0 * grid_.L / 8.0) strip += std::norm(u[j][m]) * grid_.dx();
    o.boundary_strip_mass += strip;
  }
  if (s.alpha.size() == 2) o.mass_diff = o.l2[0] * o.l2[0] - o.l2[1] * o.l2[1];
  return o;
}

RunResult Simulator::run(SimState state, const SolverConfig& config,
                         const SnapshotCallback& on_snapshot, bool keep_snapshots) const {
  if (config.dt0 <= 0.0 || config.t_end <= state.t)
    throw std::invalid_argument("invalid solver configuration");

  std::vector<double> outputs = config.output_times;
  std::sort(outputs.begin(), outputs.end());
  if (outputs.empty() || outputs.back() < config.t_end) outputs.push_back(config.t_end);

  RunResult result;
  double mass_prev = 0.0;
  for (const auto& a : state.alpha) mass_prev += a.abs2().sum() * grid_.dxi();

  auto emit = [&](const SimState& s) {
    const Observables o = observables(s);
    result.norms.push_back(o);
    if (keep_snapshots) result.snapshots.push_back(s);
    if (on_snapshot) on_snapshot(s, o);
  };

  std::size_t oi = 0;
  while (oi < outputs.size() && outputs[oi] <= state.t + 1e-12) ++oi;
  if (state.t == 0.0 || (!outputs.empty() && outputs.front() >= state.t)) emit(state);

  while (state.t < config.t_end - 1e-9) {
    double dt = config.dt0;
    if (config.policy == SolverConfig::Policy::LogGraded)
      dt = std::min(config.dt_max, std::max(config.dt0, config.tau_step * state.t));
    dt = std::min(dt, config.t_end - state.t);
    bool hit_output = false;
    if (oi < outputs.size() && state.t + dt >= outputs[oi] - 1e-12) {
      dt = outputs[oi] - state.t;
      hit_output = true;
    }

    step_rk4(state, dt);
    ++result.steps;

    double mass = 0.0;
    for (const auto& a : state.alpha) {
      if (!a.isFinite().all()) throw DivergenceError(state.t);
      mass += a.abs2().sum() * grid_.dxi();
    }
    result.max_mass_increase_per_step =
        std::max(result.max_mass_increase_per_step, mass - mass_prev);
    mass_prev = mass;

    if (hit_output) {
      state.t = outputs[oi];  // suppress roundoff creep at output points
      emit(state);
      ++oi;
    }
  }
  return result;
}

}  // namespace dnls
