#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dnls/nonlin.hpp"

namespace dnls {

// Periodic truncation of the line: x in [-L, L), M equispaced points,
// frequencies xi_k = pi k / L stored in FFT order (0..M/2-1, -M/2..-1).
struct Grid1D {
  double L = 60.0;
  int M = 2048;
  bool dealias = true;

  double dx() const { return 2.0 * L / M; }
  double dxi() const { return M_PI / L; }

  Eigen::ArrayXd x() const;
  Eigen::ArrayXd xi() const;            // FFT order
  Eigen::ArrayXd dealias_mask() const;  // 1 inside |k| < M/3, else 0

  void validate() const;
};

// Continuum-normalized transform pair on the grid:
//   forward: u(x) -> (2 pi)^{-1/2} integral e^{-i x xi} u dx, sampled at xi_k
//   inverse: exact round trip.
class SpectralTransform {
 public:
  explicit SpectralTransform(Grid1D grid);

  Eigen::ArrayXcd forward(const Eigen::ArrayXcd& physical) const;
  Eigen::ArrayXcd inverse(const Eigen::ArrayXcd& spectral) const;

  const Grid1D& grid() const { return grid_; }

 private:
  Grid1D grid_;
  Eigen::ArrayXd sign_;  // (-1)^k, shifts the domain origin to -L
};

// Interaction-picture state: alpha_j(t, xi_k) = F[U_{m_j}(-t) u_j(t,.)](xi_k).
struct SimState {
  double t = 0.0;
  std::vector<Eigen::ArrayXcd> alpha;
};

struct SolverConfig {
  enum class Policy { Fixed, LogGraded };
  Policy policy = Policy::LogGraded;
  double dt0 = 0.01;      // base step (and the fixed step for Policy::Fixed)
  double tau_step = 0.02; // log grading: dt ~ tau_step * t after t = 1
  double dt_max = 0.25;
  double t_end = 1.0e4;
  std::vector<double> output_times;  // sorted; t_end appended if missing
};

std::vector<double> log_schedule(double t_first, double t_end, int count);

struct Observables {
  double t = 0.0;
  std::vector<double> l2;    // per component, L2_x via Plancherel
  std::vector<double> linf;  // per component, max |u_j| on the grid
  double mass_total = 0.0;   // sum_j ||u_j||^2
  double mass_diff = 0.0;    // ||u_1||^2 - ||u_2||^2 (0 unless n = 2)
  double boundary_strip_mass = 0.0;  // mass in |x| > 7L/8
};

struct RunResult {
  std::vector<SimState> snapshots;
  std::vector<Observables> norms;
  double max_mass_increase_per_step = 0.0;
  std::size_t steps = 0;
};

struct DivergenceError : std::runtime_error {
  explicit DivergenceError(double t_at)
      : std::runtime_error("numerical divergence at t = " + std::to_string(t_at)), t(t_at) {}
  double t;
};

// Pointwise evaluation of N on physical fields, derivatives taken spectrally.
std::vector<Eigen::ArrayXcd> evaluate_nonlinearity(const CubicNonlinearity& N,
                                                   const std::vector<Eigen::ArrayXcd>& u,
                                                   const Grid1D& grid);

class Simulator {
 public:
  Simulator(CubicNonlinearity N, Grid1D grid);

  const CubicNonlinearity& nonlinearity() const { return N_; }
  const Grid1D& grid() const { return grid_; }
  const SpectralTransform& transform() const { return transform_; }

  // alpha(0) from physical initial data; U(0) = id
  SimState initial_state(const std::vector<Eigen::ArrayXcd>& phi) const;

  // u_j recovered through the free propagator
  std::vector<Eigen::ArrayXcd> physical_fields(const SimState& s) const;

  std::vector<Eigen::ArrayXcd> rhs(const SimState& s) const;
  void step_rk4(SimState& s, double dt) const;

  Observables observables(const SimState& s) const;

  using SnapshotCallback = std::function<void(const SimState&, const Observables&)>;
  RunResult run(SimState state, const SolverConfig& config,
                const SnapshotCallback& on_snapshot = nullptr,
                bool keep_snapshots = true) const;

 private:
  std::vector<Eigen::ArrayXcd> rhs_at(double t, const std::vector<Eigen::ArrayXcd>& alpha) const;

  struct CompiledFactor {
    int base = 0;    // 0-based component
    bool conj = false;
    int deriv = 0;
  };
  struct CompiledTerm {
    std::complex<double> coeff;
    std::array<CompiledFactor, 3> factors;
  };

  CubicNonlinearity N_;
  Grid1D grid_;
  SpectralTransform transform_;
  Eigen::ArrayXd xi_;
  Eigen::ArrayXcd mask_;  // dealias mask, complex-typed for elementwise products
  std::vector<std::vector<CompiledTerm>> terms_by_component_;
};

}  // namespace dnls
