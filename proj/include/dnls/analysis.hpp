#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dnls/spectral.hpp"

namespace dnls::analysis {

struct DecayFit {
  double p = 0.0;            // ||u|| ~ C (1 + eps^2 log t)^{-p}
  double amplitude = 0.0;    // C
  double residual_rms = 0.0;
  double t_min = 0.0, t_max = 0.0;
  std::string norm_kind = "L2";
  int component = 1;
};

// Least squares of log||u(t)|| against log(1 + eps^2 log t) over the window.
DecayFit fit_log_decay(const std::vector<double>& t, const std::vector<double>& norms, double eps,
                       double t_min, double t_max, const std::string& norm_kind = "L2",
                       int component = 1);

struct RemainderDiagnostics {
  Eigen::ArrayXcd R1, R2;
  Eigen::ArrayXd rho;  // 2 Re[conj(a1) R1 - conj(a2) R2]
};

// R_j = (1/t)|alpha_{3-j}|^2 alpha_j - F U(-t)[|u_{3-j}|^2 u_j]; requires t >= 1.
RemainderDiagnostics remainder_diagnostics(const Simulator& sim, const SimState& state);

struct MEstimate {
  Eigen::ArrayXd xi;          // ascending
  Eigen::ArrayXd m_large_T;   // |a1(T)|^2 - |a2(T)|^2
  Eigen::ArrayXd m_prop42;    // t=2 difference + trapezoid of rho over snapshots
  double T = 0.0;
  double tail_estimate = 0.0;  // max |m_large_T - m_prop42|
};

// Needs a snapshot at t = 2 and the final one at T, with intermediates for
// the rho quadrature.
MEstimate estimate_m(const Simulator& sim, const std::vector<SimState>& snapshots);

// Streaming variant of the rho quadrature: feed every solver output (the
// estimators agree only when the oscillatory integrand is sampled at the
// step resolution, far denser than persisted snapshots). Call observe() with
// ascending t; the first observation at t >= t_anchor must land on t_anchor.
class MAccumulator {
 public:
  explicit MAccumulator(double t_anchor = 2.0) : t_anchor_(t_anchor) {}

  void observe(const Simulator& sim, const SimState& state);
  MEstimate finalize(const Simulator& sim) const;

 private:
  double t_anchor_;
  bool started_ = false;
  double prev_t_ = 0.0, last_t_ = 0.0;
  Eigen::ArrayXd prev_rho_, integral_, anchor_diff_, last_diff_;
};

struct EpsilonScalingReport {
  std::vector<double> eps;
  std::vector<double> r;       // sup_xi |m_hat - eps^2 (|psi1_hat|^2 - |psi2_hat|^2)|
  std::vector<double> ratios;  // r[i] / r[i+1]
  double t_end = 0.0;
};

// Runs the two-component simulation for each eps with data eps * psi and
// compares m_hat against the quadratic prediction.
EpsilonScalingReport verify_epsilon_expansion(const CubicNonlinearity& N,
                                              const std::vector<Eigen::ArrayXcd>& psi,
                                              const std::vector<double>& eps_list,
                                              const Grid1D& grid, SolverConfig config);

// max over the grid of |alpha_1 alpha_2|
double decoupling_metric(const SimState& state);

struct ScatterState {
  double T = 0.0;
  std::vector<Eigen::ArrayXcd> phi_plus_hat;
};

ScatterState extract_scattering_state(const std::vector<SimState>& snapshots);

struct ReconstructionError {
  std::vector<double> linf_error;  // per component, on the usable window
  double window_fraction = 0.0;    // fraction of grid points compared
};

// L-inf distance between u_j(t,.) and the factorized far-field form
// sqrt(m_j/(i t)) alpha_j(t, m_j x / t) e^{i m_j x^2/(2t)}; t >= 1.
ReconstructionError profile_reconstruction_error(const Simulator& sim, const SimState& state);

}  // namespace dnls::analysis
