#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dnls/nonlin.hpp"

namespace dnls::profile {

// Per-frequency limit amplitudes A(tau, xi) on tau = log t.
struct SingleProfileState {
  double tau = 0.0;
  Eigen::ArrayXd xi;
  Eigen::ArrayXcd A;
};

// One RK4 step of i dA/dtau = nu(xi) |A|^2 A, independently per xi.
void profile_step_single(SingleProfileState& state, double dtau, const NuPolynomial& nu);

// |A(tau)|^2 = |A0|^2 / (1 - 2 Im nu(xi) |A0|^2 tau); requires Im nu <= 0
// (throws on a pole from Im nu > 0 at large tau).
double closed_form_modulus_sq(const NuPolynomial& nu, double xi, double A0_sq, double tau);

// Moduli-squared pair (P, Q) of the two-component limit ODE
// da1/dtau = -|a2|^2 a1, da2/dtau = -|a1|^2 a2; P - Q is conserved.
std::pair<double, double> two_component_profile(double P0, double Q0, double tau);

// Adaptive-Simpson value of integral |theta|^2 / (1 + (xi-xi0)^2 |theta|^2 tau) dxi
// for theta given by linear interpolation on a grid; tau >= 1.
double s_integral(const Eigen::ArrayXd& xi, const Eigen::ArrayXd& theta_abs, double xi0,
                  double tau);

struct SBoundsReport {
  std::vector<double> taus;
  std::vector<double> s_values;
  std::vector<double> scaled;     // S(tau) sqrt(tau)
  double c_star_empirical = 0.0;  // min of scaled
  double upper_bound = 0.0;       // 4 ||theta||_inf
  bool upper_ok = false;          // scaled <= upper_bound on every tau
  bool monotone = false;          // S non-increasing along taus
};

SBoundsReport s_bounds_check(const Eigen::ArrayXd& xi, const Eigen::ArrayXd& theta_abs, double xi0,
                             const std::vector<double>& taus);

}  // namespace dnls::profile
