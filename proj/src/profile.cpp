#include "dnls/profile.hpp"

#include <cmath>
#include <stdexcept>

namespace dnls::profile {

namespace {

Eigen::ArrayXcd ode_rhs(const Eigen::ArrayXcd& A, const Eigen::ArrayXcd& nu_vals) {
  return std::complex<double>(0.0, -1.0) * nu_vals * A.abs2().cast<std::complex<double>>() * A;
}

}  // namespace

void profile_step_single(SingleProfileState& state, double dtau, const NuPolynomial& nu) {
  if (dtau <= 0.0) throw std::invalid_argument("dtau must be positive");
  if (state.A.size() != state.xi.size()) throw std::invalid_argument("state size mismatch");
  Eigen::ArrayXcd nu_vals(state.xi.size());
  for (Eigen::Index i = 0; i < state.xi.size(); ++i) nu_vals[i] = nu(state.xi[i]);

  const Eigen::ArrayXcd k1 = ode_rhs(state.A, nu_vals);
  const Eigen::ArrayXcd k2 = ode_rhs(state.A + 0.5 * dtau * k1, nu_vals);
  const Eigen::ArrayXcd k3 = ode_rhs(state.A + 0.5 * dtau * k2, nu_vals);
  const Eigen::ArrayXcd k4 = ode_rhs(state.A + dtau * k3, nu_vals);
  state.A += (dtau / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  state.tau += dtau;
  if (!state.A.isFinite().all()) throw std::runtime_error("profile ODE blow-up (non-dissipative)");
}

double closed_form_modulus_sq(const NuPolynomial& nu, double xi, double A0_sq, double tau) {
  const double im = nu.imag_at(xi);
  const double denom = 1.0 - 2.0 * im * A0_sq * tau;
  if (denom <= 0.0) throw std::domain_error("closed form hits a pole (Im nu > 0)");
  return A0_sq / denom;
}

std::pair<double, double> two_component_profile(double P0, double Q0, double tau) {
  if (P0 < 0.0 || Q0 < 0.0) throw std::invalid_argument("moduli squared must be nonnegative");
  const double d = P0 - Q0;
  if (d == 0.0) {
    const double p = P0 / (1.0 + 2.0 * P0 * tau);
    return {p, p};
  }
  // P = d P0 / (P0 - Q0 e^{-2 d tau}), written overflow-safe for either sign of d
  double P;
  if (d > 0.0) {
    P = d * P0 / (P0 - Q0 * std::exp(-2.0 * d * tau));
  } else {
    const double e = std::exp(2.0 * d * tau);  // decays, d < 0
    P = d * P0 * e / (P0 * e - Q0);
  }
  return {P, P - d};
}

namespace {

struct Interp {
  const Eigen::ArrayXd& xi;
  const Eigen::ArrayXd& th;

  double operator()(double x) const {
    if (x <= xi[0]) return th[0];
    const Eigen::Index n = xi.size();
    if (x >= xi[n - 1]) return th[n - 1];
    Eigen::Index lo = 0, hi = n - 1;
    while (hi - lo > 1) {
      const Eigen::Index mid = (lo + hi) / 2;
      (xi[mid] <= x ? lo : hi) = mid;
    }
    const double w = (x - xi[lo]) / (xi[lo + 1] - xi[lo]);
    return th[lo] * (1.0 - w) + th[lo + 1] * w;
  }
};

double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive(const F& f, double a, double m, double b, double fa, double fm, double fb,
                double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(fa, flm, fm, a, m);
  const double right = simpson(fm, frm, fb, m, b);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double s_integral(const Eigen::ArrayXd& xi, const Eigen::ArrayXd& theta_abs, double xi0,
                  double tau) {
  if (tau < 1.0) throw std::invalid_argument("s_integral requires tau >= 1");
  if (xi.size() != theta_abs.size() || xi.size() < 2)
    throw std::invalid_argument("bad theta grid");

  const Interp th{xi, theta_abs};
  const auto f = [&](double x) {
    const double t2 = th(x) * th(x);
    return t2 / (1.0 + (x - xi0) * (x - xi0) * t2 * tau);
  };

  double total = 0.0;
  const double cell_tol = 1e-10 / static_cast<double>(xi.size());
  for (Eigen::Index i = 0; i + 1 < xi.size(); ++i) {
    // tail truncation: skip cells where theta is numerically zero
    if (theta_abs[i] < 1e-8 && theta_abs[i + 1] < 1e-8) continue;
    const double a = xi[i], b = xi[i + 1];
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    total += adaptive(f, a, m, b, fa, fm, fb, simpson(fa, fm, fb, a, b), cell_tol, 30);
  }
  return total;
}

SBoundsReport s_bounds_check(const Eigen::ArrayXd& xi, const Eigen::ArrayXd& theta_abs, double xi0,
                             const std::vector<double>& taus) {
  SBoundsReport rep;
  rep.taus = taus;
  rep.upper_bound = 4.0 * theta_abs.maxCoeff();
  rep.upper_ok = true;
  rep.monotone = true;
  rep.c_star_empirical = std::numeric_limits<double>::infinity();
  double prev = std::numeric_limits<double>::infinity();
  for (double tau : taus) {
    const double s = s_integral(xi, theta_abs, xi0, tau);
    const double scaled = s * std::sqrt(tau);
    rep.s_values.push_back(s);
    rep.scaled.push_back(scaled);
    rep.c_star_empirical = std::min(rep.c_star_empirical, scaled);
    if (scaled > rep.upper_bound + 1e-12) rep.upper_ok = false;
    if (s > prev + 1e-12) rep.monotone = false;
    prev = s;
  }
  return rep;
}

}  // namespace dnls::profile
