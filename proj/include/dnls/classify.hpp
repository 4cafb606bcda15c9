#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dnls/nonlin.hpp"

namespace dnls {

enum class DissTag { NotA, A0, APlus, Weak };

std::string to_string(DissTag tag);

struct DissipativityClass {
  DissTag tag = DissTag::A0;
  double sup_im_nu = 0.0;  // APlus: global max of Im nu (< 0)
  double c0 = 0.0;         // Weak: Im nu = -c0 (xi - xi0)^2
  double xi0 = 0.0;
  bool tolerance_based = false;  // decided with float tolerances, not exactly
};

// Exact trichotomy decision on q(xi) = Im nu(xi), degree <= 3. Float
// coefficients fall back to a relative zero tolerance on normalized
// coefficients and the result is flagged tolerance_based.
DissipativityClass classify_single(const NuPolynomial& nu, double zero_tol = 1e-12);

struct MassResonanceViolation {
  TermKey term;
  double mass_sum;  // m~_{k1} + m~_{k2} + m~_{k3}
};

// Condition (a): every stored monomial must satisfy m_j = sum of m-tilde.
std::vector<MassResonanceViolation> check_mass_resonance(const CubicNonlinearity& N);

enum class HermitianLevel { b0, b1, b2, b3 };

HermitianLevel hermitian_level_from_string(const std::string& s);
std::string to_string(HermitianLevel level);

struct HermitianWitness {
  double xi;
  Eigen::VectorXcd Y;
};

struct HermitianVerdict {
  HermitianLevel level = HermitianLevel::b0;
  bool holds_on_samples = false;
  double min_margin = 0.0;  // -max over samples of the tested quantity
  std::optional<HermitianWitness> witness;
  double constant = 0.0;  // empirical C_* (b1) or C_** (b2)
  std::uint64_t seed = 0;
};

// Sampled check of Im<p(xi;Y), HY> <= 0 / -C|Y|^4 / -C<xi>^2|Y|^4, or the
// exact coefficient-wise p == 0 test for b3. Y is restricted to the unit
// sphere (structured samples plus seeded random ones).
HermitianVerdict check_hermitian_condition(const CubicNonlinearity& N, const Eigen::MatrixXcd& H,
                                           HermitianLevel level,
                                           const std::vector<double>& xi_samples, int y_samples,
                                           std::uint64_t seed);

std::vector<double> default_xi_samples(HermitianLevel level);

struct LifespanBound {
  double bound = std::numeric_limits<double>::infinity();
  double argmax_xi = 0.0;  // meaningful when the bound is finite
};

// Grid supremum of |psi_hat|^2 Im nu; bound = 1/(2 sup) with 1/0 = +inf.
LifespanBound lifespan_bound(const NuPolynomial& nu, const Eigen::ArrayXd& xi,
                             const Eigen::ArrayXcd& psi_hat);

}  // namespace dnls
