#include "dnls/classify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace dnls {

std::string to_string(DissTag tag) {
  switch (tag) {
    case DissTag::NotA: return "NotA";
    case DissTag::A0: return "A0";
    case DissTag::APlus: return "APlus";
    case DissTag::Weak: return "Weak";
  }
  return "?";
}

namespace {

DissipativityClass classify_exact(const std::array<Rational, 4>& q) {
  DissipativityClass out;
  const Rational &q0 = q[0], &q1 = q[1], &q2 = q[2], &q3 = q[3];

  if (!q3.is_zero()) {
    out.tag = DissTag::NotA;  // odd leading term takes positive values
    return out;
  }
  if (q2.is_zero()) {
    if (!q1.is_zero()) {
      out.tag = DissTag::NotA;
      return out;
    }
    if (q0.is_zero()) {
      out.tag = DissTag::A0;
    } else if (q0.sign() > 0) {
      out.tag = DissTag::NotA;
    } else {
      out.tag = DissTag::APlus;
      out.sup_im_nu = q0.value();
    }
    return out;
  }
  if (q2.sign() > 0) {
    out.tag = DissTag::NotA;
    return out;
  }
  // q2 < 0: parabola opening downward; vertex value q0 - q1^2/(4 q2)
  const auto q1sq = rat_mul(q1, q1);
  const auto q2q0 = rat_mul(q2, q0);
  if (!q1sq || !q2q0) throw std::overflow_error("rational overflow");
  const auto four_q2q0 = rat_mul(Rational::of(4), *q2q0);
  if (!four_q2q0) throw std::overflow_error("rational overflow");
  const auto disc = rat_sub(*q1sq, *four_q2q0);
  if (!disc) throw std::overflow_error("rational overflow");
  const int ds = disc->sign();
  if (ds > 0) {
    out.tag = DissTag::NotA;  // positive between the real roots
  } else if (ds == 0) {
    out.tag = DissTag::Weak;
    out.c0 = -q2.value();
    const auto xi0 = rat_div(rat_neg(q1), *rat_mul(Rational::of(2), q2));
    if (!xi0) throw std::overflow_error("rational overflow");
    out.xi0 = xi0->value();
  } else {
    out.tag = DissTag::APlus;
    const auto vertex = rat_sub(q0, *rat_div(*q1sq, *rat_mul(Rational::of(4), q2)));
    if (!vertex) throw std::overflow_error("rational overflow");
    out.sup_im_nu = vertex->value();
  }
  return out;
}

DissipativityClass classify_float(std::array<double, 4> q, double tol) {
  DissipativityClass out;
  out.tolerance_based = true;
  double scale = 0.0;
  for (double v : q) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) {
    out.tag = DissTag::A0;
    return out;
  }
  for (double& v : q)
    if (std::abs(v) <= tol * scale) v = 0.0;

  if (q[3] != 0.0) {
    out.tag = DissTag::NotA;
    return out;
  }
  if (q[2] == 0.0) {
    if (q[1] != 0.0) {
      out.tag = DissTag::NotA;
    } else if (q[0] == 0.0) {
      out.tag = DissTag::A0;
    } else if (q[0] > 0.0) {
      out.tag = DissTag::NotA;
    } else {
      out.tag = DissTag::APlus;
      out.sup_im_nu = q[0];
    }
    return out;
  }
  if (q[2] > 0.0) {
    out.tag = DissTag::NotA;
    return out;
  }
  const double disc = q[1] * q[1] - 4.0 * q[2] * q[0];
  const double disc_scale = std::max(q[1] * q[1], std::abs(4.0 * q[2] * q[0]));
  if (std::abs(disc) <= tol * std::max(disc_scale, scale * scale)) {
    out.tag = DissTag::Weak;
    out.c0 = -q[2];
    out.xi0 = -q[1] / (2.0 * q[2]);
  } else if (disc > 0.0) {
    out.tag = DissTag::NotA;
  } else {
    out.tag = DissTag::APlus;
    out.sup_im_nu = q[0] - q[1] * q[1] / (4.0 * q[2]);
  }
  return out;
}

}  // namespace

DissipativityClass classify_single(const NuPolynomial& nu, double zero_tol) {
  if (nu.exact()) {
    std::array<Rational, 4> q;
    for (int d = 0; d < 4; ++d) q[static_cast<std::size_t>(d)] = nu.c[static_cast<std::size_t>(d)].im_rat();
    try {
      return classify_exact(q);
    } catch (const std::overflow_error&) {
      // fall through to the float path
    }
  }
  std::array<double, 4> q{};
  for (int d = 0; d < 4; ++d) q[static_cast<std::size_t>(d)] = nu.c[static_cast<std::size_t>(d)].value().imag();
  return classify_float(q, zero_tol);
}

std::vector<MassResonanceViolation> check_mass_resonance(const CubicNonlinearity& N) {
  std::vector<MassResonanceViolation> violations;
  for (const auto& [key, coeff] : N.terms()) {
    double sum = 0.0;
    for (const Factor& f : key.second) sum += N.mass_tilde(f.k);
    const double mj = N.mass(key.first);
    if (std::abs(mj - sum) > 1e-12 * std::max(1.0, std::abs(mj)))
      violations.push_back({key, sum});
  }
  return violations;
}

HermitianLevel hermitian_level_from_string(const std::string& s) {
  if (s == "b0") return HermitianLevel::b0;
  if (s == "b1") return HermitianLevel::b1;
  if (s == "b2") return HermitianLevel::b2;
  if (s == "b3") return HermitianLevel::b3;
  throw std::invalid_argument("unknown hermitian level: " + s);
}

std::string to_string(HermitianLevel level) {
  switch (level) {
    case HermitianLevel::b0: return "b0";
    case HermitianLevel::b1: return "b1";
    case HermitianLevel::b2: return "b2";
    case HermitianLevel::b3: return "b3";
  }
  return "?";
}

std::vector<double> default_xi_samples(HermitianLevel level) {
  std::vector<double> xs;
  const int m = 64;
  for (int i = 0; i < m; ++i) {
    // Chebyshev points on [-20, 20]
    xs.push_back(20.0 * std::cos(M_PI * (2.0 * i + 1.0) / (2.0 * m)));
  }
  xs.push_back(0.0);  // Chebyshev nodes miss the origin, a common vertex
  if (level == HermitianLevel::b2) {
    xs.push_back(-1000.0);
    xs.push_back(1000.0);
  }
  return xs;
}

namespace {

// p == 0 as a polynomial identity: bucket by (component, multiset of field
// indices) and collect the xi-polynomial coefficients.
bool p_identically_zero(const CubicNonlinearity& N) {
  std::map<std::pair<int, std::array<int, 3>>, std::array<std::complex<double>, 4>> buckets;
  for (const auto& [key, coeff] : N.terms()) {
    std::array<int, 3> ks{key.second[0].k, key.second[1].k, key.second[2].k};
    std::sort(ks.begin(), ks.end());
    std::complex<double> v = coeff.value();
    int deg = 0;
    for (const Factor& f : key.second) {
      if (f.l == 1) {
        v *= std::complex<double>(0.0, N.mass_tilde(f.k));
        ++deg;
      }
    }
    buckets[{key.first, ks}][static_cast<std::size_t>(deg)] += v;
  }
  for (const auto& [_, poly] : buckets)
    for (const auto& cd : poly)
      if (std::abs(cd) > 1e-14) return false;
  return true;
}

}  // namespace

HermitianVerdict check_hermitian_condition(const CubicNonlinearity& N, const Eigen::MatrixXcd& H,
                                           HermitianLevel level,
                                           const std::vector<double>& xi_samples, int y_samples,
                                           std::uint64_t seed) {
  const int n = N.components();
  if (H.rows() != n || H.cols() != n) throw std::invalid_argument("H dimension mismatch");
  if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, H.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("H is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("H is not positive definite");

  HermitianVerdict out;
  out.level = level;
  out.seed = seed;

  if (level == HermitianLevel::b3) {
    out.holds_on_samples = p_identically_zero(N);
    out.min_margin = out.holds_on_samples ? 0.0 : -1.0;
    return out;
  }
  if (xi_samples.empty()) throw std::invalid_argument("xi sample set is empty");

  // structured unit-sphere samples: coordinate vectors, equal-modulus phases
  std::vector<Eigen::VectorXcd> ys;
  for (int j = 0; j < n; ++j) ys.push_back(Eigen::VectorXcd::Unit(n, j));
  if (n > 1) {
    for (int ph = 0; ph < 8; ++ph) {
      Eigen::VectorXcd y(n);
      for (int j = 0; j < n; ++j)
        y[j] = std::polar(1.0 / std::sqrt(double(n)), 2.0 * M_PI * ph * j / 8.0);
      ys.push_back(y);
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (static_cast<int>(ys.size()) < y_samples) {
    Eigen::VectorXcd y(n);
    for (int j = 0; j < n; ++j) y[j] = std::complex<double>(gauss(rng), gauss(rng));
    const double norm = y.norm();
    if (norm < 1e-8) continue;
    ys.push_back(y / norm);
  }

  double worst = -std::numeric_limits<double>::infinity();
  HermitianWitness worst_at{0.0, Eigen::VectorXcd()};
  for (double xi : xi_samples) {
    const double weight = level == HermitianLevel::b2 ? 1.0 / (1.0 + xi * xi) : 1.0;
    for (const auto& y : ys) {
      const Eigen::VectorXcd p = p_eval(N, xi, y);
      // Im <p, HY> with <z,w> = sum z_j conj(w_j); |Y| = 1 on the sphere
      const double g = ((H * y).adjoint() * p).value().imag();
      const double tested = g * weight;
      if (tested > worst) {
        worst = tested;
        worst_at = {xi, y};
      }
    }
  }

  out.min_margin = -worst;
  const double tol = 1e-12;
  switch (level) {
    case HermitianLevel::b0:
      out.holds_on_samples = worst <= tol;
      break;
    case HermitianLevel::b1:
    case HermitianLevel::b2:
      out.holds_on_samples = worst < -tol;
      out.constant = -worst;
      break;
    case HermitianLevel::b3:
      break;
  }
  if (!out.holds_on_samples) out.witness = worst_at;
  return out;
}

LifespanBound lifespan_bound(const NuPolynomial& nu, const Eigen::ArrayXd& xi,
                             const Eigen::ArrayXcd& psi_hat) {
  if (xi.size() == 0 || xi.size() != psi_hat.size())
    throw std::invalid_argument("empty or mismatched grid");
  LifespanBound out;
  double best = 0.0;
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    const double v = std::norm(psi_hat[i]) * nu.imag_at(xi[i]);
    if (v > best) {
      best = v;
      out.argmax_xi = xi[i];
    }
  }
  if (best > 0.0) out.bound = 1.0 / (2.0 * best);
  return out;
}

}  // namespace dnls
