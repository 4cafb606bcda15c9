#pragma once

#include <array>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "dnls/rational.hpp"

namespace dnls {

// One factor of a cubic monomial: d_x^l of field k, where k in 1..2n
// addresses (u_1..u_n, conj u_1..conj u_n).
struct Factor {
  int k = 1;
  int l = 0;
  friend auto operator<=>(const Factor&, const Factor&) = default;
};

using FactorTriple = std::array<Factor, 3>;

FactorTriple sorted_triple(FactorTriple f);

struct RawTerm {
  int component = 1;  // j in 1..n
  FactorTriple factors{};
  Coefficient coeff;
};

using TermKey = std::pair<int, FactorTriple>;
using TermMap = std::map<TermKey, Coefficient>;

// Canonical form of a cubic derivative nonlinearity N = (N_j): merged,
// lexicographically ordered monomials with nonzero coefficients, plus the
// component masses m_j. Immutable after construction.
class CubicNonlinearity {
 public:
  CubicNonlinearity(int n, std::vector<double> masses, const std::vector<RawTerm>& raw_terms);

  int components() const { return n_; }
  const std::vector<double>& masses() const { return masses_; }
  double mass(int j) const { return masses_.at(static_cast<std::size_t>(j - 1)); }

  // m-tilde: m_k for k<=n, -m_{k-n} for k>n
  double mass_tilde(int k) const { return k <= n_ ? mass(k) : -mass(k - n_); }

  const TermMap& terms() const { return terms_; }

 private:
  int n_;
  std::vector<double> masses_;
  TermMap terms_;
};

// Degree-<=3 complex polynomial nu(xi) = sum c_d xi^d.
struct NuPolynomial {
  std::array<Coefficient, 4> c{};

  std::complex<double> operator()(double xi) const;
  double imag_at(double xi) const;
  bool exact() const;

  // nu(xi - a): exact when a and the coefficients are
  NuPolynomial translated(const Rational& a) const;
};

// Condition (weak_gi) for n = 1: derivative-free monomials of net winding
// other than +1 are absent.
bool is_gauge_invariant(const CubicNonlinearity& N);

// Residue extraction of the unit-circle contour integral; n = 1, m_1 = 1 only.
NuPolynomial nu_polynomial(const CubicNonlinearity& N);

// p_j(xi; Y) with factors (i m~_k xi)^l Y~_k, Y~ = (Y, conj Y).
Eigen::VectorXcd p_eval(const CubicNonlinearity& N, double xi, const Eigen::VectorXcd& Y);

// Direct evaluation of N at scalar field values (u, d_x u) per component.
Eigen::VectorXcd evaluate_terms(const CubicNonlinearity& N, const Eigen::VectorXcd& u,
                                const Eigen::VectorXcd& ux);

std::vector<std::string> catalog_names();
const CubicNonlinearity& catalog(const std::string& name);

CubicNonlinearity nonlinearity_from_json(const nlohmann::json& j);
nlohmann::json nonlinearity_to_json(const CubicNonlinearity& N);

// Catalog name or a JSON object / path handled by the caller.
CubicNonlinearity resolve_nonlinearity(const nlohmann::json& name_or_object);

}  // namespace dnls
