#include "dnls/nonlin.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace dnls {

FactorTriple sorted_triple(FactorTriple f) {
  std::sort(f.begin(), f.end());
  return f;
}

CubicNonlinearity::CubicNonlinearity(int n, std::vector<double> masses,
                                     const std::vector<RawTerm>& raw_terms)
    : n_(n), masses_(std::move(masses)) {
  if (n_ < 1) throw std::invalid_argument("component count must be positive");
  if (static_cast<int>(masses_.size()) != n_)
    throw std::invalid_argument("masses size inconsistent with component count");
  for (double m : masses_)
    if (m == 0.0) throw std::invalid_argument("masses must be nonzero");

  for (const RawTerm& t : raw_terms) {
    if (t.component < 1 || t.component > n_)
      throw std::invalid_argument("component index out of range");
    for (const Factor& f : t.factors) {
      if (f.k < 1 || f.k > 2 * n_) throw std::invalid_argument("factor index out of range");
      if (f.l != 0 && f.l != 1) throw std::invalid_argument("derivative order must be 0 or 1");
    }
    const TermKey key{t.component, sorted_triple(t.factors)};
    auto it = terms_.find(key);
    if (it == terms_.end())
      terms_.emplace(key, t.coeff);
    else
      it->second = it->second + t.coeff;
  }
  std::erase_if(terms_, [](const auto& kv) { return kv.second.is_zero(); });
}

std::complex<double> NuPolynomial::operator()(double xi) const {
  std::complex<double> v{0.0, 0.0};
  double p = 1.0;
  for (const Coefficient& cd : c) {
    v += cd.value() * p;
    p *= xi;
  }
  return v;
}

double NuPolynomial::imag_at(double xi) const { return (*this)(xi).imag(); }

bool NuPolynomial::exact() const {
  return std::all_of(c.begin(), c.end(), [](const Coefficient& x) { return x.exact(); });
}

NuPolynomial NuPolynomial::translated(const Rational& a) const {
  // c'_d = sum_{e>=d} c_e binom(e,d) (-a)^{e-d}
  static constexpr int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  const Rational na = rat_neg(a);
  std::array<Coefficient, 4> pow_na;
  pow_na[0] = Coefficient(Rational{1, 1}, Rational{0, 1});
  for (int i = 1; i < 4; ++i) pow_na[i] = pow_na[i - 1].times(na);

  NuPolynomial out;
  for (int d = 0; d < 4; ++d) {
    Coefficient acc;
    for (int e = d; e < 4; ++e)
      acc = acc + (c[e] * pow_na[e - d]).times(Rational{binom[e][d], 1});
    out.c[d] = acc;
  }
  return out;
}

namespace {

int winding(const FactorTriple& f, int n) {
  int w = 0;
  for (const Factor& x : f) w += x.k <= n ? 1 : -1;
  return w;
}

bool derivative_free(const FactorTriple& f) {
  return std::all_of(f.begin(), f.end(), [](const Factor& x) { return x.l == 0; });
}

}  // namespace

bool is_gauge_invariant(const CubicNonlinearity& N) {
  if (N.components() != 1)
    throw std::invalid_argument("is_gauge_invariant is defined for single equations");
  for (const auto& [key, coeff] : N.terms()) {
    const FactorTriple& f = key.second;
    if (derivative_free(f) && winding(f, 1) != 1 && !coeff.is_zero()) return false;
  }
  return true;
}

NuPolynomial nu_polynomial(const CubicNonlinearity& N) {
  if (N.components() != 1) throw std::invalid_argument("nu is defined for single equations");
  if (N.mass(1) != 1.0)
    throw std::invalid_argument("nu is defined for mass 1 only (general mass not supported)");

  NuPolynomial nu;
  for (const auto& [key, coeff] : N.terms()) {
    const FactorTriple& f = key.second;
    if (winding(f, 1) != 1) continue;  // residue at z^1 only
    Coefficient contrib = coeff;
    int deg = 0;
    for (const Factor& x : f) {
      if (x.l == 1) {
        contrib = x.k == 1 ? contrib.times_i() : contrib.times_minus_i();
        ++deg;
      }
    }
    nu.c[static_cast<std::size_t>(deg)] = nu.c[static_cast<std::size_t>(deg)] + contrib;
  }
  return nu;
}

Eigen::VectorXcd p_eval(const CubicNonlinearity& N, double xi, const Eigen::VectorXcd& Y) {
  const int n = N.components();
  if (Y.size() != n) throw std::invalid_argument("Y dimension mismatch");

  Eigen::VectorXcd yt(2 * n);
  yt.head(n) = Y;
  yt.tail(n) = Y.conjugate();

  Eigen::VectorXcd p = Eigen::VectorXcd::Zero(n);
  for (const auto& [key, coeff] : N.terms()) {
    std::complex<double> v = coeff.value();
    for (const Factor& f : key.second) {
      std::complex<double> fac = yt[f.k - 1];
      if (f.l == 1) fac *= std::complex<double>(0.0, N.mass_tilde(f.k) * xi);
      v *= fac;
    }
    p[key.first - 1] += v;
  }
  return p;
}

Eigen::VectorXcd evaluate_terms(const CubicNonlinearity& N, const Eigen::VectorXcd& u,
                                const Eigen::VectorXcd& ux) {
  const int n = N.components();
  if (u.size() != n || ux.size() != n) throw std::invalid_argument("field dimension mismatch");

  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  for (const auto& [key, coeff] : N.terms()) {
    std::complex<double> v = coeff.value();
    for (const Factor& f : key.second) {
      const int base = f.k <= n ? f.k - 1 : f.k - n - 1;
      std::complex<double> field = f.l == 0 ? u[base] : ux[base];
      if (f.k > n) field = std::conj(field);
      v *= field;
    }
    out[key.first - 1] += v;
  }
  return out;
}

namespace {

Coefficient rc(std::int64_t re_n, std::int64_t re_d, std::int64_t im_n, std::int64_t im_d) {
  return Coefficient(Rational::of(re_n, re_d), Rational::of(im_n, im_d));
}

std::map<std::string, CubicNonlinearity> build_catalog() {
  std::map<std::string, CubicNonlinearity> cat;
  const Coefficient minus_i = rc(0, 1, -1, 1);
  const Coefficient plus_i = rc(0, 1, 1, 1);
  const Coefficient one = rc(1, 1, 0, 1);

  // N = -i|u|^2 u
  cat.emplace("kita_dissipative",
              CubicNonlinearity(1, {1.0}, {{1, {{{1, 0}, {1, 0}, {2, 0}}}, minus_i}}));
  // N = |u|^2 u
  cat.emplace("cubic_conservative",
              CubicNonlinearity(1, {1.0}, {{1, {{{1, 0}, {1, 0}, {2, 0}}}, one}}));
  // N = -i|d_x u|^2 u
  cat.emplace("weak_grad",
              CubicNonlinearity(1, {1.0}, {{1, {{{1, 0}, {1, 1}, {2, 1}}}, minus_i}}));
  // N = i|u|^2 d_x u
  cat.emplace("grad_transport",
              CubicNonlinearity(1, {1.0}, {{1, {{{1, 0}, {1, 1}, {2, 0}}}, plus_i}}));
  // N_1 = -i|u_2|^2 u_1, N_2 = -i|u_1|^2 u_2
  cat.emplace("two_component_lnss",
              CubicNonlinearity(2, {1.0, 1.0},
                                {{1, {{{1, 0}, {2, 0}, {4, 0}}}, minus_i},
                                 {2, {{{1, 0}, {2, 0}, {3, 0}}}, minus_i}}));
  return cat;
}

const std::map<std::string, CubicNonlinearity>& catalog_map() {
  static const std::map<std::string, CubicNonlinearity> cat = build_catalog();
  return cat;
}

}  // namespace

std::vector<std::string> catalog_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : catalog_map()) names.push_back(name);
  return names;
}

const CubicNonlinearity& catalog(const std::string& name) {
  const auto& cat = catalog_map();
  auto it = cat.find(name);
  if (it == cat.end()) throw std::invalid_argument("unknown catalog nonlinearity: " + name);
  return it->second;
}

CubicNonlinearity nonlinearity_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  const auto masses = j.at("masses").get<std::vector<double>>();
  std::vector<RawTerm> raw;
  for (const auto& t : j.at("terms")) {
    RawTerm rt;
    rt.component = t.at("component").get<int>();
    const auto& fs = t.at("factors");
    if (fs.size() != 3) throw std::invalid_argument("term must have exactly three factors");
    for (int i = 0; i < 3; ++i) {
      rt.factors[static_cast<std::size_t>(i)] = {fs[static_cast<std::size_t>(i)][0].get<int>(),
                                                 fs[static_cast<std::size_t>(i)][1].get<int>()};
    }
    const auto& cv = t.at("coeff");
    rt.coeff = Coefficient::detect({cv[0].get<double>(), cv[1].get<double>()});
    raw.push_back(rt);
  }
  return CubicNonlinearity(n, masses, raw);
}

nlohmann::json nonlinearity_to_json(const CubicNonlinearity& N) {
  nlohmann::json j;
  j["n"] = N.components();
  j["masses"] = N.masses();
  j["terms"] = nlohmann::json::array();
  for (const auto& [key, coeff] : N.terms()) {
    nlohmann::json t;
    t["component"] = key.first;
    t["factors"] = {{key.second[0].k, key.second[0].l},
                    {key.second[1].k, key.second[1].l},
                    {key.second[2].k, key.second[2].l}};
    t["coeff"] = {coeff.value().real(), coeff.value().imag()};
    j["terms"].push_back(t);
  }
  return j;
}

CubicNonlinearity resolve_nonlinearity(const nlohmann::json& name_or_object) {
  if (name_or_object.is_string()) return catalog(name_or_object.get<std::string>());
  return nonlinearity_from_json(name_or_object);
}

}  // namespace dnls
