#include "dnls/io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace dnls::io {
namespace {

constexpr char kMagic[4] = {'D', 'N', 'L', 'S'};
constexpr std::uint32_t kVersion = 1;

[[noreturn]] void fail(const std::filesystem::path& file, const std::string& what) {
  throw std::runtime_error(file.string() + ": " + what);
}

}  // namespace

void write_snapshot(const std::filesystem::path& file, const SimState& state) {
  std::ofstream os(file, std::ios::binary);
  if (!os) fail(file, "cannot open for writing");

  const std::uint32_t n = static_cast<std::uint32_t>(state.alpha.size());
  const std::uint32_t m = n ? static_cast<std::uint32_t>(state.alpha[0].size()) : 0;

  char header[32] = {};
  std::memcpy(header, kMagic, 4);
  std::memcpy(header + 4, &kVersion, 4);
  std::memcpy(header + 8, &n, 4);
  std::memcpy(header + 12, &m, 4);
  std::memcpy(header + 16, &state.t, 8);
  os.write(header, sizeof(header));

  std::vector<std::complex<float>> row(m);
  for (const auto& a : state.alpha) {
    for (std::uint32_t k = 0; k < m; ++k)
      row[k] = std::complex<float>(static_cast<float>(a[k].real()), static_cast<float>(a[k].imag()));
    os.write(reinterpret_cast<const char*>(row.data()), std::streamsize(m) * 8);
  }
  if (!os) fail(file, "write failed");
}

SimState read_snapshot(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) fail(file, "cannot open");

  char header[32];
  is.read(header, sizeof(header));
  if (!is || std::memcmp(header, kMagic, 4) != 0) fail(file, "bad magic");
  std::uint32_t version, n, m;
  std::memcpy(&version, header + 4, 4);
  std::memcpy(&n, header + 8, 4);
  std::memcpy(&m, header + 12, 4);
  if (version != kVersion) fail(file, "unsupported version");

  SimState state;
  std::memcpy(&state.t, header + 16, 8);
  state.alpha.resize(n);
  std::vector<std::complex<float>> row(m);
  for (std::uint32_t j = 0; j < n; ++j) {
    is.read(reinterpret_cast<char*>(row.data()), std::streamsize(m) * 8);
    if (!is) fail(file, "truncated payload");
    state.alpha[j].resize(m);
    for (std::uint32_t k = 0; k < m; ++k)
      state.alpha[j][k] = std::complex<double>(row[k].real(), row[k].imag());
  }
  return state;
}

void write_norms_csv(const std::filesystem::path& file, const std::vector<Observables>& norms) {
  std::ofstream os(file);
  if (!os) fail(file, "cannot open for writing");
  const std::size_t n = norms.empty() ? 0 : norms.front().l2.size();
  os << "t";
  for (std::size_t j = 0; j < n; ++j) os << ",l2_" << (j + 1);
  for (std::size_t j = 0; j < n; ++j) os << ",linf_" << (j + 1);
  os << ",mass_total,mass_diff,boundary_strip_mass\n";
  os << std::setprecision(17);
  for (const auto& o : norms) {
    os << o.t;
    for (double v : o.l2) os << ',' << v;
    for (double v : o.linf) os << ',' << v;
    os << ',' << o.mass_total << ',' << o.mass_diff << ',' << o.boundary_strip_mass << '\n';
  }
}

void write_m_estimate_csv(const std::filesystem::path& file, const analysis::MEstimate& est,
                          const Eigen::ArrayXd& prediction_sorted) {
  std::ofstream os(file);
  if (!os) fail(file, "cannot open for writing");
  os << "xi,m_large_T,m_prop42,prediction\n" << std::setprecision(17);
  for (Eigen::Index k = 0; k < est.xi.size(); ++k) {
    os << est.xi[k] << ',' << est.m_large_T[k] << ',' << est.m_prop42[k] << ','
       << (k < prediction_sorted.size() ? prediction_sorted[k] : 0.0) << '\n';
  }
}

void write_decoupling_csv(const std::filesystem::path& file, const std::vector<double>& t,
                          const std::vector<double>& metric) {
  std::ofstream os(file);
  if (!os) fail(file, "cannot open for writing");
  os << "t,decoupling\n" << std::setprecision(17);
  for (std::size_t i = 0; i < t.size(); ++i) os << t[i] << ',' << metric[i] << '\n';
}

void write_json(const std::filesystem::path& file, const nlohmann::json& j) {
  std::ofstream os(file);
  if (!os) fail(file, "cannot open for writing");
  os << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) fail(file, "cannot open");
  return nlohmann::json::parse(is);
}

RunData read_run(const std::filesystem::path& dir) {
  RunData data;
  data.manifest = read_json(dir / "manifest.json");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.rfind("alpha_", 0) == 0 && e.path().extension() == ".bin") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) data.snapshots.push_back(read_snapshot(f));
  return data;
}

}  // namespace dnls::io
