#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dnls/analysis.hpp"
#include "dnls/spectral.hpp"

namespace dnls::io {

// alpha_XXXX.bin: 32-byte header (magic "DNLS", version, n, M, t, pad),
// then n contiguous arrays of M little-endian complex64 values in FFT
// frequency order.
void write_snapshot(const std::filesystem::path& file, const SimState& state);
SimState read_snapshot(const std::filesystem::path& file);

void write_norms_csv(const std::filesystem::path& file, const std::vector<Observables>& norms);

void write_m_estimate_csv(const std::filesystem::path& file, const analysis::MEstimate& est,
                          const Eigen::ArrayXd& prediction_sorted);

void write_decoupling_csv(const std::filesystem::path& file, const std::vector<double>& t,
                          const std::vector<double>& metric);

void write_json(const std::filesystem::path& file, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& file);

// Re-reads a persisted run directory (manifest + snapshots).
struct RunData {
  nlohmann::json manifest;
  std::vector<SimState> snapshots;
};
RunData read_run(const std::filesystem::path& dir);

}  // namespace dnls::io
