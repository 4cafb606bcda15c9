#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dnls/nonlin.hpp"
#include "dnls/spectral.hpp"

namespace dnls {

struct GaussianSpec {
  double amplitude = 1.0;
  double center = 0.0;
  double width = 1.0;
  double kshift = 0.0;  // frequency shift e^{i kshift x}
};

struct InitialDataSpec {
  // One entry per component; either a Gaussian or a snapshot file to load.
  std::vector<GaussianSpec> gaussians;
  std::optional<std::string> file;
};

struct FitRequest {
  double t_min = 100.0;
  double t_max = 1e4;
};

struct EpsSweepRequest {
  std::vector<double> eps;
  double t_end = 200.0;
};

struct AnalysisRequest {
  bool classify = true;
  bool lifespan = true;
  std::optional<FitRequest> fit;
  bool m_estimate = false;
  bool decoupling = false;
  std::optional<EpsSweepRequest> eps_sweep;
};

struct ExperimentConfig {
  std::string name = "run";
  nlohmann::json nonlinearity;  // catalog name (string) or inline object
  double epsilon = 0.3;
  InitialDataSpec data;
  Grid1D grid;
  SolverConfig solver;
  int snapshot_count = 50;  // log-spaced output times in [1, t_end]
  std::uint64_t seed = 0;
  AnalysisRequest analysis;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);

// Unscaled profile ψ_j on a grid; u_j(0) = ε ψ_j.
std::vector<Eigen::ArrayXcd> build_initial_profiles(const ExperimentConfig& c);

// Full pipeline: classify → lifespan → simulate → analyze. Returns the process
// exit code (0 ok, 2 validation error, 3 divergence); on failure the directory
// keeps partial outputs plus a FAILED marker.
int run_experiment(const ExperimentConfig& c, const std::filesystem::path& out_dir);

// Post-processing of a persisted run directory (re-reads manifest + snapshots).
int analyze_run(const std::filesystem::path& dir);

// Comparison table across completed run directories. Returns 2 if dirs is empty.
int write_report(const std::vector<std::filesystem::path>& dirs,
                 const std::filesystem::path& out_csv, std::ostream& text);

std::filesystem::path default_out_root();

}  // namespace dnls
