#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "olr/data.hpp"
#include "olr/graph.hpp"
#include "olr/metrics.hpp"
#include "olr/protocol.hpp"

namespace olr {

struct GraphSpec {
  GraphFamily family = GraphFamily::Path;
  int n = 2;
  double radius = 0.5;                 // random_geometric
  int k = 2;                           // random_regular
  std::optional<std::uint64_t> seed;   // defaults to a lane of master_seed
};

struct DataSpec {
  DataMode mode = DataMode::Oblivious;
  int m = 1;
  double alpha_h = 1.0;
  double alpha_z = 1.0;
  double sigma_noise = 0.0;
  std::optional<Eigen::VectorXd> y_star;  // exact mode; drawn when absent
  double y_star_radius = 1.0;
};

struct AlgoSpec {
  Variant variant = Variant::Fif;
  double beta = 0.75;
  double gamma = 0.5;
  double kappa = 1.0;
  // kappa = kappa_margin * 2 n m^2 alpha_h / (n - alpha_h) when set
  std::optional<double> kappa_margin;
  double c = 2.0;
  double ball_radius = 1.0;
  double inner_radius = 1.0;
  std::vector<Eigen::VectorXd> constraints;  // explicit half-space normals
  int constraint_count = 0;                  // or drawn as random unit vectors
  std::uint64_t constraint_seed = 0;
};

struct ExperimentConfig {
  GraphSpec graph;
  DataSpec data;
  AlgoSpec algo;
  std::vector<int> horizons;
  int trials = 1;
  std::uint64_t master_seed = 0;
  std::string out_prefix = "out/run";
  std::optional<bool> record_predictors;  // default: exact mode only
  bool write_traces = true;               // finals/summary always written

  std::string to_json_text() const;
};

ExperimentConfig config_from_json_text(const std::string& text);

// Applies repeatable KEY=VALUE overrides with dotted paths
// (e.g. "algo.beta=0.5") to a JSON config document.
std::string apply_overrides(const std::string& config_text,
                            const std::vector<std::string>& sets);

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
  bool ok() const { return violations.empty(); }
};

// Checks every parameter hypothesis, graph connectivity, and dimension
// consistency for all configured horizons. Never runs an experiment.
ValidationReport cmd_validate(const ExperimentConfig& config);

struct RunArtifacts {
  std::vector<std::string> trace_files;
  std::string finals_file;
  std::string summary_file;
};

// For each (horizon, trial) cell: generates data, builds the graph and
// weights, runs, computes metrics, and writes one trace CSV per cell plus
// a finals table and a summary JSON. Cells execute on a small work pool;
// outputs are identical for any thread count.
RunArtifacts cmd_run(const ExperimentConfig& config, int threads = 1);

// Cartesian run over values of one dotted config path with shared seeds.
// Returns the path of the sweep summary table.
std::string cmd_sweep(const ExperimentConfig& config,
                      const std::string& dotted_path,
                      const std::vector<std::string>& values,
                      int threads = 1);

struct FitSummary {
  double final = 0.0;      // trial mean at the largest horizon
  double slope = 0.0;
  double r_squared = 0.0;
  double std_error = 0.0;  // standard error of the trial mean at the largest horizon
  std::string to_json() const;
};

// Re-fits a scaling exponent from an existing finals table.
FitSummary cmd_fit(const std::string& finals_csv, const std::string& metric);

}  // namespace olr
