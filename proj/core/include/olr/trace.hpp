#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace olr {

// Per-round record of one run: every node's predictor (optional), the
// network-wide loss of each node's predictor against all nodes' samples,
// the disagreement sum_i ||x_i(t) - x_avg(t)||, and the constraint
// violation increment sum_i sum_q [k_q^T x_i(t)]_+.
struct RunTrace {
  int nodes = 0;
  int dim = 0;
  int horizon = 0;
  std::string params_json;

  std::vector<std::vector<Eigen::VectorXd>> predictors;  // [t-1][i]; empty when suppressed
  std::vector<std::vector<double>> network_loss;         // [t-1][i]
  std::vector<double> disagreement;                      // [t-1]
  std::vector<double> cv_increment;                      // [t-1]

  bool has_predictors() const { return !predictors.empty(); }

  // Rows (t, i, x_1..x_m, network_loss, disagreement, cv_increment) at 17
  // significant digits; the params snapshot goes to a sidecar JSON file.
  // Suppressed predictors are written as nan.
  void write_csv(const std::string& csv_path,
                 const std::string& params_path) const;
};

}  // namespace olr
