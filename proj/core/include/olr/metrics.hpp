#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "olr/data.hpp"
#include "olr/geometry.hpp"
#include "olr/trace.hpp"

namespace olr {

// Offline network-wide least-squares minimizer via the normal equations;
// minimum-norm solution when the covariate stack is singular.
Eigen::VectorXd offline_ls_unconstrained(const DataTensor& data);

// Projected gradient descent on the total loss with step 1/lambda_max,
// iterated until successive iterates move less than tol. Throws after 1e6
// iterations without meeting tol.
Eigen::VectorXd offline_ls_constrained(const DataTensor& data,
                                       const DecisionSet& set,
                                       double tol = 1e-10);

// Cumulative regret series per node against a fixed comparator:
// series[i][t-1] = sum_{tau<=t} sum_j [theta_{j,tau}(x_i(tau)) - theta_{j,tau}(y_star)].
std::vector<std::vector<double>> regret_ls(const RunTrace& trace,
                                           const DataTensor& data,
                                           const Eigen::VectorXd& y_star);

// Cumulative normalized absolute residuals (exactly realizable data, where
// the comparator term vanishes); requires recorded predictors.
std::vector<std::vector<double>> regret_l1(const RunTrace& trace,
                                           const DataTensor& data);

// Running sum of the trace's constraint-violation increments.
std::vector<double> cumulative_violation(const RunTrace& trace);

struct MeanSeries {
  std::vector<double> mean;
  std::vector<double> std_error;
  int trials = 0;
};

// Per-index mean and standard error over independently seeded trials;
// trial k runs with seed derived from (master_seed, k).
MeanSeries expected_over_trials(
    const std::function<std::vector<double>(std::uint64_t)>& experiment,
    int num_trials, std::uint64_t master_seed);

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;  // of log(final) vs log(T)
  double r_squared = 0.0;
  std::vector<double> horizons_used;
};

// Least-squares slope of log(final) against log(T). Points with T < 64 are
// excluded (lower-order terms dominate there); at least four must remain.
// Finals are clamped below at 1e-12 before the log.
ExponentFit fit_exponent(const std::vector<double>& horizons,
                         const std::vector<double>& finals);

// Empirical residual bound max_{i,t} |h_i(t)^T y - z_i(t)|.
double max_abs_residual(const DataTensor& data, const Eigen::VectorXd& y);

// Rows (t, node, value) at 17 significant digits.
void write_series_csv(const std::string& path,
                      const std::vector<std::vector<double>>& per_node_series);

}  // namespace olr
