#include "olr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "olr/loss.hpp"
#include "olr/rng.hpp"

namespace olr {

namespace {

struct NormalEquations {
  Eigen::MatrixXd a;  // sum h h^T
  Eigen::VectorXd b;  // sum h z
};

NormalEquations accumulate(const DataTensor& data) {
  const int m = data.dim();
  NormalEquations ne{Eigen::MatrixXd::Zero(m, m), Eigen::VectorXd::Zero(m)};
  for (int t = 1; t <= data.horizon(); ++t) {
    for (int i = 0; i < data.nodes(); ++i) {
      const Sample& s = data.sample(i, t);
      ne.a.selfadjointView<Eigen::Lower>().rankUpdate(s.h);
      ne.b += s.h * s.z;
    }
  }
  ne.a = ne.a.selfadjointView<Eigen::Lower>();
  return ne;
}

}  // namespace

Eigen::VectorXd offline_ls_unconstrained(const DataTensor& data) {
  NormalEquations ne = accumulate(data);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(ne.a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  return svd.solve(ne.b);  // minimum-norm solution when singular
}

Eigen::VectorXd offline_ls_constrained(const DataTensor& data,
                                       const DecisionSet& set, double tol) {
  NormalEquations ne = accumulate(data);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ne.a);
  const double lmax = eig.eigenvalues().maxCoeff();
  Eigen::VectorXd y = set.project(Eigen::VectorXd::Zero(data.dim()));
  if (lmax <= 1e-300) return y;  // all covariates vanish; any feasible point
  const double step = 1.0 / lmax;
  for (long it = 0; it < 1000000; ++it) {
    Eigen::VectorXd next = set.project(y - step * (ne.a * y - ne.b));
    if ((next - y).norm() < tol) return next;
    y = std::move(next);
  }
  throw std::runtime_error("offline_ls_constrained: iteration cap exceeded");
}

std::vector<std::vector<double>> regret_ls(const RunTrace& trace,
                                           const DataTensor& data,
                                           const Eigen::VectorXd& y_star) {
  const int n = trace.nodes, T = trace.horizon;
  if (data.nodes() != n || data.horizon() < T)
    throw std::invalid_argument("regret_ls: trace/data shape mismatch");
  if (y_star.size() != data.dim())
    throw std::invalid_argument("regret_ls: comparator dimension mismatch");
  std::vector<std::vector<double>> series(n, std::vector<double>(T, 0.0));
  std::vector<double> cumulative(n, 0.0);
  for (int t = 1; t <= T; ++t) {
    double offline = 0.0;
    for (int j = 0; j < n; ++j) {
      const Sample& s = data.sample(j, t);
      offline += loss(LossPoint{s.h, s.z}, y_star);
    }
    for (int i = 0; i < n; ++i) {
      cumulative[i] += trace.network_loss[t - 1][i] - offline;
      series[i][t - 1] = cumulative[i];
    }
  }
  return series;
}

std::vector<std::vector<double>> regret_l1(const RunTrace& trace,
                                           const DataTensor& data) {
  const int n = trace.nodes, T = trace.horizon;
  if (!trace.has_predictors())
    throw std::invalid_argument("regret_l1: recorded predictors required");
  if (data.meta().mode != DataMode::Exact)
    throw std::invalid_argument("regret_l1: exact-mode data required");
  std::vector<std::vector<double>> series(n, std::vector<double>(T, 0.0));
  std::vector<double> cumulative(n, 0.0);
  for (int t = 1; t <= T; ++t) {
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd& x = trace.predictors[t - 1][i];
      for (int j = 0; j < n; ++j) {
        const Sample& s = data.sample(j, t);
        double norm = s.h.norm();
        if (norm < 1e-12)
          throw std::invalid_argument("regret_l1: zero-norm covariate");
        cumulative[i] += std::abs(s.h.dot(x) - s.z) / norm;
      }
      series[i][t - 1] = cumulative[i];
    }
  }
  return series;
}

std::vector<double> cumulative_violation(const RunTrace& trace) {
  std::vector<double> series(trace.horizon, 0.0);
  double acc = 0.0;
  for (int t = 0; t < trace.horizon; ++t) {
    acc += trace.cv_increment[t];
    series[t] = acc;
  }
  return series;
}

MeanSeries expected_over_trials(
    const std::function<std::vector<double>(std::uint64_t)>& experiment,
    int num_trials, std::uint64_t master_seed) {
  if (num_trials < 2)
    throw std::invalid_argument("expected_over_trials: num_trials >= 2");
  std::vector<std::vector<double>> rows(num_trials);
  for (int k = 0; k < num_trials; ++k)
    rows[k] = experiment(derive_seed(master_seed, static_cast<std::uint64_t>(k)));
  const std::size_t len = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != len)
      throw std::invalid_argument("expected_over_trials: ragged series");
  MeanSeries out;
  out.trials = num_trials;
  out.mean.assign(len, 0.0);
  out.std_error.assign(len, 0.0);
  for (std::size_t j = 0; j < len; ++j) {
    double mean = 0.0;
    for (const auto& r : rows) mean += r[j];
    mean /= num_trials;
    double var = 0.0;
    for (const auto& r : rows) var += (r[j] - mean) * (r[j] - mean);
    var /= (num_trials - 1);
    out.mean[j] = mean;
    out.std_error[j] = std::sqrt(var / num_trials);
  }
  return out;
}

ExponentFit fit_exponent(const std::vector<double>& horizons,
                         const std::vector<double>& finals) {
  if (horizons.size() != finals.size())
    throw std::invalid_argument("fit_exponent: length mismatch");
  std::vector<double> lx, ly, used;
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (horizons[i] < 64.0) continue;
    lx.push_back(std::log(horizons[i]));
    ly.push_back(std::log(std::max(finals[i], 1e-12)));
    used.push_back(horizons[i]);
  }
  if (lx.size() < 4)
    throw std::invalid_argument("fit_exponent: at least 4 points with T >= 64 required");
  const double k = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  ExponentFit fit;
  fit.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / k;
  double ss_tot = 0, ss_res = 0;
  const double ymean = sy / k;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    double pred = fit.intercept + fit.slope * lx[i];
    ss_tot += (ly[i] - ymean) * (ly[i] - ymean);
    ss_res += (ly[i] - pred) * (ly[i] - pred);
  }
  fit.r_squared = ss_tot <= 1e-30 ? 1.0 : std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
  fit.horizons_used = std::move(used);
  return fit;
}

double max_abs_residual(const DataTensor& data, const Eigen::VectorXd& y) {
  double worst = 0.0;
  for (int t = 1; t <= data.horizon(); ++t)
    for (int i = 0; i < data.nodes(); ++i) {
      const Sample& s = data.sample(i, t);
      worst = std::max(worst, std::abs(s.h.dot(y) - s.z));
    }
  return worst;
}

void write_series_csv(const std::string& path,
                      const std::vector<std::vector<double>>& per_node_series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "t,node,value\n";
  char buf[32];
  for (std::size_t i = 0; i < per_node_series.size(); ++i) {
    const auto& series = per_node_series[i];
    for (std::size_t t = 0; t < series.size(); ++t) {
      std::snprintf(buf, sizeof(buf), "%.17g", series[t]);
      out << (t + 1) << ',' << i << ',' << buf << '\n';
    }
  }
}

}  // namespace olr
