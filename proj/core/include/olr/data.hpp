#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace olr {

// One covariate/outcome pair.
struct Sample {
  Eigen::VectorXd h;
  double z = 0.0;
};

enum class DataMode { Oblivious, Exact, Adaptive };

std::string data_mode_name(DataMode m);
DataMode data_mode_from_name(const std::string& name);

struct DataMeta {
  DataMode mode = DataMode::Oblivious;
  std::uint64_t seed = 0;
  double alpha_h = 1.0;          // bound on ||h||^2
  double alpha_z = 0.0;          // bound on |z|; 0 means unbounded (exact mode)
  double sigma_noise = 0.0;
  std::optional<Eigen::VectorXd> y_star;  // planted parameter (exact mode)
};

// All n x T samples of one experiment, indexed by (node, round) with
// rounds 1-based.
class DataTensor {
 public:
  DataTensor(int n, int m, int T, DataMeta meta);

  int nodes() const { return n_; }
  int dim() const { return m_; }
  int horizon() const { return horizon_; }
  const DataMeta& meta() const { return meta_; }

  const Sample& sample(int node, int round) const;
  Sample& sample(int node, int round);

  // Text form: one meta line ("# {json}"), a column header, then one row
  // (t, i, h_1..h_m, z) per sample at 17 significant digits.
  void write_csv(const std::string& path) const;
  static DataTensor read_csv(const std::string& path);

  // Raw little-endian doubles; round-trips bit-exactly.
  void write_binary(const std::string& path) const;
  static DataTensor read_binary(const std::string& path);

 private:
  int n_, m_, horizon_;
  DataMeta meta_;
  std::vector<Sample> samples_;  // (t-1)*n + i
};

// Streams fixed before round one: h uniform in the sqrt(alpha_h) ball, a
// hidden parameter drawn once, z = clamp(h^T y0 + gauss(0, sigma_noise),
// +-alpha_z). Round 1 is redrawn until the stacked covariate matrix has
// full column rank (needs n >= m).
DataTensor gen_oblivious(int n, int m, int T, double alpha_h, double alpha_z,
                         double sigma_noise, std::uint64_t seed);

// Exactly realizable streams: z = h^T y_star with no noise or clamping;
// covariates are bounded away from zero norm.
DataTensor gen_exact(int n, int m, int T, double alpha_h,
                     const Eigen::VectorXd& y_star, std::uint64_t seed);

struct HistoryEntry {
  Eigen::VectorXd h;
  double z = 0.0;
  Eigen::VectorXd x;  // the node's prediction in that round
};

// Round-t data may depend on the node's own past (h, z, x) triples, never
// on other nodes or on the protocol's exploration randomness. Returned
// samples satisfy ||h||^2 <= alpha_h and |z| <= alpha_z.
class AdaptiveAdversary {
 public:
  virtual ~AdaptiveAdversary() = default;
  virtual Sample next(int node_id, int round, int dim,
                      const std::vector<HistoryEntry>& local_history) = 0;
};

// Pushes the loss away from the node's latest prediction:
// z = clamp(h^T x_prev + alpha_z / 2, +-alpha_z) with h uniform in the
// sqrt(alpha_h) ball. With empty history x_prev is the zero vector.
std::unique_ptr<AdaptiveAdversary> make_tracking_adversary(double alpha_h,
                                                           double alpha_z,
                                                           std::uint64_t seed);

}  // namespace olr
