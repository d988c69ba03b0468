#include "olr/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "olr/loss.hpp"
#include "olr/rng.hpp"

namespace olr {

namespace {

// Seed lanes; distinct constants keep the streams independent.
constexpr std::uint64_t kLaneNode = 0x01;
constexpr std::uint64_t kLaneHidden = 0x02;
constexpr std::uint64_t kLaneRankRetry = 0x03;

double clamp_abs(double v, double bound) {
  return std::clamp(v, -bound, bound);
}

int stacked_rank(const std::vector<Sample>& round, int n, int m) {
  Eigen::MatrixXd h(n, m);
  for (int i = 0; i < n; ++i) h.row(i) = round[i].h.transpose();
  return static_cast<int>(Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(h).rank());
}

void format_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

std::string data_mode_name(DataMode m) {
  switch (m) {
    case DataMode::Oblivious: return "oblivious";
    case DataMode::Exact: return "exact";
    case DataMode::Adaptive: return "adaptive";
  }
  throw std::logic_error("unknown data mode");
}

DataMode data_mode_from_name(const std::string& name) {
  if (name == "oblivious") return DataMode::Oblivious;
  if (name == "exact") return DataMode::Exact;
  if (name == "adaptive") return DataMode::Adaptive;
  throw std::invalid_argument("unknown data mode: " + name);
}

DataTensor::DataTensor(int n, int m, int T, DataMeta meta)
    : n_(n), m_(m), horizon_(T), meta_(std::move(meta)) {
  if (n_ < 1 || m_ < 1 || horizon_ < 1)
    throw std::invalid_argument("DataTensor: positive n, m, T required");
  samples_.assign(static_cast<std::size_t>(n_) * horizon_,
                  Sample{Eigen::VectorXd::Zero(m_), 0.0});
}

const Sample& DataTensor::sample(int node, int round) const {
  if (node < 0 || node >= n_ || round < 1 || round > horizon_)
    throw std::out_of_range("DataTensor::sample");
  return samples_[static_cast<std::size_t>(round - 1) * n_ + node];
}

Sample& DataTensor::sample(int node, int round) {
  return const_cast<Sample&>(std::as_const(*this).sample(node, round));
}

namespace {

nlohmann::json meta_to_json(const DataMeta& meta, int n, int m, int T) {
  nlohmann::json doc;
  doc["mode"] = data_mode_name(meta.mode);
  doc["seed"] = meta.seed;
  doc["alpha_h"] = meta.alpha_h;
  doc["alpha_z"] = meta.alpha_z;
  doc["sigma_noise"] = meta.sigma_noise;
  doc["n"] = n;
  doc["m"] = m;
  doc["T"] = T;
  if (meta.y_star) {
    auto& arr = doc["y_star"] = nlohmann::json::array();
    for (int i = 0; i < meta.y_star->size(); ++i) arr.push_back((*meta.y_star)[i]);
  }
  return doc;
}

DataMeta meta_from_json(const nlohmann::json& doc) {
  DataMeta meta;
  meta.mode = data_mode_from_name(doc.at("mode").get<std::string>());
  meta.seed = doc.at("seed").get<std::uint64_t>();
  meta.alpha_h = doc.at("alpha_h").get<double>();
  meta.alpha_z = doc.at("alpha_z").get<double>();
  meta.sigma_noise = doc.at("sigma_noise").get<double>();
  if (doc.contains("y_star")) {
    const auto& arr = doc.at("y_star");
    Eigen::VectorXd y(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) y[static_cast<int>(i)] = arr[i].get<double>();
    meta.y_star = std::move(y);
  }
  return meta;
}

}  // namespace

void DataTensor::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "# " << meta_to_json(meta_, n_, m_, horizon_).dump() << "\n";
  std::string line = "t,i";
  for (int c = 1; c <= m_; ++c) line += ",h_" + std::to_string(c);
  line += ",z\n";
  out << line;
  for (int t = 1; t <= horizon_; ++t) {
    for (int i = 0; i < n_; ++i) {
      const Sample& s = sample(i, t);
      line = std::to_string(t) + "," + std::to_string(i);
      for (int c = 0; c < m_; ++c) {
        line += ',';
        format_double(line, s.h[c]);
      }
      line += ',';
      format_double(line, s.z);
      line += '\n';
      out << line;
    }
  }
}

DataTensor DataTensor::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw std::runtime_error("missing meta line in " + path);
  auto doc = nlohmann::json::parse(line.substr(2));
  const int n = doc.at("n").get<int>();
  const int m = doc.at("m").get<int>();
  const int T = doc.at("T").get<int>();
  DataTensor tensor(n, m, T, meta_from_json(doc));
  std::getline(in, line);  // column header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    int t = std::stoi(cell);
    std::getline(ss, cell, ',');
    int i = std::stoi(cell);
    Sample& s = tensor.sample(i, t);
    for (int c = 0; c < m; ++c) {
      std::getline(ss, cell, ',');
      s.h[c] = std::strtod(cell.c_str(), nullptr);
    }
    std::getline(ss, cell, ',');
    s.z = std::strtod(cell.c_str(), nullptr);
  }
  return tensor;
}

namespace {

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("truncated data file");
  return v;
}

constexpr std::uint32_t kMagic = 0x544f4c4fu;  // "OLOT"

}  // namespace

void DataTensor::write_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  put(out, kMagic);
  put(out, std::uint32_t{1});
  put(out, static_cast<std::uint32_t>(n_));
  put(out, static_cast<std::uint32_t>(m_));
  put(out, static_cast<std::uint32_t>(horizon_));
  put(out, static_cast<std::uint8_t>(meta_.mode));
  put(out, meta_.seed);
  put(out, meta_.alpha_h);
  put(out, meta_.alpha_z);
  put(out, meta_.sigma_noise);
  put(out, static_cast<std::uint8_t>(meta_.y_star.has_value()));
  if (meta_.y_star)
    out.write(reinterpret_cast<const char*>(meta_.y_star->data()),
              static_cast<std::streamsize>(sizeof(double)) * m_);
  for (const Sample& s : samples_) {
    out.write(reinterpret_cast<const char*>(s.h.data()),
              static_cast<std::streamsize>(sizeof(double)) * m_);
    put(out, s.z);
  }
}

DataTensor DataTensor::read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  if (get<std::uint32_t>(in) != kMagic) throw std::runtime_error("bad magic in " + path);
  if (get<std::uint32_t>(in) != 1) throw std::runtime_error("unsupported version");
  const int n = static_cast<int>(get<std::uint32_t>(in));
  const int m = static_cast<int>(get<std::uint32_t>(in));
  const int T = static_cast<int>(get<std::uint32_t>(in));
  DataMeta meta;
  meta.mode = static_cast<DataMode>(get<std::uint8_t>(in));
  meta.seed = get<std::uint64_t>(in);
  meta.alpha_h = get<double>(in);
  meta.alpha_z = get<double>(in);
  meta.sigma_noise = get<double>(in);
  if (get<std::uint8_t>(in)) {
    Eigen::VectorXd y(m);
    in.read(reinterpret_cast<char*>(y.data()),
            static_cast<std::streamsize>(sizeof(double)) * m);
    meta.y_star = std::move(y);
  }
  DataTensor tensor(n, m, T, std::move(meta));
  for (int t = 1; t <= T; ++t) {
    for (int i = 0; i < n; ++i) {
      Sample& s = tensor.sample(i, t);
      in.read(reinterpret_cast<char*>(s.h.data()),
              static_cast<std::streamsize>(sizeof(double)) * m);
      s.z = get<double>(in);
    }
  }
  if (!in) throw std::runtime_error("truncated data file " + path);
  return tensor;
}

namespace {

Eigen::VectorXd draw_covariate(int m, double alpha_h, std::mt19937_64& rng) {
  return std::sqrt(alpha_h) * random_ball_vector(m, rng);
}

}  // namespace

DataTensor gen_oblivious(int n, int m, int T, double alpha_h, double alpha_z,
                         double sigma_noise, std::uint64_t seed) {
  if (n < m) throw std::invalid_argument("gen_oblivious: n >= m required for the rank condition");
  if (m < 1 || T < 1) throw std::invalid_argument("gen_oblivious: positive m, T");
  if (!(alpha_h > 0.0) || !(alpha_z > 0.0))
    throw std::invalid_argument("gen_oblivious: positive alpha_h, alpha_z");

  DataMeta meta;
  meta.mode = DataMode::Oblivious;
  meta.seed = seed;
  meta.alpha_h = alpha_h;
  meta.alpha_z = alpha_z;
  meta.sigma_noise = sigma_noise;
  DataTensor tensor(n, m, T, std::move(meta));

  // Hidden parameter; radius keeps |h^T y0| <= alpha_z / 2, so clamping
  // only trims gaussian tails.
  std::mt19937_64 hidden_rng(derive_seed(seed, kLaneHidden));
  Eigen::VectorXd y0 =
      (alpha_z / (2.0 * std::sqrt(alpha_h))) * random_ball_vector(m, hidden_rng);

  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    std::mt19937_64 rng(derive_seed(seed, kLaneNode, static_cast<std::uint64_t>(i)));
    for (int t = 1; t <= T; ++t) {
      Sample& s = tensor.sample(i, t);
      s.h = draw_covariate(m, alpha_h, rng);
      s.z = clamp_abs(s.h.dot(y0) + sigma_noise * gauss(rng), alpha_z);
    }
  }

  // Redraw round 1 until rank(H(1)) = m.
  std::mt19937_64 retry_rng(derive_seed(seed, kLaneRankRetry));
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<Sample> round(n);
    for (int i = 0; i < n; ++i) round[i] = tensor.sample(i, 1);
    if (stacked_rank(round, n, m) == m) return tensor;
    for (int i = 0; i < n; ++i) {
      Sample& s = tensor.sample(i, 1);
      s.h = draw_covariate(m, alpha_h, retry_rng);
      s.z = clamp_abs(s.h.dot(y0) + sigma_noise * gauss(retry_rng), alpha_z);
    }
  }
  throw std::runtime_error("gen_oblivious: rank condition not met within 1000 redraws");
}

DataTensor gen_exact(int n, int m, int T, double alpha_h,
                     const Eigen::VectorXd& y_star, std::uint64_t seed) {
  if (n < m) throw std::invalid_argument("gen_exact: n >= m required for the rank condition");
  if (m < 1 || T < 1) throw std::invalid_argument("gen_exact: positive m, T");
  if (!(alpha_h > 0.0)) throw std::invalid_argument("gen_exact: positive alpha_h");
  if (y_star.size() != m) throw std::invalid_argument("gen_exact: y_star dimension mismatch");

  DataMeta meta;
  meta.mode = DataMode::Exact;
  meta.seed = seed;
  meta.alpha_h = alpha_h;
  meta.alpha_z = 0.0;
  meta.sigma_noise = 0.0;
  meta.y_star = y_star;
  DataTensor tensor(n, m, T, std::move(meta));

  auto draw_nondegenerate = [&](std::mt19937_64& rng) {
    Eigen::VectorXd h;
    do {
      h = draw_covariate(m, alpha_h, rng);
    } while (h.norm() < 1e-6);
    return h;
  };

  for (int i = 0; i < n; ++i) {
    std::mt19937_64 rng(derive_seed(seed, kLaneNode, static_cast<std::uint64_t>(i)));
    for (int t = 1; t <= T; ++t) {
      Sample& s = tensor.sample(i, t);
      s.h = draw_nondegenerate(rng);
      s.z = s.h.dot(y_star);
    }
  }

  std::mt19937_64 retry_rng(derive_seed(seed, kLaneRankRetry));
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<Sample> round(n);
    for (int i = 0; i < n; ++i) round[i] = tensor.sample(i, 1);
    if (stacked_rank(round, n, m) == m) return tensor;
    for (int i = 0; i < n; ++i) {
      Sample& s = tensor.sample(i, 1);
      s.h = draw_nondegenerate(retry_rng);
      s.z = s.h.dot(y_star);
    }
  }
  throw std::runtime_error("gen_exact: rank condition not met within 1000 redraws");
}

namespace {

class TrackingAdversary final : public AdaptiveAdversary {
 public:
  TrackingAdversary(double alpha_h, double alpha_z, std::uint64_t seed)
      : alpha_h_(alpha_h), alpha_z_(alpha_z), seed_(seed) {}

  Sample next(int node_id, int round, int dim,
              const std::vector<HistoryEntry>& local_history) override {
    // Per-(node, round) stream keeps nodes independent and replayable.
    std::mt19937_64 rng(derive_seed(seed_, 0x7c, static_cast<std::uint64_t>(node_id),
                                    static_cast<std::uint64_t>(round)));
    Sample s;
    s.h = std::sqrt(alpha_h_) * random_ball_vector(dim, rng);
    double target = local_history.empty() ? 0.0 : s.h.dot(local_history.back().x);
    s.z = clamp_abs(target + alpha_z_ / 2.0, alpha_z_);
    return s;
  }

 private:
  double alpha_h_;
  double alpha_z_;
  std::uint64_t seed_;
};

}  // namespace

std::unique_ptr<AdaptiveAdversary> make_tracking_adversary(double alpha_h,
                                                           double alpha_z,
                                                           std::uint64_t seed) {
  return std::make_unique<TrackingAdversary>(alpha_h, alpha_z, seed);
}

}  // namespace olr
