#include "olr/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace olr {

double loss(const LossPoint& p, const Eigen::VectorXd& y) {
  if (p.h.size() != y.size()) throw std::invalid_argument("loss: dimension mismatch");
  double r = p.h.dot(y) - p.z;
  return 0.5 * r * r;
}

Eigen::VectorXd grad(const LossPoint& p, const Eigen::VectorXd& y) {
  if (p.h.size() != y.size()) throw std::invalid_argument("grad: dimension mismatch");
  return p.h * (p.h.dot(y) - p.z);
}

Eigen::VectorXd random_unit_vector(int m, std::mt19937_64& rng) {
  if (m < 1) throw std::invalid_argument("random_unit_vector: m >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd u(m);
  double norm = 0.0;
  do {
    for (int i = 0; i < m; ++i) u[i] = gauss(rng);
    norm = u.norm();
  } while (norm < 1e-12);
  return u / norm;
}

Eigen::VectorXd random_ball_vector(int m, std::mt19937_64& rng) {
  Eigen::VectorXd u = random_unit_vector(m, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return u * std::pow(unit(rng), 1.0 / m);
}

Eigen::VectorXd two_point_estimate(const LossPoint& p, const Eigen::VectorXd& y,
                                   const Eigen::VectorXd& u, double eps, int m) {
  if (!(eps > 0.0)) throw std::invalid_argument("two_point_estimate: eps > 0");
  double up = loss(p, y + eps * u);
  double down = loss(p, y - eps * u);
  return (m / (2.0 * eps)) * (up - down) * u;
}

double smoothed_loss_mc(const LossPoint& p, const Eigen::VectorXd& y,
                        double eps, int num_samples, std::uint64_t seed) {
  if (num_samples < 1) throw std::invalid_argument("smoothed_loss_mc: num_samples >= 1");
  const int m = static_cast<int>(y.size());
  std::mt19937_64 rng(seed);
  double acc = 0.0;
  for (int s = 0; s < num_samples; ++s) {
    Eigen::VectorXd v = random_ball_vector(m, rng);
    acc += loss(p, y + eps * v);
  }
  return acc / num_samples;
}

}  // namespace olr
