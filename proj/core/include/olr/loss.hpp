#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace olr {

// One observed pair viewed as a square loss over predictors y:
// loss(y) = 0.5 (h^T y - z)^2.
struct LossPoint {
  Eigen::VectorXd h;
  double z = 0.0;
};

double loss(const LossPoint& p, const Eigen::VectorXd& y);

// gradient h (h^T y - z)
Eigen::VectorXd grad(const LossPoint& p, const Eigen::VectorXd& y);

// Uniform direction on the unit sphere (normalized Gaussian draw).
Eigen::VectorXd random_unit_vector(int m, std::mt19937_64& rng);

// Uniform point in the closed unit ball (sphere draw scaled by U^{1/m}).
Eigen::VectorXd random_ball_vector(int m, std::mt19937_64& rng);

// Two-point bandit gradient estimate
//   g = (m / 2 eps) (loss(y + eps u) - loss(y - eps u)) u,
// querying the loss at exactly two points.
Eigen::VectorXd two_point_estimate(const LossPoint& p, const Eigen::VectorXd& y,
                                   const Eigen::VectorXd& u, double eps, int m);

// Monte-Carlo value of the ball-smoothed loss E_{v in B_1}[loss(y + eps v)].
// Test oracle only; the protocols never evaluate it.
double smoothed_loss_mc(const LossPoint& p, const Eigen::VectorXd& y,
                        double eps, int num_samples, std::uint64_t seed);

}  // namespace olr
