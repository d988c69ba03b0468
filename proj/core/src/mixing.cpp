#include "olr/mixing.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace olr {

namespace {

constexpr double kStochasticTol = 1e-12;

double power_iteration_top_sv(const Eigen::MatrixXd& b) {
  const int n = static_cast<int>(b.cols());
  std::mt19937_64 rng(0x5eedu);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = unit(rng);
  v.normalize();
  // Iterate on the Gram operator B^T B; sigma = sqrt(rayleigh quotient).
  double sigma = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Eigen::VectorXd w = b.transpose() * (b * v);
    double norm = w.norm();
    if (norm < 1e-300) return 0.0;  // B annihilates v; top value is ~0
    w /= norm;
    double next = std::sqrt(norm);  // ||B^T B v|| -> lambda_max as v aligns
    v = w;
    if (it > 0 && std::abs(next - sigma) <= 1e-10) return next;
    sigma = next;
  }
  throw std::runtime_error("second_singular_value: power iteration did not converge");
}

}  // namespace

double second_singular_value(const Eigen::MatrixXd& w) {
  if (w.rows() != w.cols()) throw std::invalid_argument("square matrix required");
  const int n = static_cast<int>(w.rows());
  Eigen::MatrixXd b = w - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  if (n <= 64) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
    return svd.singularValues()(0);
  }
  return power_iteration_top_sv(b);
}

MixingMatrix::MixingMatrix(Eigen::MatrixXd w, double sigma2)
    : w_(std::move(w)), sigma2_(sigma2) {}

MixingMatrix MixingMatrix::max_degree_weights(const Graph& g) {
  if (!g.is_symmetric())
    throw std::invalid_argument(
        "max_degree_weights: symmetric edge set required for double stochasticity");
  const int n = g.node_count();
  const double dmax = g.max_degree();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j : g.in_neighbors(i)) w(i, j) = 1.0 / (1.0 + dmax);
    // algebraically 1 - d_i/(1+dmax); this form keeps the complete graph's
    // entries bitwise equal so its sigma2 is exactly zero
    w(i, i) = (1.0 + dmax - g.degree(i)) / (1.0 + dmax);
  }
  double s2 = second_singular_value(w);
  if (!(s2 < 1.0))
    throw std::runtime_error("max_degree_weights: sigma2 >= 1 on a connected graph");
  return MixingMatrix(std::move(w), s2);
}

MixingMatrix MixingMatrix::from_matrix(Eigen::MatrixXd w) {
  if (w.rows() != w.cols()) throw std::invalid_argument("square matrix required");
  const int n = static_cast<int>(w.rows());
  for (int i = 0; i < n; ++i) {
    if (std::abs(w.row(i).sum() - 1.0) > kStochasticTol)
      throw std::invalid_argument("row sums must equal one");
    if (std::abs(w.col(i).sum() - 1.0) > kStochasticTol)
      throw std::invalid_argument("column sums must equal one");
    for (int j = 0; j < n; ++j)
      if (w(i, j) < 0.0) throw std::invalid_argument("negative weight");
  }
  double s2 = second_singular_value(w);
  if (s2 >= 1.0 - 1e-9)
    throw std::invalid_argument("invalid mixing matrix: sigma2 >= 1");
  return MixingMatrix(std::move(w), s2);
}

std::vector<Eigen::VectorXd> MixingMatrix::mix(
    const std::vector<Eigen::VectorXd>& vectors) const {
  const int n = size();
  if (static_cast<int>(vectors.size()) != n)
    throw std::invalid_argument("mix: one vector per node required");
  const auto dim = vectors.front().size();
  for (const auto& v : vectors)
    if (v.size() != dim) throw std::invalid_argument("mix: dimension mismatch");
  std::vector<Eigen::VectorXd> out(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
    for (int j = 0; j < n; ++j) acc += w_(i, j) * vectors[j];
    out[i] = std::move(acc);
  }
  return out;
}

}  // namespace olr
