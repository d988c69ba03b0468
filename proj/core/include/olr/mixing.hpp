#pragma once

#include <vector>

#include <Eigen/Dense>

#include "olr/graph.hpp"

namespace olr {

// Second-largest singular value of a square matrix w, computed as the
// largest singular value of (w - 1 1^T / n). Dense SVD up to n = 64,
// power iteration (tolerance 1e-10, at most 1e4 iterations) above.
double second_singular_value(const Eigen::MatrixXd& w);

// Nonnegative doubly stochastic averaging weights aligned with a graph:
// w(i,j) > 0 iff j in N_i or j = i, rows and columns sum to one, and the
// second singular value (cached) is below one.
class MixingMatrix {
 public:
  // Maximum-degree weights: w(i,j) = 1/(1+d_max) on edges (j,i),
  // w(i,i) = 1 - d_i/(1+d_max). Requires a symmetric edge set, otherwise
  // the columns cannot sum to one.
  static MixingMatrix max_degree_weights(const Graph& g);

  // Accepts any matrix that satisfies the invariants above (the zero
  // pattern is the caller's concern); rejects sigma2 >= 1.
  static MixingMatrix from_matrix(Eigen::MatrixXd w);

  int size() const { return static_cast<int>(w_.rows()); }
  const Eigen::MatrixXd& weights() const { return w_; }
  double sigma2() const { return sigma2_; }

  // One communication/averaging round: out_i = sum_j w(i,j) vectors_j.
  // Summation runs in fixed order j = 0..n-1 so results are bit-identical
  // under any parallel schedule.
  std::vector<Eigen::VectorXd> mix(
      const std::vector<Eigen::VectorXd>& vectors) const;

 private:
  MixingMatrix(Eigen::MatrixXd w, double sigma2);

  Eigen::MatrixXd w_;
  double sigma2_;
};

}  // namespace olr
