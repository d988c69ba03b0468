#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace olr {

class DataTensor;

// Euclidean projection onto the origin-centered ball of the given radius.
Eigen::VectorXd project_ball(const Eigen::VectorXd& x, double radius);

double hinge(double a);

// Subgradient of y -> [k^T y]_+ at x: k when k^T x > 0, zero otherwise
// (boundary points map to zero).
Eigen::VectorXd hinge_subgrad(const Eigen::VectorXd& k, const Eigen::VectorXd& x);

// Convex decision set with a Euclidean projection and scaling toward the
// origin ((1 - xi) K).
class DecisionSet {
 public:
  virtual ~DecisionSet() = default;
  virtual Eigen::VectorXd project(const Eigen::VectorXd& x) const = 0;
  virtual bool contains(const Eigen::VectorXd& x, double tol) const = 0;
  virtual std::shared_ptr<const DecisionSet> shrink(double xi) const = 0;
};

class Ball final : public DecisionSet {
 public:
  explicit Ball(double radius);
  double radius() const { return radius_; }

  Eigen::VectorXd project(const Eigen::VectorXd& x) const override;
  bool contains(const Eigen::VectorXd& x, double tol) const override;
  std::shared_ptr<const DecisionSet> shrink(double xi) const override;

 private:
  double radius_;
};

Ball shrink_ball(const Ball& b, double xi);

// Homogeneous half-space constraints k_q^T y <= 0, q = 1..s. The origin is
// always feasible. norm_bound caches max_q ||k_q||.
class Polytope {
 public:
  explicit Polytope(std::vector<Eigen::VectorXd> constraints);

  const std::vector<Eigen::VectorXd>& constraints() const { return k_; }
  int size() const { return static_cast<int>(k_.size()); }
  int dim() const { return static_cast<int>(k_.front().size()); }
  double norm_bound() const { return norm_bound_; }

  // max_q [k_q^T x]_+
  double max_violation(const Eigen::VectorXd& x) const;

  std::string to_json() const;
  static Polytope from_json(const std::string& doc);

 private:
  std::vector<Eigen::VectorXd> k_;
  double norm_bound_;
};

// Dykstra's alternating projections over the half-spaces. Converges to the
// Euclidean projection; throws when max_iter passes without meeting tol.
Eigen::VectorXd project_polytope_dykstra(const Eigen::VectorXd& x,
                                         const Polytope& p,
                                         int max_iter = 10000,
                                         double tol = 1e-10);

// Polytope intersected with a bounding ball. Shrinking scales the ball only;
// homogeneous half-spaces are scale-invariant.
class PolytopeBall final : public DecisionSet {
 public:
  PolytopeBall(Polytope polytope, double radius);

  Eigen::VectorXd project(const Eigen::VectorXd& x) const override;
  bool contains(const Eigen::VectorXd& x, double tol) const override;
  std::shared_ptr<const DecisionSet> shrink(double xi) const override;

 private:
  Polytope polytope_;
  double radius_;
};

// Distance from point to the affine set {y : h_i(t)^T y = z_i(t) for all i, t}
// stacked from exact-mode data, via the minimum-norm correction. Throws when
// the stacked system is inconsistent (the data was not exact).
double affine_solution_set_distance(const DataTensor& data,
                                    const Eigen::VectorXd& point);

}  // namespace olr
