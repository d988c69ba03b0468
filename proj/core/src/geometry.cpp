#include "olr/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "olr/data.hpp"

namespace olr {

Eigen::VectorXd project_ball(const Eigen::VectorXd& x, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("project_ball: radius > 0");
  double norm = x.norm();
  if (norm <= radius) return x;
  return x * (radius / norm);
}

double hinge(double a) { return a > 0.0 ? a : 0.0; }

Eigen::VectorXd hinge_subgrad(const Eigen::VectorXd& k, const Eigen::VectorXd& x) {
  if (k.size() != x.size()) throw std::invalid_argument("hinge_subgrad: dimension mismatch");
  if (k.dot(x) > 0.0) return k;
  return Eigen::VectorXd::Zero(k.size());
}

Ball::Ball(double radius) : radius_(radius) {
  if (!(radius_ > 0.0)) throw std::invalid_argument("Ball: radius > 0");
}

Eigen::VectorXd Ball::project(const Eigen::VectorXd& x) const {
  return project_ball(x, radius_);
}

bool Ball::contains(const Eigen::VectorXd& x, double tol) const {
  return x.norm() <= radius_ + tol;
}

std::shared_ptr<const DecisionSet> Ball::shrink(double xi) const {
  return std::make_shared<Ball>(shrink_ball(*this, xi));
}

Ball shrink_ball(const Ball& b, double xi) {
  if (xi < 0.0 || xi >= 1.0) throw std::invalid_argument("shrink_ball: 0 <= xi < 1");
  return Ball((1.0 - xi) * b.radius());
}

Polytope::Polytope(std::vector<Eigen::VectorXd> constraints)
    : k_(std::move(constraints)) {
  if (k_.empty()) throw std::invalid_argument("Polytope: at least one constraint");
  const auto dim = k_.front().size();
  norm_bound_ = 0.0;
  for (const auto& k : k_) {
    if (k.size() != dim) throw std::invalid_argument("Polytope: mixed dimensions");
    norm_bound_ = std::max(norm_bound_, k.norm());
  }
}

double Polytope::max_violation(const Eigen::VectorXd& x) const {
  double worst = 0.0;
  for (const auto& k : k_) worst = std::max(worst, hinge(k.dot(x)));
  return worst;
}

std::string Polytope::to_json() const {
  nlohmann::json doc;
  auto& arr = doc["constraints"] = nlohmann::json::array();
  for (const auto& k : k_) {
    nlohmann::json row = nlohmann::json::array();
    for (int i = 0; i < k.size(); ++i) row.push_back(k[i]);
    arr.push_back(std::move(row));
  }
  return doc.dump();
}

Polytope Polytope::from_json(const std::string& text) {
  auto doc = nlohmann::json::parse(text);
  std::vector<Eigen::VectorXd> ks;
  for (const auto& row : doc.at("constraints")) {
    Eigen::VectorXd k(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) k[static_cast<int>(i)] = row[i].get<double>();
    ks.push_back(std::move(k));
  }
  return Polytope(std::move(ks));
}

namespace {

// Projection onto one half-space {y : k^T y <= 0}.
Eigen::VectorXd project_halfspace(const Eigen::VectorXd& x, const Eigen::VectorXd& k) {
  double sq = k.squaredNorm();
  if (sq < 1e-300) return x;  // trivial constraint 0 <= 0
  double v = hinge(k.dot(x));
  if (v == 0.0) return x;
  return x - (v / sq) * k;
}

Eigen::VectorXd dykstra(const Eigen::VectorXd& x,
                        const std::vector<const Eigen::VectorXd*>& halfspaces,
                        double ball_radius,  // <= 0 disables the ball set
                        int max_iter, double tol) {
  const int dim = static_cast<int>(x.size());
  const int sets = static_cast<int>(halfspaces.size()) + (ball_radius > 0.0 ? 1 : 0);
  std::vector<Eigen::VectorXd> correction(sets, Eigen::VectorXd::Zero(dim));
  Eigen::VectorXd y = x;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd start = y;
    for (int s = 0; s < sets; ++s) {
      Eigen::VectorXd w = y + correction[s];
      Eigen::VectorXd projected =
          s < static_cast<int>(halfspaces.size())
              ? project_halfspace(w, *halfspaces[s])
              : project_ball(w, ball_radius);
      correction[s] = w - projected;
      y = std::move(projected);
    }
    double worst = 0.0;
    for (const auto* k : halfspaces) worst = std::max(worst, hinge(k->dot(y)));
    if (ball_radius > 0.0) worst = std::max(worst, y.norm() - ball_radius);
    if ((y - start).norm() <= tol && worst <= tol) return y;
  }
  throw std::runtime_error("dykstra projection: max_iter exceeded");
}

}  // namespace

Eigen::VectorXd project_polytope_dykstra(const Eigen::VectorXd& x, const Polytope& p,
                                         int max_iter, double tol) {
  std::vector<const Eigen::VectorXd*> hs;
  hs.reserve(p.size());
  for (const auto& k : p.constraints()) hs.push_back(&k);
  return dykstra(x, hs, 0.0, max_iter, tol);
}

PolytopeBall::PolytopeBall(Polytope polytope, double radius)
    : polytope_(std::move(polytope)), radius_(radius) {
  if (!(radius_ > 0.0)) throw std::invalid_argument("PolytopeBall: radius > 0");
}

Eigen::VectorXd PolytopeBall::project(const Eigen::VectorXd& x) const {
  std::vector<const Eigen::VectorXd*> hs;
  hs.reserve(polytope_.size());
  for (const auto& k : polytope_.constraints()) hs.push_back(&k);
  return dykstra(x, hs, radius_, 10000, 1e-10);
}

bool PolytopeBall::contains(const Eigen::VectorXd& x, double tol) const {
  return x.norm() <= radius_ + tol && polytope_.max_violation(x) <= tol;
}

std::shared_ptr<const DecisionSet> PolytopeBall::shrink(double xi) const {
  if (xi < 0.0 || xi >= 1.0) throw std::invalid_argument("shrink: 0 <= xi < 1");
  return std::make_shared<PolytopeBall>(polytope_, (1.0 - xi) * radius_);
}

double affine_solution_set_distance(const DataTensor& data,
                                    const Eigen::VectorXd& point) {
  const int n = data.nodes(), m = data.dim(), T = data.horizon();
  if (point.size() != m)
    throw std::invalid_argument("affine_solution_set_distance: dimension mismatch");
  Eigen::MatrixXd a(n * T, m);
  Eigen::VectorXd residual(n * T);
  int row = 0;
  for (int t = 1; t <= T; ++t) {
    for (int i = 0; i < n; ++i, ++row) {
      const Sample& s = data.sample(i, t);
      a.row(row) = s.h.transpose();
      residual[row] = s.z - s.h.dot(point);
    }
  }
  // Minimum-norm delta with A delta = residual, via the pseudo-inverse.
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  Eigen::VectorXd delta = svd.solve(residual);
  if ((a * delta - residual).norm() > 1e-8 * std::max(1.0, residual.norm()))
    throw std::invalid_argument(
        "affine_solution_set_distance: inconsistent system; data is not exact");
  return delta.norm();
}

}  // namespace olr
