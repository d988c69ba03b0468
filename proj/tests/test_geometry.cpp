#include <doctest.h>

#include <cmath>
#include <random>

#include "olr/data.hpp"
#include "olr/geometry.hpp"
#include "olr/loss.hpp"

using namespace olr;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("ball projection") {
  Eigen::VectorXd p = project_ball(vec2(3, 4), 1.0);
  CHECK(p[0] == doctest::Approx(0.6));
  CHECK(p[1] == doctest::Approx(0.8));
  Eigen::VectorXd inside = vec2(0.1, -0.2);
  CHECK((project_ball(inside, 1.0) - inside).norm() == 0.0);
  CHECK((project_ball(p, 1.0) - p).norm() <= 1e-15);  // idempotent

  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd x = 5.0 * random_ball_vector(3, rng);
    Eigen::VectorXd y = 5.0 * random_ball_vector(3, rng);
    CHECK(project_ball(x, 2.0).norm() <= 2.0 + 1e-12);
    CHECK((project_ball(x, 2.0) - project_ball(y, 2.0)).norm() <=
          (x - y).norm() + 1e-12);
  }
}

TEST_CASE("ball shrinking") {
  Ball b(2.0);
  CHECK(shrink_ball(b, 0.0).radius() == 2.0);
  CHECK(shrink_ball(b, 0.25).radius() == doctest::Approx(1.5));
  CHECK_THROWS_AS(shrink_ball(b, 1.0), std::invalid_argument);

  // a point of the shrunk ball keeps x +- eps u inside the original
  std::mt19937_64 rng(2);
  const double radius = 1.0, xi = 0.1, eps = xi * radius;
  for (int i = 0; i < 200; ++i) {
    Eigen::VectorXd x = (1.0 - xi) * radius * random_ball_vector(3, rng);
    Eigen::VectorXd u = random_unit_vector(3, rng);
    CHECK((x + eps * u).norm() <= radius + 1e-12);
    CHECK((x - eps * u).norm() <= radius + 1e-12);
  }
}

TEST_CASE("hinge and its subgradient") {
  CHECK(hinge(-1.0) == 0.0);
  CHECK(hinge(2.5) == 2.5);
  Eigen::VectorXd k = vec2(1, 0);
  CHECK((hinge_subgrad(k, vec2(2, 5)) - k).norm() == 0.0);
  CHECK(hinge_subgrad(k, vec2(-2, 5)).norm() == 0.0);
  CHECK(hinge_subgrad(k, vec2(0, 1)).norm() == 0.0);  // boundary gives zero

  // subgradient inequality for random pairs
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    Eigen::VectorXd kk = 2.0 * random_ball_vector(3, rng);
    Eigen::VectorXd x = 3.0 * random_ball_vector(3, rng);
    Eigen::VectorXd y = 3.0 * random_ball_vector(3, rng);
    Eigen::VectorXd sub = hinge_subgrad(kk, x);
    CHECK(hinge(kk.dot(y)) >= hinge(kk.dot(x)) + sub.dot(y - x) - 1e-12);
  }
}

TEST_CASE("dykstra polytope projection") {
  Polytope single({vec2(1, 0)});
  Eigen::VectorXd feasible = vec2(-1, 2);
  CHECK((project_polytope_dykstra(feasible, single) - feasible).norm() <= 1e-12);
  Eigen::VectorXd projected = project_polytope_dykstra(vec2(2, 3), single);
  CHECK(projected[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(projected[1] == doctest::Approx(3.0));

  // two orthogonal half-spaces cut out the negative orthant
  Polytope orthant({vec2(1, 0), vec2(0, 1)});
  Eigen::VectorXd corner = project_polytope_dykstra(vec2(2, 3), orthant);
  CHECK(corner.norm() <= 1e-8);

  // non-expansiveness and feasibility on random pairs
  std::mt19937_64 rng(4);
  std::vector<Eigen::VectorXd> ks{3.0 * random_ball_vector(3, rng),
                                  3.0 * random_ball_vector(3, rng),
                                  3.0 * random_ball_vector(3, rng)};
  Polytope p(ks);
  for (int i = 0; i < 200; ++i) {
    Eigen::VectorXd x = 4.0 * random_ball_vector(3, rng);
    Eigen::VectorXd px = project_polytope_dykstra(x, p);
    CHECK(p.max_violation(px) <= 1e-9);
    Eigen::VectorXd px2 = project_polytope_dykstra(px, p);
    CHECK((px2 - px).norm() <= 1e-8);
    // the projection is no farther than any sampled feasible point
    for (int j = 0; j < 5; ++j) {
      Eigen::VectorXd y = project_polytope_dykstra(4.0 * random_ball_vector(3, rng), p);
      CHECK((px - x).norm() <= (y - x).norm() + 1e-8);
    }
  }
}

TEST_CASE("polytope json round trip") {
  Polytope p({vec2(0.5, -1.0), vec2(0.0, 2.0)});
  Polytope back = Polytope::from_json(p.to_json());
  REQUIRE(back.size() == 2);
  CHECK((back.constraints()[0] - p.constraints()[0]).norm() == 0.0);
  CHECK(back.norm_bound() == doctest::Approx(2.0));
}

TEST_CASE("polytope-ball decision set") {
  PolytopeBall set(Polytope({vec2(1, 0)}), 1.0);
  CHECK(set.contains(vec2(-0.5, 0.5), 1e-12));
  CHECK_FALSE(set.contains(vec2(0.5, 0.5), 1e-12));
  Eigen::VectorXd p = set.project(vec2(2, 0.5));
  CHECK(p[0] <= 1e-9);
  CHECK(p.norm() <= 1.0 + 1e-9);
  auto shrunk = set.shrink(0.5);
  CHECK(shrunk->contains(vec2(-0.4, 0.2), 1e-12));
  CHECK_FALSE(shrunk->contains(vec2(-0.9, 0.0), 1e-12));  // ball halved
}

TEST_CASE("distance to the exact solution set") {
  // single constraint y_1 = 1 in 2-d
  DataTensor data(1, 2, 1, DataMeta{DataMode::Exact, 0, 1.0, 0.0, 0.0, std::nullopt});
  data.sample(0, 1) = Sample{vec2(1, 0), 1.0};
  CHECK(affine_solution_set_distance(data, vec2(3, 0)) == doctest::Approx(2.0));
  CHECK(affine_solution_set_distance(data, vec2(1, -4)) <= 1e-12);

  // full-rank stack pins the singleton y* and the distance is euclidean
  Eigen::VectorXd ystar = vec2(0.7, -0.3);
  DataTensor full(2, 2, 2, DataMeta{DataMode::Exact, 0, 1.0, 0.0, 0.0, ystar});
  std::mt19937_64 rng(5);
  for (int t = 1; t <= 2; ++t)
    for (int i = 0; i < 2; ++i) {
      Eigen::VectorXd h = random_ball_vector(2, rng);
      full.sample(i, t) = Sample{h, h.dot(ystar)};
    }
  Eigen::VectorXd point = vec2(2.0, 2.0);
  CHECK(affine_solution_set_distance(full, point) ==
        doctest::Approx((point - ystar).norm()).epsilon(1e-9));

  // inconsistent stack signals non-exact data
  DataTensor broken(1, 2, 2, DataMeta{DataMode::Exact, 0, 1.0, 0.0, 0.0, std::nullopt});
  broken.sample(0, 1) = Sample{vec2(1, 0), 1.0};
  broken.sample(0, 2) = Sample{vec2(1, 0), 2.0};
  CHECK_THROWS_AS(affine_solution_set_distance(broken, vec2(0, 0)),
                  std::invalid_argument);
}
