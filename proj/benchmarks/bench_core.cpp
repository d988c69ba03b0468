#include <benchmark/benchmark.h>

#include <random>

#include "olr/data.hpp"
#include "olr/loss.hpp"
#include "olr/mixing.hpp"
#include "olr/protocol.hpp"

namespace {

void BM_Mix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = 8;
  auto w = olr::MixingMatrix::max_degree_weights(olr::build_path(n));
  std::mt19937_64 rng(1);
  std::vector<Eigen::VectorXd> xs(n);
  for (auto& x : xs) x = olr::random_ball_vector(m, rng);
  for (auto _ : state) {
    auto out = w.mix(xs);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_Mix)->Arg(8)->Arg(32)->Arg(128);

void BM_SecondSingularValue(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto g = olr::build_cycle(n);
  const double dmax = g.max_degree();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j : g.in_neighbors(i)) w(i, j) = 1.0 / (1.0 + dmax);
    w(i, i) = 1.0 - g.degree(i) / (1.0 + dmax);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(olr::second_singular_value(w));
  }
}
BENCHMARK(BM_SecondSingularValue)->Arg(32)->Arg(64)->Arg(256);

void BM_RoundFif(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = 8;
  auto w = olr::MixingMatrix::max_degree_weights(olr::build_cycle(n));
  auto data = olr::gen_oblivious(n, m, 2, 1.0, 5.0, 0.1, 7);
  olr::AlgoParams params;
  params.variant = olr::Variant::Fif;
  params.horizon = 1024;
  params.beta = 0.75;
  params.alpha_h = 1.0;
  olr::resolve_params(params, n, m);
  std::vector<olr::NodeState> states(n);
  for (auto& s : states) s.x = Eigen::VectorXd::Zero(m);
  std::vector<olr::Sample> samples(n);
  for (int i = 0; i < n; ++i) samples[i] = data.sample(i, 1);
  for (auto _ : state) {
    olr::run_round(states, samples, w, params, 1, 99);
    benchmark::DoNotOptimize(states);
  }
}
BENCHMARK(BM_RoundFif)->Arg(8)->Arg(32);

void BM_TwoPointEstimate(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  olr::LossPoint p{olr::random_ball_vector(m, rng), 0.7};
  Eigen::VectorXd y = olr::random_ball_vector(m, rng);
  for (auto _ : state) {
    Eigen::VectorXd u = olr::random_unit_vector(m, rng);
    benchmark::DoNotOptimize(olr::two_point_estimate(p, y, u, 0.01, m));
  }
}
BENCHMARK(BM_TwoPointEstimate)->Arg(4)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
