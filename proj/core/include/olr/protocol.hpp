#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "olr/data.hpp"
#include "olr/geometry.hpp"
#include "olr/mixing.hpp"
#include "olr/trace.hpp"

namespace olr {

// The six per-round update rules.
//   Fif   full-information gradient step, unbounded decisions
//   Bf    two-point bandit gradient step, unbounded decisions
//   BfAa  bandit step with projection onto a shrunk compact decision set
//   Fifc  full-information primal-dual step with long-term constraints
//   Bfc   bandit primal-dual step with long-term constraints
//   Elr   per-sample hyperplane projection (exactly realizable data)
enum class Variant { Fif, Bf, BfAa, Fifc, Bfc, Elr };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

bool variant_is_bandit(Variant v);
bool variant_is_constrained(Variant v);

// All tuning scalars of a run. The step sizes depend on the horizon, so T
// is fixed up front; resolve_params derives eta, pi, eps, xi from it.
struct AlgoParams {
  Variant variant = Variant::Fif;
  int horizon = 0;  // T

  double beta = 0.75;       // step-size exponent
  double gamma = 0.5;       // exploration exponent (Bfc; requires gamma >= beta)
  double kappa = 1.0;       // bandit step scale (Bf)
  double c = 2.0;           // constrained step scale, > 1
  double alpha_h = 1.0;     // known bound on ||h||^2
  double ball_radius = 1.0;   // R
  double inner_radius = 1.0;  // r, inner-ball radius of the decision set

  std::shared_ptr<const DecisionSet> decision_set;  // BfAa
  std::shared_ptr<const Polytope> constraints;      // Fifc / Bfc

  // derived by resolve_params
  double eta = 0.0;
  double pi = 0.0;
  double eps = 0.0;
  double xi = 0.0;
  std::shared_ptr<const DecisionSet> shrunk_set;  // (1 - xi) K, BfAa

  std::string to_json() const;
};

// Fills the derived scalars for a network of n nodes and dimension m, and
// returns the violated hypotheses (empty when clean). Entries prefixed
// "warning:" flag a broken regret guarantee but do not block a run.
std::vector<std::string> resolve_params(AlgoParams& params, int n, int m);

struct NodeState {
  Eigen::VectorXd x;
  Eigen::VectorXd mu;  // dual variables, constrained variants only
};

Eigen::VectorXd local_step_fif(const NodeState& state, const Sample& sample,
                               double eta);

// Consumes exactly one unit vector from rng.
Eigen::VectorXd local_step_bf(const NodeState& state, const Sample& sample,
                              double eta, double eps, std::mt19937_64& rng);

// Gradient step on the augmented Lagrangian: data gradient (exact or
// two-point, per `bandit`) plus sum_q mu_q d[k_q^T x]_+.
Eigen::VectorXd local_step_constrained(const NodeState& state,
                                       const Sample& sample, bool bandit,
                                       const AlgoParams& params,
                                       std::mt19937_64& rng);

// mu_q = [k_q^T x_next]_+ / pi
Eigen::VectorXd dual_update(const Eigen::VectorXd& x_next, const Polytope& p,
                            double pi);

// Projection of x onto the hyperplane h^T y = z (skipped for ||h|| < 1e-12).
Eigen::VectorXd local_step_elr(const NodeState& state, const Sample& sample);

// One synchronous round at time t: local steps, one mixing round, the
// variant's projection, and the dual update. Bandit unit vectors come from
// streams derived as (stream_seed, node, t).
void run_round(std::vector<NodeState>& states,
               const std::vector<Sample>& round_samples, const MixingMatrix& w,
               const AlgoParams& params, int t, std::uint64_t stream_seed);

struct RunOptions {
  std::vector<Eigen::VectorXd> x_init;  // empty: zero vectors
  bool record_predictors = true;
};

struct RunOutput {
  RunTrace trace;
  DataTensor data;  // echo of the input, or the materialized adaptive stream
};

// Runs T = params.horizon rounds against a pregenerated stream. The trace
// records x_i(t) before round t's update, the network-wide losses of every
// node against all nodes' round-t samples, disagreement, and constraint
// violation increments.
RunOutput run(const AlgoParams& params, const MixingMatrix& w,
              const DataTensor& data, std::uint64_t stream_seed,
              const RunOptions& options = {});

// Same against an adaptive adversary; the adversary sees only each node's
// own (h, z, x) history, never the exploration directions.
RunOutput run_adaptive(const AlgoParams& params, const MixingMatrix& w,
                       AdaptiveAdversary& adversary, int dim,
                       std::uint64_t stream_seed,
                       const RunOptions& options = {});

}  // namespace olr
