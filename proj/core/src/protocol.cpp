#include "olr/protocol.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "olr/loss.hpp"
#include "olr/rng.hpp"

namespace olr {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::Fif: return "fif";
    case Variant::Bf: return "bf";
    case Variant::BfAa: return "bf_aa";
    case Variant::Fifc: return "fifc";
    case Variant::Bfc: return "bfc";
    case Variant::Elr: return "elr";
  }
  throw std::logic_error("unknown variant");
}

Variant variant_from_name(const std::string& name) {
  if (name == "fif") return Variant::Fif;
  if (name == "bf") return Variant::Bf;
  if (name == "bf_aa") return Variant::BfAa;
  if (name == "fifc") return Variant::Fifc;
  if (name == "bfc") return Variant::Bfc;
  if (name == "elr") return Variant::Elr;
  throw std::invalid_argument("unknown variant: " + name);
}

bool variant_is_bandit(Variant v) {
  return v == Variant::Bf || v == Variant::BfAa || v == Variant::Bfc;
}

bool variant_is_constrained(Variant v) {
  return v == Variant::Fifc || v == Variant::Bfc;
}

std::string AlgoParams::to_json() const {
  nlohmann::json doc;
  doc["variant"] = variant_name(variant);
  doc["T"] = horizon;
  doc["beta"] = beta;
  doc["gamma"] = gamma;
  doc["kappa"] = kappa;
  doc["c"] = c;
  doc["alpha_h"] = alpha_h;
  doc["R"] = ball_radius;
  doc["r"] = inner_radius;
  doc["eta"] = eta;
  doc["pi"] = pi;
  doc["eps"] = eps;
  doc["xi"] = xi;
  if (constraints) doc["s"] = constraints->size();
  return doc.dump();
}

std::vector<std::string> resolve_params(AlgoParams& p, int n, int m) {
  std::vector<std::string> bad;
  auto fail = [&](std::string msg) { bad.push_back(std::move(msg)); };

  if (p.horizon < 1) fail("horizon T must be >= 1");
  if (!(p.alpha_h > 0.0)) fail("alpha_h must be positive");
  const double tpow = p.horizon >= 1 ? std::pow(p.horizon, p.beta) : 1.0;

  p.eta = p.pi = p.eps = p.xi = 0.0;
  p.shrunk_set.reset();

  switch (p.variant) {
    case Variant::Fif:
      if (!(p.beta > 0.0) || p.beta > 1.0) fail("fif requires beta in (0, 1]");
      if (bad.empty()) p.eta = 1.0 / (p.alpha_h * tpow);
      break;

    case Variant::Bf: {
      if (!(p.beta > 0.0) || p.beta > 1.0) fail("bf requires beta in (0, 1]");
      if (!(p.kappa > 0.0)) fail("bf requires kappa > 0");
      if (p.alpha_h >= n) {
        // The algorithm still runs; only the expected-regret guarantee
        // loses its hypothesis.
        bad.push_back("warning: bf regret guarantee needs alpha_h < n (got alpha_h=" +
                      std::to_string(p.alpha_h) + ", n=" + std::to_string(n) + ")");
      } else {
        const double kappa_min = 2.0 * n * m * m * p.alpha_h / (n - p.alpha_h);
        if (!(p.kappa > kappa_min))
          fail("bf requires kappa > 2 n m^2 alpha_h / (n - alpha_h) = " +
               std::to_string(kappa_min));
      }
      if (p.kappa > 0.0 && p.horizon >= 1) {
        p.eta = 1.0 / (p.kappa * tpow);
        p.eps = 1.0 / std::sqrt(static_cast<double>(p.horizon));
      }
      break;
    }

    case Variant::BfAa: {
      if (std::abs(p.beta - 0.5) > 1e-12) fail("bf_aa pins beta = 1/2");
      if (std::abs(p.kappa - 1.0) > 1e-12) fail("bf_aa pins kappa = 1");
      if (!p.decision_set) fail("bf_aa requires a decision set");
      if (!(p.inner_radius > 0.0)) fail("bf_aa requires inner radius r > 0");
      const double t_min = std::ceil(1.0 / (p.inner_radius * p.inner_radius));
      if (p.horizon < t_min)
        fail("bf_aa requires T >= ceil(1/r^2) = " + std::to_string(static_cast<long long>(t_min)));
      if (bad.empty()) {
        p.eps = 1.0 / std::sqrt(static_cast<double>(p.horizon));
        p.eta = 1.0 / std::sqrt(static_cast<double>(p.horizon));
        p.xi = p.eps / p.inner_radius;
        p.shrunk_set = p.decision_set->shrink(p.xi);
      }
      break;
    }

    case Variant::Fifc:
    case Variant::Bfc: {
      if (!(p.beta > 0.0) || !(p.beta < 1.0)) fail("constrained variants require beta in (0, 1)");
      if (!(p.c > 1.0)) fail("constrained variants require c > 1");
      if (!p.constraints) fail("constrained variants require a constraint polytope");
      if (!(p.ball_radius > 0.0)) fail("constrained variants require R > 0");
      if (p.variant == Variant::Bfc && p.gamma < p.beta)
        fail("bfc requires gamma >= beta");
      if (!bad.empty()) break;
      const double s = p.constraints->size();
      const double ki = p.constraints->norm_bound();
      if (!(ki > 0.0)) {
        fail("constraint norms must not all vanish");
        break;
      }
      p.eta = 1.0 / (p.c * s * ki * ki * tpow);
      p.pi = 1.0 / tpow;
      if (p.variant == Variant::Bfc) {
        const double tgamma = std::pow(p.horizon, p.gamma);
        p.eps = 1.0 / tgamma;
        p.xi = 1.0 / (p.ball_radius * tgamma);
        if (p.xi >= 1.0) fail("bfc shrinkage xi = 1/(R T^gamma) must be below 1");
      }
      break;
    }

    case Variant::Elr:
      break;
  }
  return bad;
}

Eigen::VectorXd local_step_fif(const NodeState& state, const Sample& sample,
                               double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("local_step_fif: eta > 0");
  return state.x - eta * grad(LossPoint{sample.h, sample.z}, state.x);
}

Eigen::VectorXd local_step_bf(const NodeState& state, const Sample& sample,
                              double eta, double eps, std::mt19937_64& rng) {
  const int m = static_cast<int>(state.x.size());
  Eigen::VectorXd u = random_unit_vector(m, rng);
  Eigen::VectorXd g =
      two_point_estimate(LossPoint{sample.h, sample.z}, state.x, u, eps, m);
  return state.x - eta * g;
}

Eigen::VectorXd local_step_constrained(const NodeState& state,
                                       const Sample& sample, bool bandit,
                                       const AlgoParams& params,
                                       std::mt19937_64& rng) {
  if (!params.constraints) throw std::invalid_argument("constraints missing");
  if (state.mu.size() != params.constraints->size())
    throw std::invalid_argument("dual vector size mismatch");
  const int m = static_cast<int>(state.x.size());
  Eigen::VectorXd direction;
  if (bandit) {
    Eigen::VectorXd u = random_unit_vector(m, rng);
    direction = two_point_estimate(LossPoint{sample.h, sample.z}, state.x, u,
                                   params.eps, m);
  } else {
    direction = grad(LossPoint{sample.h, sample.z}, state.x);
  }
  const auto& ks = params.constraints->constraints();
  for (int q = 0; q < params.constraints->size(); ++q) {
    if (ks[q].dot(state.x) > 0.0) direction += state.mu[q] * ks[q];
  }
  return state.x - params.eta * direction;
}

Eigen::VectorXd dual_update(const Eigen::VectorXd& x_next, const Polytope& p,
                            double pi) {
  if (!(pi > 0.0)) throw std::invalid_argument("dual_update: pi > 0");
  Eigen::VectorXd mu(p.size());
  const auto& ks = p.constraints();
  for (int q = 0; q < p.size(); ++q) mu[q] = hinge(ks[q].dot(x_next)) / pi;
  return mu;
}

Eigen::VectorXd local_step_elr(const NodeState& state, const Sample& sample) {
  double sq = sample.h.squaredNorm();
  if (sq < 1e-24) return state.x;  // degenerate covariate: skip
  return state.x - sample.h * ((sample.h.dot(state.x) - sample.z) / sq);
}

void run_round(std::vector<NodeState>& states,
               const std::vector<Sample>& round_samples, const MixingMatrix& w,
               const AlgoParams& params, int t, std::uint64_t stream_seed) {
  const int n = static_cast<int>(states.size());
  if (static_cast<int>(round_samples.size()) != n)
    throw std::invalid_argument("run_round: one sample per node required");

  std::vector<Eigen::VectorXd> locals(n);
  for (int i = 0; i < n; ++i) {
    std::mt19937_64 rng(derive_seed(stream_seed, static_cast<std::uint64_t>(i),
                                    static_cast<std::uint64_t>(t)));
    switch (params.variant) {
      case Variant::Fif:
        locals[i] = local_step_fif(states[i], round_samples[i], params.eta);
        break;
      case Variant::Bf:
      case Variant::BfAa:
        locals[i] = local_step_bf(states[i], round_samples[i], params.eta,
                                  params.eps, rng);
        break;
      case Variant::Fifc:
      case Variant::Bfc:
        locals[i] = local_step_constrained(states[i], round_samples[i],
                                           params.variant == Variant::Bfc,
                                           params, rng);
        break;
      case Variant::Elr:
        locals[i] = local_step_elr(states[i], round_samples[i]);
        break;
    }
  }

  std::vector<Eigen::VectorXd> mixed = w.mix(locals);

  for (int i = 0; i < n; ++i) {
    switch (params.variant) {
      case Variant::BfAa:
        states[i].x = params.shrunk_set->project(mixed[i]);
        break;
      case Variant::Fifc:
        states[i].x = project_ball(mixed[i], params.ball_radius);
        break;
      case Variant::Bfc:
        states[i].x =
            project_ball(mixed[i], (1.0 - params.xi) * params.ball_radius);
        break;
      default:
        states[i].x = std::move(mixed[i]);
        break;
    }
    if (variant_is_constrained(params.variant))
      states[i].mu = dual_update(states[i].x, *params.constraints, params.pi);
  }
}

namespace {

RunOutput run_impl(const AlgoParams& params, const MixingMatrix& w,
                   const DataTensor* data, AdaptiveAdversary* adversary,
                   int dim, std::uint64_t stream_seed,
                   const RunOptions& options) {
  const int n = w.size();
  const int T = params.horizon;
  if (T < 1) throw std::invalid_argument("run: horizon >= 1 required");
  if (params.variant != Variant::Elr && !(params.eta > 0.0))
    throw std::invalid_argument("run: params not resolved (eta = 0)");
  if (data) {
    if (data->nodes() != n) throw std::invalid_argument("run: node count mismatch");
    if (data->horizon() < T) throw std::invalid_argument("run: data shorter than horizon");
    dim = data->dim();
  }

  std::vector<NodeState> states(n);
  for (int i = 0; i < n; ++i) {
    states[i].x = options.x_init.empty() ? Eigen::VectorXd::Zero(dim).eval()
                                         : options.x_init.at(i);
    if (states[i].x.size() != dim)
      throw std::invalid_argument("run: x_init dimension mismatch");
    if (variant_is_constrained(params.variant))
      states[i].mu = Eigen::VectorXd::Zero(params.constraints->size());
  }

  RunOutput out{RunTrace{}, data ? *data
                                 : DataTensor(n, dim, T,
                                              DataMeta{DataMode::Adaptive,
                                                       stream_seed, params.alpha_h,
                                                       0.0, 0.0, std::nullopt})};
  RunTrace& trace = out.trace;
  trace.nodes = n;
  trace.dim = dim;
  trace.horizon = T;
  trace.params_json = params.to_json();
  if (options.record_predictors)
    trace.predictors.assign(T, std::vector<Eigen::VectorXd>(n));
  trace.network_loss.assign(T, std::vector<double>(n, 0.0));
  trace.disagreement.assign(T, 0.0);
  trace.cv_increment.assign(T, 0.0);

  std::vector<std::vector<HistoryEntry>> histories(adversary ? n : 0);
  std::vector<Sample> round_samples(n);

  for (int t = 1; t <= T; ++t) {
    for (int i = 0; i < n; ++i) {
      if (adversary) {
        round_samples[i] = adversary->next(i, t, dim, histories[i]);
        out.data.sample(i, t) = round_samples[i];
      } else {
        round_samples[i] = data->sample(i, t);
      }
    }

    // Metrics use the predictor held entering round t.
    Eigen::VectorXd xavg = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < n; ++i) xavg += states[i].x;
    xavg /= n;
    for (int i = 0; i < n; ++i) {
      if (options.record_predictors) trace.predictors[t - 1][i] = states[i].x;
      trace.disagreement[t - 1] += (states[i].x - xavg).norm();
      double total = 0.0;
      for (int j = 0; j < n; ++j)
        total += loss(LossPoint{round_samples[j].h, round_samples[j].z}, states[i].x);
      trace.network_loss[t - 1][i] = total;
      if (params.constraints) {
        for (const auto& k : params.constraints->constraints())
          trace.cv_increment[t - 1] += hinge(k.dot(states[i].x));
      }
      if (adversary)
        histories[i].push_back({round_samples[i].h, round_samples[i].z, states[i].x});
    }

    run_round(states, round_samples, w, params, t, stream_seed);
  }
  return out;
}

}  // namespace

RunOutput run(const AlgoParams& params, const MixingMatrix& w,
              const DataTensor& data, std::uint64_t stream_seed,
              const RunOptions& options) {
  return run_impl(params, w, &data, nullptr, data.dim(), stream_seed, options);
}

RunOutput run_adaptive(const AlgoParams& params, const MixingMatrix& w,
                       AdaptiveAdversary& adversary, int dim,
                       std::uint64_t stream_seed, const RunOptions& options) {
  return run_impl(params, w, nullptr, &adversary, dim, stream_seed, options);
}

}  // namespace olr
