#include "olr/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "olr/loss.hpp"
#include "olr/mixing.hpp"
#include "olr/rng.hpp"

namespace olr {

namespace {

// Seed lanes off master_seed.
constexpr std::uint64_t kLaneGraph = 0x11;
constexpr std::uint64_t kLaneYStar = 0x12;
constexpr std::uint64_t kLaneTrial = 0x13;
// Lanes off the per-trial seed.
constexpr std::uint64_t kLaneData = 0x01;
constexpr std::uint64_t kLaneStream = 0x02;

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& arr) {
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<int>(i)] = arr[i].get<double>();
  return v;
}

std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string ExperimentConfig::to_json_text() const {
  nlohmann::json doc;
  auto& g = doc["graph"];
  g["family"] = family_name(graph.family);
  g["n"] = graph.n;
  g["radius"] = graph.radius;
  g["k"] = graph.k;
  if (graph.seed) g["seed"] = *graph.seed;
  auto& d = doc["data"];
  d["mode"] = data_mode_name(data.mode);
  d["m"] = data.m;
  d["alpha_h"] = data.alpha_h;
  d["alpha_z"] = data.alpha_z;
  d["sigma_noise"] = data.sigma_noise;
  if (data.y_star) d["y_star"] = vector_to_json(*data.y_star);
  d["y_star_radius"] = data.y_star_radius;
  auto& a = doc["algo"];
  a["variant"] = variant_name(algo.variant);
  a["beta"] = algo.beta;
  a["gamma"] = algo.gamma;
  a["kappa"] = algo.kappa;
  if (algo.kappa_margin) a["kappa_margin"] = *algo.kappa_margin;
  a["c"] = algo.c;
  a["R"] = algo.ball_radius;
  a["r"] = algo.inner_radius;
  if (!algo.constraints.empty()) {
    auto& arr = a["constraints"] = nlohmann::json::array();
    for (const auto& k : algo.constraints) arr.push_back(vector_to_json(k));
  }
  if (algo.constraint_count > 0) {
    a["constraint_count"] = algo.constraint_count;
    a["constraint_seed"] = algo.constraint_seed;
  }
  doc["horizons"] = horizons;
  doc["trials"] = trials;
  doc["master_seed"] = master_seed;
  doc["out_prefix"] = out_prefix;
  if (record_predictors) doc["record_predictors"] = *record_predictors;
  doc["write_traces"] = write_traces;
  return doc.dump(2);
}

ExperimentConfig config_from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config parse failure: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    const auto& g = doc.at("graph");
    cfg.graph.family = family_from_name(g.at("family").get<std::string>());
    cfg.graph.n = g.at("n").get<int>();
    if (g.contains("radius")) cfg.graph.radius = g.at("radius").get<double>();
    if (g.contains("k")) cfg.graph.k = g.at("k").get<int>();
    if (g.contains("seed")) cfg.graph.seed = g.at("seed").get<std::uint64_t>();

    const auto& d = doc.at("data");
    cfg.data.mode = data_mode_from_name(d.at("mode").get<std::string>());
    cfg.data.m = d.at("m").get<int>();
    cfg.data.alpha_h = d.at("alpha_h").get<double>();
    if (d.contains("alpha_z")) cfg.data.alpha_z = d.at("alpha_z").get<double>();
    if (d.contains("sigma_noise")) cfg.data.sigma_noise = d.at("sigma_noise").get<double>();
    if (d.contains("y_star")) cfg.data.y_star = vector_from_json(d.at("y_star"));
    if (d.contains("y_star_radius")) cfg.data.y_star_radius = d.at("y_star_radius").get<double>();

    const auto& a = doc.at("algo");
    cfg.algo.variant = variant_from_name(a.at("variant").get<std::string>());
    if (a.contains("beta")) cfg.algo.beta = a.at("beta").get<double>();
    if (a.contains("gamma")) cfg.algo.gamma = a.at("gamma").get<double>();
    if (a.contains("kappa")) cfg.algo.kappa = a.at("kappa").get<double>();
    if (a.contains("kappa_margin")) cfg.algo.kappa_margin = a.at("kappa_margin").get<double>();
    if (a.contains("c")) cfg.algo.c = a.at("c").get<double>();
    if (a.contains("R")) cfg.algo.ball_radius = a.at("R").get<double>();
    if (a.contains("r")) cfg.algo.inner_radius = a.at("r").get<double>();
    if (a.contains("constraints"))
      for (const auto& row : a.at("constraints"))
        cfg.algo.constraints.push_back(vector_from_json(row));
    if (a.contains("constraint_count")) cfg.algo.constraint_count = a.at("constraint_count").get<int>();
    if (a.contains("constraint_seed")) cfg.algo.constraint_seed = a.at("constraint_seed").get<std::uint64_t>();

    cfg.horizons = doc.at("horizons").get<std::vector<int>>();
    cfg.trials = doc.at("trials").get<int>();
    cfg.master_seed = doc.at("master_seed").get<std::uint64_t>();
    cfg.out_prefix = doc.at("out_prefix").get<std::string>();
    if (doc.contains("record_predictors"))
      cfg.record_predictors = doc.at("record_predictors").get<bool>();
    if (doc.contains("write_traces"))
      cfg.write_traces = doc.at("write_traces").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config parse failure: ") + e.what());
  }
  return cfg;
}

std::string apply_overrides(const std::string& config_text,
                            const std::vector<std::string>& sets) {
  auto doc = nlohmann::json::parse(config_text);
  for (const auto& kv : sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("override must look like key.path=value: " + kv);
    std::string path = kv.substr(0, eq);
    std::string value = kv.substr(eq + 1);
    nlohmann::json* node = &doc;
    std::size_t start = 0;
    while (true) {
      auto dot = path.find('.', start);
      std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
      if (key.empty()) throw std::invalid_argument("empty key in override path: " + kv);
      if (dot == std::string::npos) {
        nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
        (*node)[key] = parsed.is_discarded() ? nlohmann::json(value) : parsed;
        break;
      }
      node = &(*node)[key];
      start = dot + 1;
    }
  }
  return doc.dump(2);
}

namespace {

struct ResolvedPieces {
  Graph graph;
  MixingMatrix w;
  std::shared_ptr<const Polytope> constraints;            // constrained variants
  std::shared_ptr<const DecisionSet> decision_set;        // BfAa
  std::shared_ptr<const DecisionSet> comparator_set;      // offline comparator domain
  Eigen::VectorXd y_star;                                 // exact mode plant
};

Graph build_graph(const ExperimentConfig& cfg) {
  std::uint64_t seed = cfg.graph.seed.value_or(derive_seed(cfg.master_seed, kLaneGraph));
  switch (cfg.graph.family) {
    case GraphFamily::Complete: return build_complete(cfg.graph.n);
    case GraphFamily::Path: return build_path(cfg.graph.n);
    case GraphFamily::Cycle: return build_cycle(cfg.graph.n);
    case GraphFamily::RandomGeometric:
      return build_random_geometric(cfg.graph.n, cfg.graph.radius, seed);
    case GraphFamily::RandomRegular:
      return build_random_regular(cfg.graph.n, cfg.graph.k, seed);
    case GraphFamily::Custom:
      throw std::invalid_argument("custom graphs load via JSON, not configs");
  }
  throw std::logic_error("unknown family");
}

std::shared_ptr<const Polytope> build_constraints(const ExperimentConfig& cfg) {
  if (!cfg.algo.constraints.empty())
    return std::make_shared<Polytope>(cfg.algo.constraints);
  if (cfg.algo.constraint_count > 0) {
    std::mt19937_64 rng(derive_seed(cfg.algo.constraint_seed, 0x6b));
    std::vector<Eigen::VectorXd> ks;
    ks.reserve(cfg.algo.constraint_count);
    for (int q = 0; q < cfg.algo.constraint_count; ++q)
      ks.push_back(random_unit_vector(cfg.data.m, rng));
    return std::make_shared<Polytope>(std::move(ks));
  }
  return nullptr;
}

AlgoParams make_params(const ExperimentConfig& cfg, const ResolvedPieces& pieces, int T) {
  AlgoParams p;
  p.variant = cfg.algo.variant;
  p.horizon = T;
  p.beta = cfg.algo.beta;
  p.gamma = cfg.algo.gamma;
  p.kappa = cfg.algo.kappa;
  if (cfg.algo.kappa_margin) {
    const double n = cfg.graph.n, m = cfg.data.m, ah = cfg.data.alpha_h;
    if (ah < n) p.kappa = *cfg.algo.kappa_margin * 2.0 * n * m * m * ah / (n - ah);
  }
  p.c = cfg.algo.c;
  p.alpha_h = cfg.data.alpha_h;
  p.ball_radius = cfg.algo.ball_radius;
  p.inner_radius = cfg.algo.inner_radius;
  p.constraints = pieces.constraints;
  p.decision_set = pieces.decision_set;
  return p;
}

ResolvedPieces resolve_pieces(const ExperimentConfig& cfg) {
  Graph graph = build_graph(cfg);
  MixingMatrix w = MixingMatrix::max_degree_weights(graph);
  ResolvedPieces pieces{std::move(graph), std::move(w), nullptr, nullptr, nullptr, {}};
  pieces.constraints = build_constraints(cfg);
  if (cfg.algo.variant == Variant::BfAa) {
    if (pieces.constraints)
      pieces.decision_set =
          std::make_shared<PolytopeBall>(*pieces.constraints, cfg.algo.ball_radius);
    else
      pieces.decision_set = std::make_shared<Ball>(cfg.algo.ball_radius);
    pieces.comparator_set = pieces.decision_set;
  } else if (variant_is_constrained(cfg.algo.variant)) {
    if (pieces.constraints)
      pieces.comparator_set =
          std::make_shared<PolytopeBall>(*pieces.constraints, cfg.algo.ball_radius);
  }
  if (cfg.data.mode == DataMode::Exact) {
    if (cfg.data.y_star) {
      pieces.y_star = *cfg.data.y_star;
    } else {
      std::mt19937_64 rng(derive_seed(cfg.master_seed, kLaneYStar));
      pieces.y_star = cfg.data.y_star_radius * random_ball_vector(cfg.data.m, rng);
    }
  }
  return pieces;
}

}  // namespace

ValidationReport cmd_validate(const ExperimentConfig& cfg) {
  ValidationReport report;
  auto fail = [&](std::string msg) { report.violations.push_back(std::move(msg)); };

  if (cfg.horizons.empty()) fail("horizons must not be empty");
  for (std::size_t i = 1; i < cfg.horizons.size(); ++i)
    if (cfg.horizons[i] <= cfg.horizons[i - 1]) {
      fail("horizons must be strictly increasing");
      break;
    }
  for (int T : cfg.horizons)
    if (T < 1) fail("horizons must be positive");
  if (cfg.trials < 1) fail("trials must be >= 1");
  if (cfg.data.m < 1) fail("data dimension m must be >= 1");
  if (cfg.data.mode != DataMode::Adaptive && cfg.graph.n < cfg.data.m)
    fail("rank condition needs n >= m for generated data");
  if (cfg.data.mode == DataMode::Exact && cfg.data.y_star &&
      cfg.data.y_star->size() != cfg.data.m)
    fail("y_star dimension must equal m");
  if (!cfg.algo.constraints.empty())
    for (const auto& k : cfg.algo.constraints)
      if (k.size() != cfg.data.m) {
        fail("constraint dimension must equal m");
        break;
      }

  ResolvedPieces pieces = [&]() -> ResolvedPieces {
    try {
      return resolve_pieces(cfg);
    } catch (const std::exception& e) {
      fail(std::string("graph/constraint construction: ") + e.what());
      Graph trivial = build_complete(1);
      MixingMatrix w = MixingMatrix::from_matrix(Eigen::MatrixXd::Ones(1, 1));
      return ResolvedPieces{std::move(trivial), std::move(w), nullptr, nullptr, nullptr, {}};
    }
  }();

  std::vector<std::string> seen;
  for (int T : cfg.horizons) {
    if (T < 1) continue;
    AlgoParams p = make_params(cfg, pieces, T);
    for (auto& msg : resolve_params(p, cfg.graph.n, cfg.data.m)) {
      if (std::find(seen.begin(), seen.end(), msg) != seen.end()) continue;
      seen.push_back(msg);
      if (msg.rfind("warning:", 0) == 0)
        report.warnings.push_back(msg.substr(9));
      else
        report.violations.push_back("T=" + std::to_string(T) + ": " + msg);
    }
  }
  return report;
}

namespace {

struct CellResult {
  int horizon = 0;
  int trial = 0;
  double regret_max = 0.0;
  double regret_mean = 0.0;
  double regret_l1_max = std::nan("");
  double cv_final = 0.0;
  double cum_disagreement = 0.0;
  std::string trace_file;
};

struct CellKey {
  int horizon;
  int trial;
};

CellResult run_cell(const ExperimentConfig& cfg, const ResolvedPieces& pieces,
                    const CellKey& key) {
  const int n = cfg.graph.n, m = cfg.data.m, T = key.horizon;
  const std::uint64_t trial_seed =
      derive_seed(cfg.master_seed, kLaneTrial, static_cast<std::uint64_t>(key.trial));
  const std::uint64_t data_seed = derive_seed(trial_seed, kLaneData);
  const std::uint64_t stream_seed = derive_seed(trial_seed, kLaneStream);

  AlgoParams params = make_params(cfg, pieces, T);
  auto bad = resolve_params(params, n, m);
  for (const auto& msg : bad)
    if (msg.rfind("warning:", 0) != 0)
      throw std::invalid_argument("invalid params: " + msg);

  RunOptions options;
  options.record_predictors =
      cfg.record_predictors.value_or(cfg.data.mode == DataMode::Exact);

  RunOutput output = [&] {
    switch (cfg.data.mode) {
      case DataMode::Oblivious: {
        DataTensor data = gen_oblivious(n, m, T, cfg.data.alpha_h, cfg.data.alpha_z,
                                        cfg.data.sigma_noise, data_seed);
        return run(params, pieces.w, data, stream_seed, options);
      }
      case DataMode::Exact: {
        DataTensor data = gen_exact(n, m, T, cfg.data.alpha_h, pieces.y_star, data_seed);
        return run(params, pieces.w, data, stream_seed, options);
      }
      case DataMode::Adaptive: {
        auto adversary =
            make_tracking_adversary(cfg.data.alpha_h, cfg.data.alpha_z, data_seed);
        return run_adaptive(params, pieces.w, *adversary, m, stream_seed, options);
      }
    }
    throw std::logic_error("unknown data mode");
  }();

  Eigen::VectorXd comparator =
      pieces.comparator_set ? offline_ls_constrained(output.data, *pieces.comparator_set)
                            : offline_ls_unconstrained(output.data);
  auto regret = regret_ls(output.trace, output.data, comparator);

  CellResult result;
  result.horizon = T;
  result.trial = key.trial;
  result.regret_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    double final = regret[i].back();
    result.regret_max = std::max(result.regret_max, final);
    result.regret_mean += final / n;
  }
  if (cfg.data.mode == DataMode::Exact && output.trace.has_predictors()) {
    auto l1 = regret_l1(output.trace, output.data);
    result.regret_l1_max = 0.0;
    for (int i = 0; i < n; ++i)
      result.regret_l1_max = std::max(result.regret_l1_max, l1[i].back());
  }
  result.cv_final = cumulative_violation(output.trace).back();
  for (double d : output.trace.disagreement) result.cum_disagreement += d;

  if (cfg.write_traces) {
    std::string stem = cfg.out_prefix + "_" + variant_name(cfg.algo.variant) +
                       "_n" + std::to_string(n) + "_T" + std::to_string(T) +
                       "_trial" + std::to_string(key.trial) + "_seed" +
                       std::to_string(cfg.master_seed);
    output.trace.write_csv(stem + ".csv", stem + ".params.json");
    result.trace_file = stem + ".csv";
  }
  return result;
}

std::vector<CellResult> run_cells(const ExperimentConfig& cfg,
                                  const ResolvedPieces& pieces, int threads) {
  std::vector<CellKey> cells;
  for (int T : cfg.horizons)
    for (int k = 0; k < cfg.trials; ++k) cells.push_back({T, k});
  std::vector<CellResult> results(cells.size());
  std::vector<std::string> errors(cells.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (;;) {
      std::size_t c = cursor.fetch_add(1);
      if (c >= cells.size()) return;
      try {
        results[c] = run_cell(cfg, pieces, cells[c]);
      } catch (const std::exception& e) {
        errors[c] = "(T=" + std::to_string(cells[c].horizon) +
                    ", trial=" + std::to_string(cells[c].trial) + "): " + e.what();
      }
    }
  };
  const int pool = std::max(1, std::min<int>(threads, static_cast<int>(cells.size())));
  std::vector<std::thread> workers;
  workers.reserve(pool);
  for (int w = 0; w < pool; ++w) workers.emplace_back(worker);
  for (auto& w : workers) w.join();
  for (const auto& err : errors)
    if (!err.empty()) throw std::runtime_error("cell failed " + err);
  return results;
}

void write_finals_csv(const std::string& path, const ExperimentConfig& cfg,
                      const std::vector<CellResult>& results) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "variant,family,n,m,T,trial,seed,final_regret_max,final_regret_mean,"
         "final_cv,cum_disagreement,final_l1_max\n";
  for (const auto& r : results) {
    out << variant_name(cfg.algo.variant) << ',' << family_name(cfg.graph.family)
        << ',' << cfg.graph.n << ',' << cfg.data.m << ',' << r.horizon << ','
        << r.trial << ',' << cfg.master_seed << ',' << format_g17(r.regret_max)
        << ',' << format_g17(r.regret_mean) << ',' << format_g17(r.cv_final) << ','
        << format_g17(r.cum_disagreement) << ',' << format_g17(r.regret_l1_max)
        << '\n';
  }
}

struct HorizonAggregate {
  int horizon = 0;
  double regret_max_mean = 0.0, regret_max_se = 0.0;
  double cv_mean = 0.0;
  double disagreement_mean = 0.0;
  double l1_max_mean = std::nan("");
};

std::vector<HorizonAggregate> aggregate(const ExperimentConfig& cfg,
                                        const std::vector<CellResult>& results) {
  std::vector<HorizonAggregate> rows;
  for (int T : cfg.horizons) {
    HorizonAggregate row;
    row.horizon = T;
    std::vector<double> regrets;
    double l1 = 0.0;
    bool has_l1 = true;
    for (const auto& r : results) {
      if (r.horizon != T) continue;
      regrets.push_back(r.regret_max);
      row.cv_mean += r.cv_final;
      row.disagreement_mean += r.cum_disagreement;
      if (std::isnan(r.regret_l1_max)) has_l1 = false;
      else l1 += r.regret_l1_max;
    }
    const double k = static_cast<double>(regrets.size());
    for (double v : regrets) row.regret_max_mean += v / k;
    if (regrets.size() > 1) {
      double var = 0.0;
      for (double v : regrets)
        var += (v - row.regret_max_mean) * (v - row.regret_max_mean);
      row.regret_max_se = std::sqrt(var / (k - 1) / k);
    }
    row.cv_mean /= k;
    row.disagreement_mean /= k;
    if (has_l1) row.l1_max_mean = l1 / k;
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json fit_to_json(const ExponentFit& fit) {
  return {{"slope", fit.slope},
          {"intercept", fit.intercept},
          {"r_squared", fit.r_squared},
          {"points", fit.horizons_used.size()}};
}

}  // namespace

RunArtifacts cmd_run(const ExperimentConfig& cfg, int threads) {
  auto report = cmd_validate(cfg);
  if (!report.ok()) {
    std::string msg = "config failed validation:";
    for (const auto& v : report.violations) msg += "\n  " + v;
    throw std::invalid_argument(msg);
  }

  std::filesystem::path prefix(cfg.out_prefix);
  if (prefix.has_parent_path())
    std::filesystem::create_directories(prefix.parent_path());

  ResolvedPieces pieces = resolve_pieces(cfg);
  std::vector<CellResult> results = run_cells(cfg, pieces, threads);
  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) {
    return std::tie(a.horizon, a.trial) < std::tie(b.horizon, b.trial);
  });

  RunArtifacts artifacts;
  for (const auto& r : results) artifacts.trace_files.push_back(r.trace_file);
  artifacts.finals_file = cfg.out_prefix + "_finals.csv";
  write_finals_csv(artifacts.finals_file, cfg, results);

  auto rows = aggregate(cfg, results);
  nlohmann::json summary;
  summary["config"] = nlohmann::json::parse(cfg.to_json_text());
  summary["graph_sigma2"] = pieces.w.sigma2();
  auto& per = summary["per_horizon"] = nlohmann::json::array();
  std::vector<double> hs, regret_finals, cv_finals, disagreement_finals;
  for (const auto& row : rows) {
    nlohmann::json entry;
    entry["T"] = row.horizon;
    entry["regret_max_mean"] = row.regret_max_mean;
    entry["regret_max_se"] = row.regret_max_se;
    entry["cv_mean"] = row.cv_mean;
    entry["cum_disagreement_mean"] = row.disagreement_mean;
    if (!std::isnan(row.l1_max_mean)) entry["l1_max_mean"] = row.l1_max_mean;
    per.push_back(std::move(entry));
    hs.push_back(row.horizon);
    regret_finals.push_back(row.regret_max_mean);
    cv_finals.push_back(row.cv_mean);
    disagreement_finals.push_back(row.disagreement_mean);
  }
  long usable = std::count_if(hs.begin(), hs.end(), [](double t) { return t >= 64.0; });
  if (usable >= 4) {
    summary["fits"]["regret_max"] = fit_to_json(fit_exponent(hs, regret_finals));
    summary["fits"]["cum_disagreement"] =
        fit_to_json(fit_exponent(hs, disagreement_finals));
    if (variant_is_constrained(cfg.algo.variant))
      summary["fits"]["cv"] = fit_to_json(fit_exponent(hs, cv_finals));
  }
  summary["files"] = artifacts.trace_files;

  artifacts.summary_file = cfg.out_prefix + "_summary.json";
  std::ofstream out(artifacts.summary_file);
  if (!out) throw std::runtime_error("cannot open " + artifacts.summary_file);
  out << summary.dump(2) << "\n";
  return artifacts;
}

std::string cmd_sweep(const ExperimentConfig& cfg, const std::string& dotted_path,
                      const std::vector<std::string>& values, int threads) {
  std::filesystem::path prefix(cfg.out_prefix);
  if (prefix.has_parent_path())
    std::filesystem::create_directories(prefix.parent_path());
  std::string table_path = cfg.out_prefix + "_sweep.csv";
  std::ofstream out(table_path);
  if (!out) throw std::runtime_error("cannot open " + table_path);
  out << "param,value,T,regret_max_mean,cv_mean,cum_disagreement_mean,"
         "slope_regret,r2_regret\n";

  const std::string base = cfg.to_json_text();
  for (const auto& value : values) {
    std::string text = apply_overrides(base, {dotted_path + "=" + value});
    ExperimentConfig sub = config_from_json_text(text);
    std::string tag = value;
    std::replace(tag.begin(), tag.end(), '.', 'p');
    sub.out_prefix = cfg.out_prefix + "_" + dotted_path + "-" + tag;
    RunArtifacts artifacts = cmd_run(sub, threads);

    std::ifstream summary_in(artifacts.summary_file);
    nlohmann::json summary = nlohmann::json::parse(summary_in);
    double slope = std::nan(""), r2 = std::nan("");
    if (summary.contains("fits")) {
      slope = summary["fits"]["regret_max"]["slope"].get<double>();
      r2 = summary["fits"]["regret_max"]["r_squared"].get<double>();
    }
    for (const auto& row : summary["per_horizon"]) {
      out << dotted_path << ',' << value << ',' << row["T"].get<int>() << ','
          << format_g17(row["regret_max_mean"].get<double>()) << ','
          << format_g17(row["cv_mean"].get<double>()) << ','
          << format_g17(row["cum_disagreement_mean"].get<double>()) << ','
          << format_g17(slope) << ',' << format_g17(r2) << '\n';
    }
  }
  return table_path;
}

std::string FitSummary::to_json() const {
  nlohmann::json doc{{"final", final},
                     {"slope", slope},
                     {"r_squared", r_squared},
                     {"stderr", std_error}};
  return doc.dump();
}

FitSummary cmd_fit(const std::string& finals_csv, const std::string& metric) {
  std::ifstream in(finals_csv);
  if (!in) throw std::runtime_error("cannot open " + finals_csv);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty finals table");
  std::vector<std::string> columns;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) columns.push_back(cell);
  }
  auto metric_it = std::find(columns.begin(), columns.end(), metric);
  auto horizon_it = std::find(columns.begin(), columns.end(), "T");
  if (metric_it == columns.end())
    throw std::invalid_argument("finals table has no column " + metric);
  if (horizon_it == columns.end())
    throw std::invalid_argument("finals table has no column T");
  const std::size_t metric_col = metric_it - columns.begin();
  const std::size_t horizon_col = horizon_it - columns.begin();

  std::map<int, std::vector<double>> by_horizon;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    by_horizon[std::stoi(cells.at(horizon_col))].push_back(
        std::strtod(cells.at(metric_col).c_str(), nullptr));
  }

  std::vector<double> hs, means;
  double last_se = 0.0;
  for (const auto& [T, vals] : by_horizon) {
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= vals.size();
    hs.push_back(T);
    means.push_back(mean);
    if (vals.size() > 1) {
      double var = 0.0;
      for (double v : vals) var += (v - mean) * (v - mean);
      last_se = std::sqrt(var / (vals.size() - 1) / vals.size());
    } else {
      last_se = 0.0;
    }
  }
  ExponentFit fit = fit_exponent(hs, means);
  FitSummary out;
  out.final = means.back();
  out.slope = fit.slope;
  out.r_squared = fit.r_squared;
  out.std_error = last_se;
  return out;
}

}  // namespace olr
