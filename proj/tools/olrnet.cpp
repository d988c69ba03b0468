// Command line front end: validate / run / sweep / fit over JSON experiment
// configs. Exit codes: 0 success, 2 validation failure, 1 runtime error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "olr/experiment.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  int threads = 1;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

olr::ExperimentConfig load_config(const CommonOptions& opt) {
  std::string text = read_file(opt.config_path);
  if (!opt.sets.empty()) text = olr::apply_overrides(text, opt.sets);
  olr::ExperimentConfig cfg = olr::config_from_json_text(text);
  if (opt.seed_given) cfg.master_seed = opt.seed;
  if (!opt.out_dir.empty()) {
    std::string base = cfg.out_prefix;
    auto slash = base.find_last_of('/');
    if (slash != std::string::npos) base = base.substr(slash + 1);
    cfg.out_prefix = opt.out_dir + "/" + base;
  }
  return cfg;
}

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--config", opt.config_path, "experiment config JSON")->required();
  cmd->add_option("--set", opt.sets, "override config field, e.g. algo.beta=0.5");
  cmd->add_option("--out", opt.out_dir, "directory for output files");
  cmd->add_option("--threads", opt.threads, "worker threads for (horizon x trial) cells");
  cmd->add_option("--seed", opt.seed, "override master seed")
      ->each([&opt](const std::string&) { opt.seed_given = true; });
}

int print_report(const olr::ValidationReport& report) {
  for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
  for (const auto& v : report.violations) std::cout << "violation: " << v << "\n";
  if (report.ok()) {
    std::cout << "config ok\n";
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed online linear regression experiments"};
  app.require_subcommand(1);

  CommonOptions validate_opt, run_opt, sweep_opt;
  std::string sweep_path;
  std::vector<std::string> sweep_values;
  std::string fit_finals, fit_metric = "final_regret_max";

  CLI::App* validate = app.add_subcommand("validate", "check a config without running");
  add_common(validate, validate_opt);

  CLI::App* run = app.add_subcommand("run", "run all (horizon x trial) cells");
  add_common(run, run_opt);

  CLI::App* sweep = app.add_subcommand("sweep", "run a config over a parameter range");
  add_common(sweep, sweep_opt);
  sweep->add_option("--vary", sweep_path, "dotted config path to vary")->required();
  sweep->add_option("--values", sweep_values, "values for the varied path")
      ->expected(-1);

  CLI::App* fit = app.add_subcommand("fit", "re-fit exponents from an existing finals table");
  fit->add_option("--finals", fit_finals, "finals CSV produced by run")->required();
  fit->add_option("--metric", fit_metric, "finals column to fit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      return print_report(olr::cmd_validate(load_config(validate_opt)));
    }
    if (run->parsed()) {
      olr::ExperimentConfig cfg = load_config(run_opt);
      auto report = olr::cmd_validate(cfg);
      if (!report.ok()) return print_report(report);
      for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
      auto artifacts = olr::cmd_run(cfg, run_opt.threads);
      std::cout << "finals:  " << artifacts.finals_file << "\n"
                << "summary: " << artifacts.summary_file << "\n"
                << "traces:  " << artifacts.trace_files.size() << " files\n";
      return 0;
    }
    if (sweep->parsed()) {
      olr::ExperimentConfig cfg = load_config(sweep_opt);
      auto report = olr::cmd_validate(cfg);
      if (!report.ok()) return print_report(report);
      std::string table =
          olr::cmd_sweep(cfg, sweep_path, sweep_values, sweep_opt.threads);
      std::cout << "sweep table: " << table << "\n";
      return 0;
    }
    if (fit->parsed()) {
      olr::FitSummary summary = olr::cmd_fit(fit_finals, fit_metric);
      std::cout << summary.to_json() << "\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
