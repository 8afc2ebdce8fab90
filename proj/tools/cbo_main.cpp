// Copyright 2026 The CBO Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cbo/error.hpp"
#include "cbo/history_io.hpp"
#include "cbo/orchestrator.hpp"
#include "cbo/problem_config.hpp"
#include "cbo/reporting.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitAborted = 3;

double speed_factor_from_env() {
  const char* raw = std::getenv("CBO_SPEED_FACTOR");
  if (raw == nullptr || *raw == '\0') return 0.0;
  char* end = nullptr;
  const double v = std::strtod(raw, &end);
  if (*end != '\0' || !(v >= 0.0)) throw cbo::ConfigError("CBO_SPEED_FACTOR: expected a non-negative number");
  return v;
}

nlohmann::ordered_json config_json(const cbo::Configuration& c, const cbo::ParameterSpace& space) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < space.size(); ++i) j[space.spec(i).name] = c[i];
  return j;
}

struct RunOptions {
  std::string config_path;
  std::string method = "coupled";
  std::optional<std::size_t> interval;
  std::optional<std::size_t> n_pre;
  std::optional<std::size_t> n_post;
  std::optional<std::size_t> n_train;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
};

int cmd_run(const RunOptions& opt) {
  cbo::RunConfig cfg = cbo::load_problem_config(opt.config_path);
  if (opt.interval) cfg.interval = *opt.interval;
  if (opt.n_pre) cfg.n_pre = *opt.n_pre;
  if (opt.n_post) cfg.n_post = *opt.n_post;
  if (opt.seed) cfg.seed = *opt.seed;
  const cbo::Method method = cbo::parse_method(opt.method);
  cfg.validate();
  const std::size_t n_train = opt.n_train.value_or(cfg.expensive_budget());
  nlohmann::ordered_json summary;
  summary["method"] = cbo::to_string(method);
  summary["config"] = cbo::run_config_to_json(cfg);
  if (method == cbo::Method::kFusion) summary["config"]["run"]["n_train"] = n_train;
  cfg.evaluator = cbo::make_evaluator(cfg.binding, speed_factor_from_env(), cfg.seed);

  std::filesystem::create_directories(opt.out_dir);
  const auto out = std::filesystem::path(opt.out_dir);

  cbo::RunResult result;
  try {
    result = cbo::run_method(cfg, method, n_train);
  } catch (const cbo::RunAbortedError& e) {
    summary["status"] = "aborted";
    summary["error"] = e.what();
    cbo::write_text_file((out / "summary.json").string(), summary.dump(2) + "\n");
    std::cerr << "run aborted: " << e.what() << '\n';
    return kExitAborted;
  }

  std::vector<cbo::HistoryRecord> records;
  for (const auto& o : result.history) records.push_back(cbo::to_record(o, cfg.space));
  cbo::write_text_file((out / "history.jsonl").string(), cbo::encode_history(records));

  summary["status"] = "ok";
  if (result.best) {
    summary["incumbent"] = {{"iter", result.history[result.best->index].iter},
                            {"effective", result.best->effective},
                            {"config", config_json(result.best->config, cfg.space)}};
  } else {
    summary["incumbent"] = nullptr;
  }
  summary["budgets"] = {{"n_pre", result.n_pre_evaluated},
                        {"n_post", result.n_post_evaluated},
                        {"n_post_failed", result.n_post_failed}};
  auto& failures = summary["failures"] = nlohmann::ordered_json::array();
  for (const auto& o : result.history) {
    if (o.ok()) continue;
    failures.push_back({{"iter", o.iter},
                        {"fidelity", cbo::to_string(o.fidelity)},
                        {"status", cbo::to_string(o.status)},
                        {"diagnostics", o.diagnostics}});
  }
  summary["wall_time_s"] = result.wall_time_s;
  cbo::write_text_file((out / "summary.json").string(), summary.dump(2) + "\n");

  if (result.best) {
    std::cout << "incumbent effective FOM " << result.best->effective << " (" << result.n_pre_evaluated
              << " pre, " << result.n_post_evaluated << " post)\n";
  } else {
    std::cout << "no ok expensive evaluation\n";
  }
  return 0;
}

int cmd_report(const std::string& history_path, const std::string& out_csv) {
  const auto records = cbo::read_history_file(history_path);
  const std::string csv = cbo::trace_csv(cbo::best_so_far(records));
  if (out_csv.empty()) {
    std::cout << csv;
  } else {
    cbo::write_text_file(out_csv, csv);
  }
  return 0;
}

int cmd_benchmark(const std::string& suite, std::size_t seeds, const std::string& out_csv) {
  const auto rows = cbo::run_suite(suite, seeds, speed_factor_from_env(),
                                   [](const std::string& msg) { std::cerr << msg << '\n'; });
  const std::string csv = cbo::suite_csv(rows);
  if (out_csv.empty()) {
    std::cout << csv;
  } else {
    cbo::write_text_file(out_csv, csv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled two-fidelity Bayesian optimization"};
  app.require_subcommand(1);

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "Optimize a problem config");
  run->add_option("config", run_opt.config_path, "Problem config (JSON)")->required();
  run->add_option("--method", run_opt.method, "coupled, plain or fusion")
      ->check(CLI::IsMember({"coupled", "plain", "fusion"}));
  run->add_option("--interval", run_opt.interval, "Cheap iterations per expensive one")
      ->check(CLI::PositiveNumber);
  run->add_option("--n-pre", run_opt.n_pre, "Cheap budget");
  run->add_option("--n-post", run_opt.n_post, "Expensive budget (default n_pre / interval)");
  run->add_option("--n-train", run_opt.n_train, "Fusion training samples (default: expensive budget)")
      ->check(CLI::PositiveNumber);
  run->add_option("--seed", run_opt.seed, "Random seed");
  run->add_option("--out", run_opt.out_dir, "Output directory");

  std::string history_path, report_out;
  auto* report = app.add_subcommand("report", "Best-so-far traces from a history");
  report->add_option("history", history_path, "history.jsonl")->required();
  report->add_option("--out", report_out, "CSV path (default stdout)");

  std::string suite;
  std::size_t seeds = 5;
  std::string bench_out;
  auto* bench = app.add_subcommand("benchmark", "Compare methods on builtin benchmarks");
  bench->add_option("suite", suite, "bowl, ota, ldo or all")
      ->required()
      ->check(CLI::IsMember({"bowl", "ota", "ldo", "all"}));
  bench->add_option("--seeds", seeds, "Seeds per method")->check(CLI::PositiveNumber);
  bench->add_option("--out", bench_out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_opt);
    if (*report) return cmd_report(history_path, report_out);
    if (*bench) return cmd_benchmark(suite, seeds, bench_out);
  } catch (const cbo::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
