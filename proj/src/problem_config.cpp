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

#include "cbo/problem_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "cbo/benchmarks.hpp"
#include "cbo/error.hpp"

namespace cbo {
namespace {

using nlohmann::json;

// 1-based line of the last segment of a dotted path, located by a forward key search.
std::size_t locate(const std::string& text, const std::vector<std::string>& path) {
  std::size_t pos = 0;
  bool found = false;
  for (const auto& seg : path) {
    if (!seg.empty() && std::isdigit(static_cast<unsigned char>(seg[0]))) continue;
    const auto at = text.find('"' + seg + '"', pos);
    if (at == std::string::npos) break;
    pos = at;
    found = true;
  }
  if (!found) return 0;
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

class Reader {
 public:
  Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& reason) const {
    std::string field;
    for (const auto& seg : path) field += (field.empty() ? "" : ".") + seg;
    const std::size_t line = locate(text_, path);
    std::ostringstream msg;
    msg << source_;
    if (line > 0) msg << ':' << line;
    msg << ": " << (field.empty() ? "<root>" : field) << ": " << reason;
    throw ConfigError(msg.str());
  }

  const json& object(const json& j, const std::vector<std::string>& path,
                     std::initializer_list<const char*> allowed) const {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : j.items()) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
        auto p = path;
        p.push_back(key);
        fail(p, "unknown key");
      }
    }
    return j;
  }

  double number(const json& obj, const std::vector<std::string>& path, const char* key,
                std::optional<double> fallback = std::nullopt) const {
    auto p = path;
    p.push_back(key);
    if (!obj.contains(key)) {
      if (fallback) return *fallback;
      fail(p, "missing");
    }
    const json& v = obj.at(key);
    if (!v.is_number()) fail(p, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(p, "expected a finite number");
    return d;
  }

  std::size_t count(const json& obj, const std::vector<std::string>& path, const char* key,
                    std::optional<std::size_t> fallback = std::nullopt) const {
    auto p = path;
    p.push_back(key);
    if (!obj.contains(key)) {
      if (fallback) return *fallback;
      fail(p, "missing");
    }
    const json& v = obj.at(key);
    if (!v.is_number_unsigned())
      fail(p, "expected a non-negative integer");
    return v.get<std::size_t>();
  }

  std::string string(const json& obj, const std::vector<std::string>& path, const char* key,
                     std::optional<std::string> fallback = std::nullopt) const {
    auto p = path;
    p.push_back(key);
    if (!obj.contains(key)) {
      if (fallback) return *fallback;
      fail(p, "missing");
    }
    const json& v = obj.at(key);
    if (!v.is_string()) fail(p, "expected a string");
    return v.get<std::string>();
  }

 private:
  const std::string& text_;
  std::string source_;
};

// Re-raises a "<dotted.field>: reason" validation error with source and line.
[[noreturn]] void fail_from(const Reader& r, const ConfigError& e) {
  const std::string what = e.what();
  const auto colon = what.find(": ");
  std::vector<std::string> path;
  if (colon != std::string::npos) {
    std::stringstream ss(what.substr(0, colon));
    for (std::string seg; std::getline(ss, seg, '.');) path.push_back(seg);
  }
  r.fail(path, colon == std::string::npos ? what : what.substr(colon + 2));
}

ParameterSpace parse_space(const Reader& r, const json& j) {
  if (!j.is_array()) r.fail({"space"}, "expected an array of parameters");
  std::vector<ParameterSpec> specs;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::vector<std::string> path{"space", std::to_string(i)};
    const json& p = r.object(j[i], path, {"name", "kind", "lo", "hi", "step", "units"});
    const std::string name = r.string(p, path, "name");
    const std::vector<std::string> named{"space", name};
    const std::string kind = r.string(p, named, "kind");
    const double lo = r.number(p, named, "lo");
    const double hi = r.number(p, named, "hi");
    const std::string units = r.string(p, named, "units", "");
    if (kind == "continuous") {
      if (p.contains("step")) r.fail({"space", name, "step"}, "not allowed for a continuous parameter");
      specs.push_back(ParameterSpec::continuous(name, lo, hi, units));
    } else if (kind == "quantized") {
      specs.push_back(ParameterSpec::quantized(name, lo, hi, r.number(p, named, "step"), units));
    } else if (kind == "integer") {
      const double step = r.number(p, named, "step", 1.0);
      if (step != 1.0) r.fail({"space", name, "step"}, "integer parameters have step 1");
      specs.push_back(ParameterSpec::integer(name, lo, hi, units));
    } else {
      r.fail({"space", name, "kind"}, "expected continuous, quantized or integer");
    }
  }
  try {
    return ParameterSpace::validate(std::move(specs));
  } catch (const SpaceError& e) {
    r.fail({"space", e.subject()}, e.what());
  }
}

FomSpec parse_fom(const Reader& r, const json& j) {
  const json& fom = r.object(j, {"fom"}, {"terms", "constraints"});
  FomSpec spec;
  if (!fom.contains("terms") || !fom["terms"].is_array()) r.fail({"fom", "terms"}, "expected an array");
  for (std::size_t i = 0; i < fom["terms"].size(); ++i) {
    const std::vector<std::string> path{"fom", "terms", std::to_string(i)};
    const json& t = r.object(fom["terms"][i], path, {"metric", "coef", "transform"});
    FomTerm term;
    term.metric = r.string(t, path, "metric");
    term.coef = r.number(t, path, "coef", 1.0);
    const std::string tr = r.string(t, path, "transform", "identity");
    if (tr == "identity") {
      term.transform = Transform::kIdentity;
    } else if (tr == "log10") {
      term.transform = Transform::kLog10;
    } else {
      auto p = path;
      p.push_back("transform");
      r.fail(p, "expected identity or log10");
    }
    spec.terms.push_back(term);
  }
  if (fom.contains("constraints")) {
    if (!fom["constraints"].is_array()) r.fail({"fom", "constraints"}, "expected an array");
    for (std::size_t i = 0; i < fom["constraints"].size(); ++i) {
      const std::vector<std::string> path{"fom", "constraints", std::to_string(i)};
      const json& c = r.object(fom["constraints"][i], path, {"metric", "lo", "hi", "weight"});
      FomConstraint con;
      con.metric = r.string(c, path, "metric");
      con.lo = r.number(c, path, "lo");
      con.hi = r.number(c, path, "hi");
      con.weight = r.number(c, path, "weight", 1.0);
      spec.constraints.push_back(con);
    }
  }
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    fail_from(r, e);
  }
  return spec;
}

}  // namespace

RunConfig parse_problem_config(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const auto line =
        1 + std::count(text.begin(), text.begin() + static_cast<long>(byte > 0 ? byte - 1 : 0), '\n');
    throw ConfigError(source + ":" + std::to_string(line) + ": invalid JSON: " + e.what());
  }
  const Reader r(text, source);
  r.object(root, {}, {"space", "fom", "evaluator", "run"});

  RunConfig cfg;
  if (!root.contains("evaluator")) r.fail({"evaluator"}, "missing");
  const json& ev = r.object(root["evaluator"], {"evaluator"},
                            {"builtin", "command", "timeout_pre_s", "timeout_post_s", "max_concurrent"});
  cfg.binding.builtin = r.string(ev, {"evaluator"}, "builtin", "");
  cfg.binding.command = r.string(ev, {"evaluator"}, "command", "");
  if (cfg.binding.builtin.empty() == cfg.binding.command.empty())
    r.fail({"evaluator"}, "set exactly one of builtin or command");
  cfg.binding.timeout_pre_s = r.number(ev, {"evaluator"}, "timeout_pre_s", 60.0);
  cfg.binding.timeout_post_s = r.number(ev, {"evaluator"}, "timeout_post_s", 240.0);
  cfg.binding.max_concurrent = static_cast<int>(r.count(ev, {"evaluator"}, "max_concurrent", 2));
  if (cfg.binding.timeout_pre_s <= 0) r.fail({"evaluator", "timeout_pre_s"}, "must be > 0");
  if (cfg.binding.timeout_post_s <= 0) r.fail({"evaluator", "timeout_post_s"}, "must be > 0");
  if (cfg.binding.max_concurrent < 1 || cfg.binding.max_concurrent > 64)
    r.fail({"evaluator", "max_concurrent"}, "must be in [1, 64]");

  std::shared_ptr<const BenchmarkDef> bench;
  if (!cfg.binding.builtin.empty()) {
    try {
      bench = builtin_benchmark(cfg.binding.builtin);
    } catch (const UnknownBenchmarkError& e) {
      r.fail({"evaluator", "builtin"}, e.what());
    }
  }
  if (root.contains("space")) {
    cfg.space = parse_space(r, root["space"]);
  } else if (bench) {
    cfg.space = bench->space;
  } else {
    r.fail({"space"}, "missing (required with an external command)");
  }
  if (root.contains("fom")) {
    cfg.fom = parse_fom(r, root["fom"]);
  } else if (bench) {
    cfg.fom = bench->fom;
  } else {
    r.fail({"fom"}, "missing (required with an external command)");
  }

  if (!root.contains("run")) r.fail({"run"}, "missing");
  const std::vector<std::string> rp{"run"};
  const json& run = r.object(root["run"], rp,
                             {"n_pre", "interval", "n_init", "seed", "gamma_alpha", "gamma_beta",
                              "n_candidates", "n_post"});
  cfg.n_pre = r.count(run, rp, "n_pre");
  cfg.interval = r.count(run, rp, "interval");
  cfg.n_init = r.count(run, rp, "n_init", 10);
  cfg.seed = r.count(run, rp, "seed", 0);
  cfg.gamma_alpha = r.number(run, rp, "gamma_alpha", 0.5);
  cfg.gamma_beta = r.number(run, rp, "gamma_beta", 0.15);
  cfg.n_candidates = r.count(run, rp, "n_candidates", 64);
  if (run.contains("n_post")) cfg.n_post = r.count(run, rp, "n_post");
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    fail_from(r, e);
  }
  return cfg;
}

RunConfig load_problem_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_config(buf.str(), path);
}

RunConfig builtin_run_config(const std::string& benchmark, std::size_t n_pre, std::size_t interval,
                             std::uint64_t seed) {
  const auto bench = builtin_benchmark(benchmark);
  RunConfig cfg;
  cfg.space = bench->space;
  cfg.fom = bench->fom;
  cfg.binding.builtin = benchmark;
  cfg.n_pre = n_pre;
  cfg.interval = interval;
  cfg.seed = seed;
  return cfg;
}

nlohmann::ordered_json run_config_to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  auto& space = j["space"] = nlohmann::ordered_json::array();
  for (const auto& s : cfg.space.specs()) {
    nlohmann::ordered_json p{{"name", s.name}, {"kind", to_string(s.kind)}, {"lo", s.lo}, {"hi", s.hi}};
    if (s.kind == ParamKind::kQuantized) p["step"] = s.step;
    if (!s.units.empty()) p["units"] = s.units;
    space.push_back(p);
  }
  auto& terms = j["fom"]["terms"] = nlohmann::ordered_json::array();
  for (const auto& t : cfg.fom.terms)
    terms.push_back({{"metric", t.metric}, {"coef", t.coef}, {"transform", to_string(t.transform)}});
  auto& cons = j["fom"]["constraints"] = nlohmann::ordered_json::array();
  for (const auto& c : cfg.fom.constraints)
    cons.push_back({{"metric", c.metric}, {"lo", c.lo}, {"hi", c.hi}, {"weight", c.weight}});
  if (cfg.evaluator) {
    j["evaluator"] = {{"injected", true}};
  } else if (!cfg.binding.builtin.empty()) {
    j["evaluator"] = {{"builtin", cfg.binding.builtin}};
  } else {
    j["evaluator"] = {{"command", cfg.binding.command},
                      {"timeout_pre_s", cfg.binding.timeout_pre_s},
                      {"timeout_post_s", cfg.binding.timeout_post_s},
                      {"max_concurrent", cfg.binding.max_concurrent}};
  }
  auto& run = j["run"];
  run["n_pre"] = cfg.n_pre;
  run["interval"] = cfg.interval;
  if (cfg.n_post) run["n_post"] = *cfg.n_post;
  run["n_init"] = cfg.n_init;
  run["seed"] = cfg.seed;
  run["gamma_alpha"] = cfg.gamma_alpha;
  run["gamma_beta"] = cfg.gamma_beta;
  run["n_candidates"] = cfg.n_candidates;
  return j;
}

}  // namespace cbo
