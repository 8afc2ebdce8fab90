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

#include "cbo/history_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cbo/error.hpp"

namespace cbo {
namespace {

using nlohmann::ordered_json;

double finite_number(const ordered_json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(field + ": expected a finite number");
  return v;
}

std::optional<double> optional_number(const ordered_json& obj, const char* key) {
  if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
  return finite_number(obj[key], key);
}

}  // namespace

HistoryRecord to_record(const Observation& obs, const ParameterSpace& space) {
  HistoryRecord r;
  r.iter = obs.iter;
  r.fidelity = obs.fidelity;
  for (std::size_t i = 0; i < space.size(); ++i) r.config.emplace_back(space.spec(i).name, obs.config[i]);
  r.status = obs.status;
  r.duration_ms = obs.duration_ms;
  if (obs.ok()) {
    r.metrics = obs.metrics;
    r.fom = obs.fom.raw_fom;
    r.violation = obs.fom.violation;
    r.effective = obs.fom.effective;
  }
  return r;
}

std::string encode_history_line(const HistoryRecord& r) {
  ordered_json j;
  j["iter"] = r.iter;
  j["fidelity"] = to_string(r.fidelity);
  ordered_json config = ordered_json::object();
  for (const auto& [name, value] : r.config) config[name] = value;
  j["config"] = std::move(config);
  ordered_json metrics = ordered_json::object();
  for (const auto& [name, value] : r.metrics) metrics[name] = value;
  j["metrics"] = std::move(metrics);
  j["fom"] = r.fom ? ordered_json(*r.fom) : ordered_json(nullptr);
  j["violation"] = r.violation ? ordered_json(*r.violation) : ordered_json(nullptr);
  j["effective"] = r.effective ? ordered_json(*r.effective) : ordered_json(nullptr);
  j["status"] = to_string(r.status);
  j["duration_ms"] = r.duration_ms;
  return j.dump();
}

HistoryRecord decode_history_line(const std::string& line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const ordered_json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("expected an object");
  for (const auto& [key, value] : j.items()) {
    static const char* known[] = {"iter", "fidelity", "config", "metrics", "fom",
                                  "violation", "effective", "status", "duration_ms"};
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) ==
        std::end(known))
      throw ConfigError(key + ": unknown field");
  }
  HistoryRecord r;
  if (!j.contains("iter") || !j["iter"].is_number_unsigned()) throw ConfigError("iter: expected a count");
  r.iter = j["iter"].get<std::size_t>();
  if (!j.contains("fidelity") || !j["fidelity"].is_string()) throw ConfigError("fidelity: expected a string");
  try {
    r.fidelity = parse_fidelity(j["fidelity"].get<std::string>());
  } catch (const Error& e) {
    throw ConfigError(std::string("fidelity: ") + e.what());
  }
  if (!j.contains("config") || !j["config"].is_object()) throw ConfigError("config: expected an object");
  for (const auto& [name, value] : j["config"].items())
    r.config.emplace_back(name, finite_number(value, "config." + name));
  if (!j.contains("metrics") || !j["metrics"].is_object()) throw ConfigError("metrics: expected an object");
  for (const auto& [name, value] : j["metrics"].items())
    r.metrics[name] = finite_number(value, "metrics." + name);
  r.fom = optional_number(j, "fom");
  r.violation = optional_number(j, "violation");
  r.effective = optional_number(j, "effective");
  if (!j.contains("status") || !j["status"].is_string()) throw ConfigError("status: expected a string");
  try {
    r.status = parse_status(j["status"].get<std::string>());
  } catch (const Error& e) {
    throw ConfigError(std::string("status: ") + e.what());
  }
  if (!j.contains("duration_ms")) throw ConfigError("duration_ms: missing");
  r.duration_ms = finite_number(j["duration_ms"], "duration_ms");
  if (r.status == EvalStatus::kOk && !r.effective) throw ConfigError("effective: missing on an ok record");
  return r;
}

std::string encode_history(std::span<const HistoryRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += encode_history_line(r);
    out += '\n';
  }
  return out;
}

std::vector<HistoryRecord> decode_history(const std::string& text, const std::string& source) {
  std::vector<HistoryRecord> out;
  std::istringstream in(text);
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(decode_history_line(line));
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<HistoryRecord> read_history_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_history(buf.str(), path);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path + ": cannot open for writing");
  out << text;
  if (!out) throw Error(path + ": write failed");
}

}  // namespace cbo
