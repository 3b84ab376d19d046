// Copyright 2026 The FedRo Simulator Authors
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

#include "fedro/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace fedro::harness {
namespace {

using nlohmann::json;

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

// Tracks which keys of a JSON object were consumed so leftovers can be
// reported as unknown fields.
class ObjectReader {
 public:
  ObjectReader(const json& value, std::string path) : value_(value), path_(std::move(path)) {
    if (!value_.is_object()) throw ConfigError(where(), "expected an object");
  }

  bool has(std::string_view key) const { return value_.contains(std::string(key)); }

  const json& field(std::string_view key) {
    const std::string k(key);
    if (!value_.contains(k)) throw ConfigError(join(path_, key), "required field is missing");
    seen_.insert(k);
    return value_.at(k);
  }

  long long get_int(std::string_view key) {
    const json& v = field(key);
    if (!v.is_number_integer()) throw ConfigError(join(path_, key), "expected an integer");
    if (v.is_number_unsigned() &&
        v.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
      throw ConfigError(join(path_, key), "integer out of range");
    }
    const long long x = v.get<long long>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
      throw ConfigError(join(path_, key), "integer out of range");
    }
    return x;
  }

  int get_int(std::string_view key, int fallback) {
    return has(key) ? static_cast<int>(get_int(key)) : fallback;
  }

  std::uint64_t get_u64(std::string_view key) {
    const json& v = field(key);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0)) {
      throw ConfigError(join(path_, key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  double get_double(std::string_view key) {
    const json& v = field(key);
    if (!v.is_number()) throw ConfigError(join(path_, key), "expected a number");
    return v.get<double>();
  }

  double get_double(std::string_view key, double fallback) {
    return has(key) ? get_double(key) : fallback;
  }

  std::string get_string(std::string_view key) {
    const json& v = field(key);
    if (!v.is_string()) throw ConfigError(join(path_, key), "expected a string");
    return v.get<std::string>();
  }

  bool get_bool(std::string_view key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = field(key);
    if (!v.is_boolean()) throw ConfigError(join(path_, key), "expected a boolean");
    return v.get<bool>();
  }

  ObjectReader object(std::string_view key) { return ObjectReader(field(key), join(path_, key)); }

  std::string child(std::string_view key) const { return join(path_, key); }

  void finish() const {
    for (auto it = value_.begin(); it != value_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(join(path_, it.key()), "unknown field");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& value_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Fn>
auto parse_enum(const std::string& path, const std::string& name, Fn parse) {
  try {
    return parse(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

tasks::TaskSpec parse_task(ObjectReader r) {
  tasks::TaskSpec t;
  t.kind = parse_enum(r.child("kind"), r.get_string("kind"), tasks::parse_task_kind);
  t.n = static_cast<int>(r.get_int("n"));
  t.b = static_cast<int>(r.get_int("b"));
  t.d = static_cast<int>(r.get_int("d"));
  t.L = r.get_double("L");
  t.spread = r.get_double("spread");
  t.sigma = r.get_double("sigma");
  t.seed = r.get_u64("seed");
  if (t.kind == tasks::TaskKind::logistic) {
    t.samples_per_client = r.get_int("samples_per_client", t.samples_per_client);
    t.reg = r.get_double("reg", t.reg);
  }
  r.finish();

  require(t.n >= 1, r.child("n"), "must be >= 1");
  require(t.b >= 0 && 2 * t.b < t.n, r.child("b"), "must satisfy 0 <= b < n/2");
  require(t.d >= 1, r.child("d"), "must be >= 1");
  require(t.L > 0 && std::isfinite(t.L), r.child("L"), "must be positive");
  require(t.spread >= 0 && std::isfinite(t.spread), r.child("spread"), "must be >= 0");
  require(t.sigma >= 0 && std::isfinite(t.sigma), r.child("sigma"), "must be >= 0");
  require(t.samples_per_client >= 1, r.child("samples_per_client"), "must be >= 1");
  require(t.reg >= 0 && std::isfinite(t.reg), r.child("reg"), "must be >= 0");
  return t;
}

aggregation::AggregatorConfig parse_aggregator(ObjectReader r) {
  aggregation::AggregatorConfig a;
  a.rule = parse_enum(r.child("rule"), r.get_string("rule"), aggregation::parse_rule);
  a.nnm = r.get_bool("nnm", false);
  a.tol = r.get_double("tol", a.tol);
  a.max_iter = r.get_int("max_iter", a.max_iter);
  r.finish();
  require(a.tol > 0 && std::isfinite(a.tol), r.child("tol"), "must be positive");
  require(a.max_iter >= 1, r.child("max_iter"), "must be >= 1");
  return a;
}

attacks::AttackSpec parse_attack(ObjectReader r) {
  attacks::AttackSpec a;
  a.kind = parse_enum(r.child("kind"), r.get_string("kind"), attacks::parse_attack);
  if (r.has("scale")) {
    a.scale = r.get_double("scale");
    require(std::isfinite(*a.scale), r.child("scale"), "must be finite");
  }
  a.target = r.get_int("target", 0);
  r.finish();
  require(a.target >= 0, r.child("target"), "must be >= 0");
  return a;
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  ObjectReader r(doc, "");
  RunConfig c;
  c.task = parse_task(r.object("task"));
  c.n_hat = static_cast<int>(r.get_int("n_hat"));
  c.b_hat = static_cast<int>(r.get_int("b_hat"));
  c.T = static_cast<int>(r.get_int("T"));
  c.K = static_cast<int>(r.get_int("K"));
  {
    const json& g = r.field("gamma_c");
    if (g.is_string()) {
      require(g.get<std::string>() == "auto", "gamma_c", "expected a number or \"auto\"");
    } else if (g.is_number()) {
      c.gamma_c = g.get<double>();
      require(*c.gamma_c > 0 && std::isfinite(*c.gamma_c), "gamma_c", "must be positive");
    } else {
      throw ConfigError("gamma_c", "expected a number or \"auto\"");
    }
  }
  c.gamma_s = r.get_double("gamma_s");
  c.aggregator = parse_aggregator(r.object("aggregator"));
  c.attack = parse_attack(r.object("attack"));
  c.master_seed = r.get_u64("master_seed");
  c.violation_mode = parse_enum("violation_mode", r.get_string("violation_mode"),
                                parse_violation_mode);
  if (r.has("x0")) {
    const json& x = r.field("x0");
    require(x.is_array(), "x0", "expected an array of numbers");
    std::vector<double> values;
    for (std::size_t i = 0; i < x.size(); ++i) {
      require(x[i].is_number(), "x0[" + std::to_string(i) + "]", "expected a number");
      values.push_back(x[i].get<double>());
    }
    require(values.size() == static_cast<std::size_t>(c.task.d), "x0",
            "length must equal task.d");
    c.x0 = ParameterVector(std::move(values));
  }
  const int threads = r.get_int("threads", 0);
  require(threads >= 0, "threads", "must be >= 0");
  c.threads = static_cast<unsigned>(threads);
  r.finish();

  require(c.n_hat >= 1 && c.n_hat <= c.task.n, "n_hat",
          "must satisfy 1 <= n_hat <= task.n (n_hat=" + std::to_string(c.n_hat) +
              ", n=" + std::to_string(c.task.n) + ")");
  require(c.b_hat >= 0 && 2 * c.b_hat < c.n_hat, "b_hat", "must satisfy 0 <= b_hat < n_hat/2");
  require(c.T >= 1, "T", "must be >= 1");
  require(c.K >= 1, "K", "must be >= 1");
  require(c.gamma_s > 0 && std::isfinite(c.gamma_s), "gamma_s", "must be positive");
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string run_config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  auto& t = j["task"];
  t["kind"] = std::string(tasks::task_kind_name(c.task.kind));
  t["n"] = c.task.n;
  t["b"] = c.task.b;
  t["d"] = c.task.d;
  t["L"] = c.task.L;
  t["spread"] = c.task.spread;
  t["sigma"] = c.task.sigma;
  t["seed"] = c.task.seed;
  if (c.task.kind == tasks::TaskKind::logistic) {
    t["samples_per_client"] = c.task.samples_per_client;
    t["reg"] = c.task.reg;
  }
  j["n_hat"] = c.n_hat;
  j["b_hat"] = c.b_hat;
  j["T"] = c.T;
  j["K"] = c.K;
  if (c.gamma_c) {
    j["gamma_c"] = *c.gamma_c;
  } else {
    j["gamma_c"] = "auto";
  }
  j["gamma_s"] = c.gamma_s;
  auto& a = j["aggregator"];
  a["rule"] = std::string(aggregation::rule_name(c.aggregator.rule));
  a["nnm"] = c.aggregator.nnm;
  a["tol"] = c.aggregator.tol;
  a["max_iter"] = c.aggregator.max_iter;
  auto& at = j["attack"];
  at["kind"] = std::string(attacks::attack_name(c.attack.kind));
  if (c.attack.scale) at["scale"] = *c.attack.scale;
  at["target"] = c.attack.target;
  j["master_seed"] = c.master_seed;
  j["violation_mode"] = std::string(violation_mode_name(c.violation_mode));
  if (c.x0) j["x0"] = c.x0->values();
  j["threads"] = c.threads;
  return j.dump(2) + "\n";
}

}  // namespace fedro::harness
