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

#include "fedro/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fedro/rng.hpp"
#include "fedro/simd/kernels.hpp"

namespace fedro::aggregation {
namespace {

std::size_t check_inputs(std::span<const ParameterVector> inputs) {
  if (inputs.empty()) throw std::invalid_argument("aggregation of an empty input list");
  const std::size_t d = inputs.front().size();
  for (const auto& v : inputs) {
    if (v.size() != d) throw std::invalid_argument("aggregation inputs differ in dimension");
  }
  return d;
}

// Applies `reduce` to each coordinate's sorted column of values.
template <typename Reduce>
ParameterVector coordinatewise(std::span<const ParameterVector> inputs, Reduce reduce) {
  const std::size_t d = check_inputs(inputs);
  ParameterVector out(d);
  std::vector<double> column(inputs.size());
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < inputs.size(); ++i) column[i] = inputs[i][j];
    std::sort(column.begin(), column.end());
    out[j] = reduce(std::span<const double>(column));
  }
  return out;
}

// Mean of sorted values, shifted by the first one so equal values
// reproduce themselves exactly.
double shifted_scalar_mean(std::span<const double> values) {
  const double base = values.front();
  double acc = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) acc += values[i] - base;
  return base + acc / static_cast<double>(values.size());
}

// Returns true and leaves `z` at inputs[j] when inputs[j] minimizes the sum
// of distances; otherwise moves `z` off the point along the descent
// direction and returns false.
bool settle_on_vertex(std::span<const ParameterVector> inputs, std::size_t j,
                      double step, ParameterVector& z) {
  const ParameterVector& anchor = inputs[j];
  const std::size_t d = anchor.size();
  const auto& k = simd::kernels();
  ParameterVector pull(d);
  ParameterVector diff(d);
  double multiplicity = 0.0;
  for (const auto& v : inputs) {
    const double dist = std::sqrt(squared_distance(v, anchor));
    if (dist == 0.0) {
      multiplicity += 1.0;
      continue;
    }
    k.scaled_diff(1.0 / dist, v.data(), anchor.data(), diff.data(), d);
    k.axpy(1.0, diff.data(), pull.data(), d);
  }
  const double pull_norm = std::sqrt(squared_norm(pull));
  if (pull_norm <= multiplicity) {
    z = anchor;
    return true;
  }
  z = anchor;
  k.axpy(step / pull_norm, pull.data(), z.data(), d);
  return false;
}

}  // namespace

std::string_view rule_name(Rule rule) {
  switch (rule) {
    case Rule::average:
      return "average";
    case Rule::cw_trimmed_mean:
      return "cw_trimmed_mean";
    case Rule::cw_median:
      return "cw_median";
    case Rule::geometric_median:
      return "geometric_median";
  }
  return "unknown";
}

Rule parse_rule(std::string_view name) {
  for (Rule r : {Rule::average, Rule::cw_trimmed_mean, Rule::cw_median,
                 Rule::geometric_median}) {
    if (rule_name(r) == name) return r;
  }
  throw std::invalid_argument("unknown aggregation rule: " + std::string(name));
}

std::string describe(const AggregatorConfig& config) {
  std::string name(rule_name(config.rule));
  return config.nnm ? "nnm_then(" + name + ")" : name;
}

ParameterVector average(std::span<const ParameterVector> inputs) {
  check_inputs(inputs);
  return shifted_mean(inputs);
}

ParameterVector cw_trimmed_mean(std::span<const ParameterVector> inputs, int b_hat) {
  const auto n_hat = static_cast<int>(inputs.size());
  if (b_hat < 0 || n_hat <= 2 * b_hat) {
    throw std::invalid_argument("trimmed mean requires n_hat > 2 b_hat (n_hat=" +
                                std::to_string(n_hat) + ", b_hat=" +
                                std::to_string(b_hat) + ")");
  }
  const auto trim = static_cast<std::size_t>(b_hat);
  return coordinatewise(inputs, [trim](std::span<const double> sorted) {
    return shifted_scalar_mean(sorted.subspan(trim, sorted.size() - 2 * trim));
  });
}

ParameterVector cw_median(std::span<const ParameterVector> inputs) {
  return coordinatewise(inputs, [](std::span<const double> sorted) {
    const std::size_t n = sorted.size();
    if (n % 2 == 1) return sorted[n / 2];
    return (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
  });
}

ParameterVector geometric_median(std::span<const ParameterVector> inputs, double tol,
                                 int max_iter) {
  const std::size_t d = check_inputs(inputs);
  if (inputs.size() == 1) return inputs.front();
  const auto& k = simd::kernels();

  ParameterVector z = shifted_mean(inputs);
  std::vector<double> dist(inputs.size());
  for (int iter = 0; iter < max_iter; ++iter) {
    const double scale = std::max(1.0, std::sqrt(squared_norm(z)));
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      dist[i] = std::sqrt(squared_distance(z, inputs[i]));
    }
    const auto nearest = static_cast<std::size_t>(
        std::min_element(dist.begin(), dist.end()) - dist.begin());
    if (dist[nearest] <= 1e-15 * scale) {
      if (settle_on_vertex(inputs, nearest, tol * scale, z)) return z;
      continue;
    }
    ParameterVector numerator(d);
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const double w = 1.0 / dist[i];
      k.axpy(w, inputs[i].data(), numerator.data(), d);
      weight_sum += w;
    }
    ParameterVector next(d);
    for (std::size_t j = 0; j < d; ++j) next[j] = numerator[j] / weight_sum;
    const double step = std::sqrt(squared_distance(next, z));
    z = std::move(next);
    if (step <= tol * scale) break;
  }

  // Snap to an input point when the iterate has converged onto it.
  const double scale = std::max(1.0, std::sqrt(squared_norm(z)));
  std::size_t nearest = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const double dist_i = squared_distance(z, inputs[i]);
    if (dist_i < best) {
      best = dist_i;
      nearest = i;
    }
  }
  if (std::sqrt(best) <= tol * scale) {
    ParameterVector candidate = z;
    if (settle_on_vertex(inputs, nearest, 0.0, candidate)) return candidate;
  }
  return z;
}

std::vector<ParameterVector> nnm_transform(std::span<const ParameterVector> inputs,
                                           int b_hat) {
  check_inputs(inputs);
  const auto n_hat = static_cast<int>(inputs.size());
  if (b_hat < 0 || b_hat >= n_hat) {
    throw std::invalid_argument("nearest-neighbor mixing requires 0 <= b_hat < n_hat");
  }
  const auto n = inputs.size();
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dist[i * n + j] = dist[j * n + i] = squared_distance(inputs[i], inputs[j]);
    }
  }
  const auto keep = static_cast<std::size_t>(n_hat - b_hat);
  std::vector<ParameterVector> out;
  out.reserve(n);
  std::vector<int> order;
  for (std::size_t i = 0; i < n; ++i) {
    order.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) order.push_back(static_cast<int>(j));
    }
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return dist[i * n + static_cast<std::size_t>(a)] <
             dist[i * n + static_cast<std::size_t>(b)];
    });
    order.insert(order.begin(), static_cast<int>(i));
    order.resize(keep);
    out.push_back(shifted_mean(inputs, order));
  }
  return out;
}

ParameterVector aggregate(std::span<const ParameterVector> inputs,
                          const AggregatorConfig& config) {
  if (config.nnm) {
    const auto mixed = nnm_transform(inputs, config.b_hat);
    AggregatorConfig base = config;
    base.nnm = false;
    return aggregate(mixed, base);
  }
  switch (config.rule) {
    case Rule::average:
      return average(inputs);
    case Rule::cw_trimmed_mean:
      return cw_trimmed_mean(inputs, config.b_hat);
    case Rule::cw_median:
      return cw_median(inputs);
    case Rule::geometric_median:
      return geometric_median(inputs, config.tol, config.max_iter);
  }
  throw std::invalid_argument("unknown aggregation rule");
}

double robustness_ratio(std::span<const ParameterVector> inputs,
                        const ParameterVector& aggregate_output,
                        std::span<const int> subset) {
  const ParameterVector subset_mean = shifted_mean(inputs, subset);
  const double deviation =
      static_cast<double>(subset.size()) * squared_distance(aggregate_output, subset_mean);
  if (deviation == 0.0) return 0.0;
  double spread = 0.0;
  for (int i : subset) {
    spread += squared_distance(inputs[static_cast<std::size_t>(i)], subset_mean);
  }
  if (spread == 0.0) return std::numeric_limits<double>::infinity();
  return deviation / spread;
}

KappaReport kappa_empirical(std::span<const ParameterVector> inputs, int b_hat,
                            AggregatorConfig rule) {
  check_inputs(inputs);
  const auto n_hat = static_cast<int>(inputs.size());
  if (n_hat > kMaxEnumeratedInputs) {
    throw std::invalid_argument("kappa enumeration is capped at " +
                                std::to_string(kMaxEnumeratedInputs) + " inputs");
  }
  if (b_hat < 0 || b_hat >= n_hat) {
    throw std::invalid_argument("kappa enumeration requires 0 <= b_hat < n_hat");
  }
  rule.b_hat = b_hat;
  const ParameterVector output = aggregate(inputs, rule);

  const int size = n_hat - b_hat;
  std::vector<int> subset(static_cast<std::size_t>(size));
  std::iota(subset.begin(), subset.end(), 0);
  KappaReport report;
  report.witness_subset = subset;
  for (;;) {
    const double ratio = robustness_ratio(inputs, output, subset);
    ++report.instances_tested;
    if (ratio > report.kappa_hat) {
      report.kappa_hat = ratio;
      report.witness_subset = subset;
    }
    // Next combination in lexicographic order.
    int pos = size - 1;
    while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == n_hat - size + pos) --pos;
    if (pos < 0) break;
    ++subset[static_cast<std::size_t>(pos)];
    for (int q = pos + 1; q < size; ++q) {
      subset[static_cast<std::size_t>(q)] = subset[static_cast<std::size_t>(q - 1)] + 1;
    }
  }
  return report;
}

std::vector<std::vector<ParameterVector>> certification_instances(int n_hat, int trials,
                                                                  std::uint64_t seed,
                                                                  int dim) {
  if (n_hat < 1 || trials < 0 || dim < 1) {
    throw std::invalid_argument("certification needs n_hat >= 1, trials >= 0, dim >= 1");
  }
  const auto d = static_cast<std::size_t>(dim);
  const auto gaussian_instance = [&](rng::RngStream& stream, double jitter) {
    std::vector<ParameterVector> w(static_cast<std::size_t>(n_hat), ParameterVector(d));
    for (auto& v : w) {
      for (auto& x : v) x = jitter * stream.normal();
    }
    return w;
  };

  std::vector<std::vector<ParameterVector>> instances;
  instances.reserve(static_cast<std::size_t>(trials) + 2);
  for (int t = 0; t < trials; ++t) {
    rng::RngStream stream(rng::derive_seed(seed, rng::Tag::certification,
                                           static_cast<std::uint64_t>(t)));
    instances.push_back(gaussian_instance(stream, 1.0));
  }

  rng::RngStream outlier_stream(
      rng::derive_seed(seed, rng::Tag::certification, static_cast<std::uint64_t>(trials)));
  auto outlier = gaussian_instance(outlier_stream, 1.0);
  for (auto& x : outlier.front()) x = 1e3 / std::sqrt(static_cast<double>(d));
  instances.push_back(std::move(outlier));

  rng::RngStream cluster_stream(rng::derive_seed(
      seed, rng::Tag::certification, static_cast<std::uint64_t>(trials) + 1));
  auto clusters = gaussian_instance(cluster_stream, 0.01);
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const double center = 2 * i < clusters.size() ? 1.0 : -1.0;
    for (auto& x : clusters[i]) x += center;
  }
  instances.push_back(std::move(clusters));
  return instances;
}

CertificationResult certify_robustness(AggregatorConfig rule, int n_hat, int b_hat,
                                       double kappa_claim, int trials,
                                       std::uint64_t seed, int dim) {
  if (n_hat > kMaxEnumeratedInputs) {
    throw std::invalid_argument("certification is capped at " +
                                std::to_string(kMaxEnumeratedInputs) + " inputs");
  }
  CertificationResult result;
  result.certified = true;
  for (auto& instance : certification_instances(n_hat, trials, seed, dim)) {
    const KappaReport report = kappa_empirical(instance, b_hat, rule);
    ++result.instances;
    if (report.kappa_hat > kappa_claim) result.certified = false;
    if (report.kappa_hat > result.max_ratio || result.witness_instance.empty()) {
      result.max_ratio = report.kappa_hat;
      result.witness_instance = std::move(instance);
      result.witness_subset = report.witness_subset;
    }
  }
  return result;
}

}  // namespace fedro::aggregation
