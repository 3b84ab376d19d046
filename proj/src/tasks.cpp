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

#include "fedro/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fedro/simd/kernels.hpp"

namespace fedro::tasks {
namespace {

// Estimated constants are inflated so they also bound points not visited
// during estimation.
constexpr double kEstimateMargin = 1.25;

void add_scaled(ParameterVector& acc, double alpha, const ParameterVector& x) {
  simd::kernels().axpy(alpha, x.data(), acc.data(), x.size());
}

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// log(1 + exp(t)) without overflow.
double softplus(double t) {
  return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

ParameterVector gaussian_vector(rng::RngStream& stream, std::size_t d, double scale) {
  ParameterVector v(d);
  for (auto& x : v) x = scale * stream.normal();
  return v;
}

// (1/h) sum_{i honest} ||grad f_i(x) - grad F(x)||^2
double heterogeneity_at(const Task& task, const ParameterVector& x) {
  const ParameterVector global = task.global_gradient(x);
  double acc = 0.0;
  for (int i = task.num_byzantine(); i < task.num_clients(); ++i) {
    acc += squared_distance(task.local_gradient(i, x), global);
  }
  return acc / task.num_honest();
}

}  // namespace

std::string_view task_kind_name(TaskKind kind) {
  return kind == TaskKind::quadratic ? "quadratic" : "logistic";
}

TaskKind parse_task_kind(std::string_view name) {
  if (name == "quadratic") return TaskKind::quadratic;
  if (name == "logistic") return TaskKind::logistic;
  throw std::invalid_argument("unknown task kind: " + std::string(name));
}

void TaskSpec::validate() const {
  if (n < 1) throw std::invalid_argument("task.n must be >= 1");
  if (b < 0 || 2 * b >= n) throw std::invalid_argument("task.b must satisfy 0 <= b < n/2");
  if (d < 1) throw std::invalid_argument("task.d must be >= 1");
  if (!(L > 0) || !std::isfinite(L)) throw std::invalid_argument("task.L must be positive");
  if (!(spread >= 0) || !std::isfinite(spread)) {
    throw std::invalid_argument("task.spread must be non-negative");
  }
  if (!(sigma >= 0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("task.sigma must be non-negative");
  }
  if (kind == TaskKind::logistic) {
    if (samples_per_client < 1) {
      throw std::invalid_argument("task.samples_per_client must be >= 1");
    }
    if (!(reg >= 0) || !std::isfinite(reg)) {
      throw std::invalid_argument("task.reg must be non-negative");
    }
  }
}

void Task::require_honest(int client) const {
  if (client < 0 || client >= num_clients()) {
    throw std::invalid_argument("client index " + std::to_string(client) + " out of range");
  }
  if (!is_honest(client)) {
    throw std::invalid_argument("client " + std::to_string(client) +
                                " is Byzantine and has no gradient oracle");
  }
}

// ---------------------------------------------------------------- quadratic

QuadraticTask::QuadraticTask(double L, std::vector<ParameterVector> centers, int b,
                             double sigma)
    : L_(L), centers_(std::move(centers)), b_(b), sigma_(sigma) {
  const int n = static_cast<int>(centers_.size());
  if (!(L_ > 0)) throw std::invalid_argument("L must be positive");
  if (!(sigma_ >= 0)) throw std::invalid_argument("sigma must be non-negative");
  if (b_ < 0 || 2 * b_ >= n) throw std::invalid_argument("need 0 <= b < n/2");
  dim_ = centers_.front().size();
  if (dim_ == 0) throw std::invalid_argument("dimension must be >= 1");
  for (const auto& c : centers_) {
    if (c.size() != dim_) throw std::invalid_argument("centers differ in dimension");
  }
  const std::span<const ParameterVector> honest(centers_.data() + b_,
                                                centers_.size() - static_cast<std::size_t>(b_));
  center_mean_ = shifted_mean(honest);
  double acc = 0.0;
  for (const auto& c : honest) acc += squared_distance(c, center_mean_);
  zeta_sq_ = L_ * L_ * acc / static_cast<double>(honest.size());
}

const ParameterVector& QuadraticTask::center(int client) const {
  if (client < 0 || client >= num_clients()) {
    throw std::invalid_argument("client index out of range");
  }
  return centers_[static_cast<std::size_t>(client)];
}

ParameterVector QuadraticTask::local_gradient(int client, const ParameterVector& x) const {
  require_honest(client);
  const ParameterVector& c = centers_[static_cast<std::size_t>(client)];
  ParameterVector g(dim_);
  simd::kernels().scaled_diff(L_, x.data(), c.data(), g.data(), dim_);
  return g;
}

ParameterVector QuadraticTask::stochastic_gradient(int client, const ParameterVector& x,
                                                   rng::RngStream& stream) const {
  ParameterVector g = local_gradient(client, x);
  if (sigma_ > 0) {
    const double scale = sigma_ / std::sqrt(static_cast<double>(dim_));
    for (auto& v : g) v += scale * stream.normal();
  }
  return g;
}

ParameterVector QuadraticTask::global_gradient(const ParameterVector& x) const {
  ParameterVector g(dim_);
  simd::kernels().scaled_diff(L_, x.data(), center_mean_.data(), g.data(), dim_);
  return g;
}

ParameterVector QuadraticTask::global_gradient_per_client(const ParameterVector& x) const {
  ParameterVector acc(dim_);
  for (int i = b_; i < num_clients(); ++i) add_scaled(acc, 1.0, local_gradient(i, x));
  for (auto& v : acc) v /= num_honest();
  return acc;
}

double QuadraticTask::global_loss(const ParameterVector& x) const {
  double acc = 0.0;
  for (int i = b_; i < num_clients(); ++i) {
    acc += 0.5 * L_ * squared_distance(x, centers_[static_cast<std::size_t>(i)]);
  }
  return acc / num_honest();
}

double QuadraticTask::global_loss_closed_form(const ParameterVector& x) const {
  return 0.5 * L_ * squared_distance(x, center_mean_) + min_loss();
}

TaskConstants QuadraticTask::constants(const ParameterVector& x0) const {
  TaskConstants c;
  c.L = L_;
  c.sigma = sigma_;
  c.zeta = std::sqrt(zeta_sq_);
  c.delta0 = 0.5 * L_ * squared_distance(x0, center_mean_);
  c.x_star = center_mean_;
  c.h = num_honest();
  return c;
}

QuadraticTask make_quadratic_task(int n, int b, int d, double L, double spread,
                                  double sigma, std::uint64_t seed) {
  if (n < 1 || d < 1) throw std::invalid_argument("need n >= 1 and d >= 1");
  const auto dim = static_cast<std::size_t>(d);
  const double scale = spread / std::sqrt(static_cast<double>(d));
  std::vector<ParameterVector> centers;
  centers.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (i < b || spread == 0.0) {
      centers.emplace_back(dim);
      continue;
    }
    rng::RngStream stream(rng::derive_seed(seed, rng::Tag::task_generation,
                                           static_cast<std::uint64_t>(i)));
    centers.push_back(gaussian_vector(stream, dim, scale));
  }
  return QuadraticTask(L, std::move(centers), b, sigma);
}

// ----------------------------------------------------------------- logistic

LogisticTask::LogisticTask(const TaskSpec& spec)
    : n_(spec.n),
      b_(spec.b),
      dim_(static_cast<std::size_t>(spec.d)),
      samples_(static_cast<std::size_t>(spec.samples_per_client)),
      reg_(spec.reg),
      seed_(spec.seed) {
  spec.validate();
  const double dscale = 1.0 / std::sqrt(static_cast<double>(dim_));
  const ParameterVector shared(dim_, dscale);
  features_.resize(static_cast<std::size_t>(n_));
  labels_.resize(static_cast<std::size_t>(n_));
  for (int i = b_; i < n_; ++i) {
    rng::RngStream stream(rng::derive_seed(seed_, rng::Tag::task_generation,
                                           static_cast<std::uint64_t>(i)));
    ParameterVector mu = shared;
    for (auto& v : mu) v += spec.spread * dscale * stream.normal();
    auto& feats = features_[static_cast<std::size_t>(i)];
    auto& labels = labels_[static_cast<std::size_t>(i)];
    double trace = 0.0;
    for (std::size_t s = 0; s < samples_; ++s) {
      const double y = stream.below(2) == 0 ? -1.0 : 1.0;
      ParameterVector a(dim_);
      for (std::size_t j = 0; j < dim_; ++j) a[j] = y * mu[j] + stream.normal();
      trace += squared_norm(a);
      feats.push_back(std::move(a));
      labels.push_back(y);
    }
    L_bound_ = std::max(L_bound_, 0.25 * trace / static_cast<double>(samples_));
  }
  L_bound_ += reg_;
}

ParameterVector LogisticTask::sample_gradient(int client, std::size_t sample,
                                              const ParameterVector& x) const {
  const auto& a = features_[static_cast<std::size_t>(client)][sample];
  const double y = labels_[static_cast<std::size_t>(client)][sample];
  const double margin = y * simd::dot(a.span(), x.span());
  ParameterVector g(dim_);
  add_scaled(g, -y * sigmoid(-margin), a);
  add_scaled(g, reg_, x);
  return g;
}

ParameterVector LogisticTask::local_gradient(int client, const ParameterVector& x) const {
  require_honest(client);
  ParameterVector acc(dim_);
  for (std::size_t s = 0; s < samples_; ++s) add_scaled(acc, 1.0, sample_gradient(client, s, x));
  for (auto& v : acc) v /= static_cast<double>(samples_);
  return acc;
}

ParameterVector LogisticTask::stochastic_gradient(int client, const ParameterVector& x,
                                                  rng::RngStream& stream) const {
  require_honest(client);
  return sample_gradient(client, static_cast<std::size_t>(stream.below(samples_)), x);
}

ParameterVector LogisticTask::global_gradient(const ParameterVector& x) const {
  ParameterVector acc(dim_);
  for (int i = b_; i < n_; ++i) add_scaled(acc, 1.0, local_gradient(i, x));
  for (auto& v : acc) v /= num_honest();
  return acc;
}

double LogisticTask::local_loss(int client, const ParameterVector& x) const {
  const auto& feats = features_[static_cast<std::size_t>(client)];
  const auto& labels = labels_[static_cast<std::size_t>(client)];
  double acc = 0.0;
  for (std::size_t s = 0; s < samples_; ++s) {
    acc += softplus(-labels[s] * simd::dot(feats[s].span(), x.span()));
  }
  return acc / static_cast<double>(samples_) + 0.5 * reg_ * squared_norm(x);
}

double LogisticTask::global_loss(const ParameterVector& x) const {
  double acc = 0.0;
  for (int i = b_; i < n_; ++i) acc += local_loss(i, x);
  return acc / num_honest();
}

TaskConstants LogisticTask::constants(const ParameterVector& x0) const {
  TaskConstants c;
  c.L = L_bound_;
  c.h = num_honest();
  c.estimated = true;

  // Gradient descent with step 1/L to locate the minimizer.
  ParameterVector x(dim_);
  for (int iter = 0; iter < 20000; ++iter) {
    const ParameterVector g = global_gradient(x);
    if (squared_norm(g) < 1e-24) break;
    add_scaled(x, -1.0 / L_bound_, g);
  }
  c.x_star = x;
  c.delta0 = std::max(0.0, global_loss(x0) - global_loss(x));

  std::vector<ParameterVector> points{x0, c.x_star};
  rng::RngStream stream(rng::derive_seed(seed_, rng::Tag::assumption_check, 0xc0));
  for (int k = 0; k < 8; ++k) points.push_back(gaussian_vector(stream, dim_, 1.0));

  double sigma_sq = 0.0;
  double zeta_sq = 0.0;
  for (const auto& p : points) {
    zeta_sq = std::max(zeta_sq, heterogeneity_at(*this, p));
    for (int i = b_; i < n_; ++i) {
      const ParameterVector mean = local_gradient(i, p);
      double acc = 0.0;
      for (std::size_t s = 0; s < samples_; ++s) {
        acc += squared_distance(sample_gradient(i, s, p), mean);
      }
      sigma_sq = std::max(sigma_sq, acc / static_cast<double>(samples_));
    }
  }
  c.sigma = std::sqrt(kEstimateMargin * sigma_sq);
  c.zeta = std::sqrt(kEstimateMargin * zeta_sq);
  return c;
}

std::unique_ptr<Task> make_task(const TaskSpec& spec) {
  spec.validate();
  if (spec.kind == TaskKind::logistic) return std::make_unique<LogisticTask>(spec);
  return std::make_unique<QuadraticTask>(
      make_quadratic_task(spec.n, spec.b, spec.d, spec.L, spec.spread, spec.sigma, spec.seed));
}

// -------------------------------------------------------------- assumptions

AssumptionReport verify_assumptions(const Task& task, int sample_count, int grid,
                                    std::uint64_t seed) {
  if (sample_count < 1 || grid < 2) {
    throw std::invalid_argument("verify_assumptions needs sample_count >= 1 and grid >= 2");
  }
  const std::size_t d = task.dimension();
  AssumptionReport report;
  report.constants = task.constants(ParameterVector(d));
  const TaskConstants& c = report.constants;

  rng::RngStream grid_stream(rng::derive_seed(seed, rng::Tag::assumption_check, 0));
  std::vector<ParameterVector> points;
  for (int k = 0; k < grid; ++k) points.push_back(gaussian_vector(grid_stream, d, 1.0));

  for (int i = task.num_byzantine(); i < task.num_clients(); ++i) {
    std::vector<ParameterVector> grads;
    for (const auto& p : points) grads.push_back(task.local_gradient(i, p));
    for (std::size_t a = 0; a < points.size(); ++a) {
      for (std::size_t b = a + 1; b < points.size(); ++b) {
        const double dx = std::sqrt(squared_distance(points[a], points[b]));
        if (dx == 0.0) continue;
        report.lipschitz_hat = std::max(
            report.lipschitz_hat, std::sqrt(squared_distance(grads[a], grads[b])) / dx);
      }
    }
  }

  const int client = task.num_byzantine();
  const ParameterVector mean = task.local_gradient(client, points.front());
  rng::RngStream noise_stream(rng::derive_seed(seed, rng::Tag::assumption_check, 1));
  double acc = 0.0;
  for (int s = 0; s < sample_count; ++s) {
    acc += squared_distance(task.stochastic_gradient(client, points.front(), noise_stream),
                            mean);
  }
  report.sigma_sq_hat = acc / sample_count;

  report.zeta_sq_min = std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    const double z = heterogeneity_at(task, p);
    report.zeta_sq_hat = std::max(report.zeta_sq_hat, z);
    report.zeta_sq_min = std::min(report.zeta_sq_min, z);
  }

  const double sigma_sq = c.sigma * c.sigma;
  const double zeta_sq = c.zeta * c.zeta;
  if (c.estimated) {
    report.lipschitz_ok = report.lipschitz_hat <= c.L * (1 + 1e-9);
    report.sigma_ok = report.sigma_sq_hat <= sigma_sq * 1.03 + 1e-12;
    report.zeta_ok = report.zeta_sq_hat <= zeta_sq * (1 + 1e-9) + 1e-12;
  } else {
    report.lipschitz_ok = std::abs(report.lipschitz_hat - c.L) <= 1e-9 * c.L;
    report.sigma_ok = sigma_sq == 0.0 ? report.sigma_sq_hat <= 1e-12
                                      : std::abs(report.sigma_sq_hat - sigma_sq) <=
                                            0.03 * sigma_sq;
    const double zeta_tol = 1e-9 * std::max(1.0, zeta_sq);
    report.zeta_ok = std::abs(report.zeta_sq_hat - zeta_sq) <= zeta_tol &&
                     std::abs(report.zeta_sq_min - zeta_sq) <= zeta_tol;
  }
  return report;
}

}  // namespace fedro::tasks
