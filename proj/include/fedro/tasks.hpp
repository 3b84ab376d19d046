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

#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "fedro/parameter_vector.hpp"
#include "fedro/rng.hpp"

namespace fedro::tasks {

struct TaskConstants {
  double L = 0.0;
  double sigma = 0.0;
  double zeta = 0.0;
  // F(x0) - F*.
  double delta0 = 0.0;
  ParameterVector x_star;
  int h = 0;
  // True when the values are empirical estimates rather than closed forms.
  bool estimated = false;
};

enum class TaskKind { quadratic, logistic };

std::string_view task_kind_name(TaskKind kind);
TaskKind parse_task_kind(std::string_view name);

struct TaskSpec {
  TaskKind kind = TaskKind::quadratic;
  int n = 10;
  int b = 0;
  int d = 2;
  double L = 1.0;
  double spread = 0.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  // Logistic only.
  int samples_per_client = 32;
  double reg = 0.1;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// Client indices 0..b-1 are Byzantine, b..n-1 honest. The Byzantine
// designation is bookkeeping for the harness; Byzantine clients have no
// loss and asking for their gradients throws std::invalid_argument.
class Task {
 public:
  virtual ~Task() = default;

  virtual std::size_t dimension() const = 0;
  virtual int num_clients() const = 0;
  virtual int num_byzantine() const = 0;
  int num_honest() const { return num_clients() - num_byzantine(); }
  bool is_honest(int client) const {
    return client >= num_byzantine() && client < num_clients();
  }

  virtual ParameterVector local_gradient(int client, const ParameterVector& x) const = 0;
  virtual ParameterVector stochastic_gradient(int client, const ParameterVector& x,
                                              rng::RngStream& stream) const = 0;
  virtual ParameterVector global_gradient(const ParameterVector& x) const = 0;
  virtual double global_loss(const ParameterVector& x) const = 0;
  virtual TaskConstants constants(const ParameterVector& x0) const = 0;

 protected:
  void require_honest(int client) const;
};

// f_i(x) = (L/2)||x - c_i||^2 with isotropic Gaussian gradient noise of
// total variance sigma^2.
class QuadraticTask final : public Task {
 public:
  // centers has one entry per client; entries 0..b-1 are ignored.
  QuadraticTask(double L, std::vector<ParameterVector> centers, int b, double sigma);

  std::size_t dimension() const override { return dim_; }
  int num_clients() const override { return static_cast<int>(centers_.size()); }
  int num_byzantine() const override { return b_; }

  ParameterVector local_gradient(int client, const ParameterVector& x) const override;
  ParameterVector stochastic_gradient(int client, const ParameterVector& x,
                                      rng::RngStream& stream) const override;
  // L (x - c_bar).
  ParameterVector global_gradient(const ParameterVector& x) const override;
  // Average of the honest losses, summed client by client.
  double global_loss(const ParameterVector& x) const override;
  TaskConstants constants(const ParameterVector& x0) const override;

  // Second evaluation path: (L/2)||x - c_bar||^2 + F*.
  double global_loss_closed_form(const ParameterVector& x) const;
  // Second evaluation path: average of the honest local gradients.
  ParameterVector global_gradient_per_client(const ParameterVector& x) const;

  const ParameterVector& center(int client) const;
  const ParameterVector& honest_center_mean() const { return center_mean_; }
  double smoothness() const { return L_; }
  double noise_sigma() const { return sigma_; }
  // (L^2 / h) sum_{i honest} ||c_i - c_bar||^2.
  double zeta_sq() const { return zeta_sq_; }
  double min_loss() const { return zeta_sq_ / (2.0 * L_); }

 private:
  double L_;
  std::vector<ParameterVector> centers_;
  int b_;
  double sigma_;
  std::size_t dim_;
  ParameterVector center_mean_;
  double zeta_sq_ = 0.0;
};

// Honest centers drawn i.i.d. N(0, spread^2 / d) per coordinate from the
// task_generation stream of `seed`; Byzantine centers are zero.
QuadraticTask make_quadratic_task(int n, int b, int d, double L, double spread,
                                  double sigma, std::uint64_t seed);

// L2-regularized logistic regression. Client i holds samples (a, y) with
// y uniform in {-1, +1} and a ~ N(y mu_i, I), where mu_i is a shared mean
// direction perturbed by `spread`. A stochastic gradient is the gradient at
// one uniformly drawn sample. Constants are estimated: L by the trace bound,
// sigma and zeta on sample points, x_star by gradient descent.
class LogisticTask final : public Task {
 public:
  explicit LogisticTask(const TaskSpec& spec);

  std::size_t dimension() const override { return dim_; }
  int num_clients() const override { return n_; }
  int num_byzantine() const override { return b_; }

  ParameterVector local_gradient(int client, const ParameterVector& x) const override;
  ParameterVector stochastic_gradient(int client, const ParameterVector& x,
                                      rng::RngStream& stream) const override;
  ParameterVector global_gradient(const ParameterVector& x) const override;
  double global_loss(const ParameterVector& x) const override;
  TaskConstants constants(const ParameterVector& x0) const override;

  double smoothness_bound() const { return L_bound_; }

 private:
  ParameterVector sample_gradient(int client, std::size_t sample,
                                  const ParameterVector& x) const;
  double local_loss(int client, const ParameterVector& x) const;

  int n_;
  int b_;
  std::size_t dim_;
  std::size_t samples_;
  double reg_;
  std::uint64_t seed_;
  // features_[client][sample] and labels_[client][sample].
  std::vector<std::vector<ParameterVector>> features_;
  std::vector<std::vector<double>> labels_;
  double L_bound_ = 0.0;
};

std::unique_ptr<Task> make_task(const TaskSpec& spec);

struct AssumptionReport {
  // Largest ||grad f_i(x) - grad f_i(y)|| / ||x - y|| over honest clients and
  // grid pairs.
  double lipschitz_hat = 0.0;
  // Mean squared deviation of stochastic gradients from the local gradient,
  // over `sample_count` draws at the first grid point, first honest client.
  double sigma_sq_hat = 0.0;
  // Largest (1/h) sum_i ||grad f_i(x) - grad F(x)||^2 over grid points.
  double zeta_sq_hat = 0.0;
  // Smallest over grid points; equals zeta_sq_hat for quadratics.
  double zeta_sq_min = 0.0;
  TaskConstants constants;
  bool lipschitz_ok = false;
  bool sigma_ok = false;
  bool zeta_ok = false;
  bool ok() const { return lipschitz_ok && sigma_ok && zeta_ok; }
};

// Empirical check of smoothness, bounded noise and bounded heterogeneity on
// `grid` random points N(0, I). Tolerances: Lipschitz ratio within 1e-9
// relative of L (at most L for estimated constants), noise second moment
// within 3% of sigma^2 (1e-12 absolute when sigma = 0), heterogeneity within
// 1e-9 relative of zeta^2 (at most zeta^2 for estimated constants).
AssumptionReport verify_assumptions(const Task& task, int sample_count, int grid,
                                    std::uint64_t seed);

}  // namespace fedro::tasks
