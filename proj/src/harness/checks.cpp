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

#include "fedro/harness/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fedro/harness/report.hpp"
#include "fedro/sampling_planner.hpp"

namespace fedro::harness {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Running minimum of a slack, with the first offending case kept.
struct Slack {
  double worst = kInf;
  std::string where;
  void update(double slack, const std::string& label) {
    if (slack < worst) {
      worst = slack;
      where = label;
    }
  }
  CheckItem item(std::string name) const {
    CheckItem c;
    c.name = std::move(name);
    c.passed = worst >= 0;
    c.margin = worst;
    c.detail = "worst at " + where;
    return c;
  }
};

std::vector<double> unit_grid(int steps) {
  std::vector<double> g;
  for (int i = 1; i < steps; ++i) g.push_back(static_cast<double>(i) / steps);
  return g;
}

std::string label2(double a, double b) {
  return "(" + format_double(a) + ", " + format_double(b) + ")";
}

}  // namespace

bool CheckReport::passed() const {
  return std::all_of(items.begin(), items.end(), [](const CheckItem& c) { return c.passed; });
}

std::string CheckReport::str() const {
  std::ostringstream out;
  for (const auto& c : items) {
    out << (c.passed ? "PASS " : "FAIL ") << suite << "/" << c.name
        << " margin=" << format_double(c.margin);
    if (!c.detail.empty()) out << " " << c.detail;
    out << "\n";
  }
  out << suite << ": " << (passed() ? "pass" : "FAIL") << "\n";
  return out.str();
}

CheckReport check_d_properties() {
  using planner::kl_bernoulli;
  using planner::kl_bernoulli_derivative;
  CheckReport report{"d-properties", {}};
  const auto grid = unit_grid(100);

  Slack derivative;
  Slack monotone;
  Slack positive;
  Slack diagonal;
  Slack convex;
  constexpr double h = 1e-6;
  for (double beta : grid) {
    for (double alpha : grid) {
      const std::string at = label2(alpha, beta);
      if (alpha - h > 0 && alpha + h < 1) {
        const double fd = (kl_bernoulli(alpha + h, beta) - kl_bernoulli(alpha - h, beta)) / (2 * h);
        derivative.update(1e-6 - std::abs(fd - kl_bernoulli_derivative(alpha, beta)), at);
      }
      const double d = kl_bernoulli(alpha, beta);
      if (alpha == beta) {
        diagonal.update(1e-12 - std::abs(d), at);
      } else {
        positive.update(d > 0 ? d : -1.0, at);
      }
    }
    // Consecutive grid points on each side of beta.
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double a0 = grid[i];
      const double a1 = grid[i + 1];
      const double d0 = kl_bernoulli(a0, beta);
      const double d1 = kl_bernoulli(a1, beta);
      if (a0 >= beta) monotone.update(d1 - d0 > 0 ? d1 - d0 : -1.0, label2(a1, beta));
      if (a1 <= beta) monotone.update(d0 - d1 > 0 ? d0 - d1 : -1.0, label2(a0, beta));
    }
  }
  const auto coarse = unit_grid(50);
  for (double beta : coarse) {
    for (std::size_t i = 0; i < coarse.size(); ++i) {
      for (std::size_t j = i + 1; j < coarse.size(); ++j) {
        const double a = coarse[i];
        const double b = coarse[j];
        const double mid = kl_bernoulli(0.5 * (a + b), beta);
        const double chord = 0.5 * (kl_bernoulli(a, beta) + kl_bernoulli(b, beta));
        convex.update(chord - mid + 1e-9, label2(a, b) + " beta=" + format_double(beta));
      }
    }
  }
  report.items.push_back(derivative.item("derivative_formula"));
  report.items.push_back(monotone.item("monotonicity"));
  report.items.push_back(positive.item("positivity"));
  report.items.push_back(diagonal.item("diagonal_zero"));
  report.items.push_back(convex.item("convexity"));
  return report;
}

CheckReport check_chernoff() {
  CheckReport report{"chernoff", {}};
  Slack lower;
  Slack upper;
  long long instances = 0;
  for (std::int64_t M = 10; M <= 60; M += 10) {
    for (int tenths : {1, 2, 3}) {
      const std::int64_t K = M * tenths / 10;
      const double beta = static_cast<double>(K) / static_cast<double>(M);
      for (std::int64_t m = 1; m <= M; ++m) {
        for (std::int64_t k = 1; k < m; ++k) {
          const double alpha = static_cast<double>(k) / static_cast<double>(m);
          if (!(alpha > beta)) continue;
          const double exact = planner::hypergeom_tail_exact(M, K, m, k);
          const std::string at = "M=" + std::to_string(M) + " K=" + std::to_string(K) +
                                 " m=" + std::to_string(m) + " k=" + std::to_string(k);
          lower.update(exact - planner::chernoff_lower(M, m, alpha, beta), at);
          upper.update(planner::chernoff_upper(m, alpha, beta) - exact, at);
          ++instances;
        }
      }
    }
  }
  auto lo = lower.item("lower_bound");
  auto up = upper.item("upper_bound");
  lo.detail += " over " + std::to_string(instances) + " instances";
  up.detail += " over " + std::to_string(instances) + " instances";
  report.items.push_back(lo);
  report.items.push_back(up);
  return report;
}

CheckReport check_kappa(const KappaCheckOptions& o) {
  CheckReport report{"kappa", {}};
  const double claim = o.kappa_claim.value_or(kInf);
  const auto result =
      aggregation::certify_robustness(o.rule, o.n_hat, o.b_hat, claim, o.trials, o.seed, o.dim);
  CheckItem item;
  item.name = aggregation::describe(o.rule);
  item.passed = std::isfinite(result.max_ratio) && result.max_ratio <= claim;
  item.margin = claim - result.max_ratio;
  std::ostringstream detail;
  detail << "kappa_hat=" << format_double(result.max_ratio) << " instances=" << result.instances
         << " n_hat=" << o.n_hat << " b_hat=" << o.b_hat;
  if (o.kappa_claim) detail << " claim=" << format_double(*o.kappa_claim);
  detail << " witness={";
  for (std::size_t i = 0; i < result.witness_subset.size(); ++i) {
    detail << (i ? "," : "") << result.witness_subset[i];
  }
  detail << "}";
  item.detail = detail.str();
  report.items.push_back(item);
  return report;
}

CheckReport check_assumptions(const tasks::TaskSpec& spec, int sample_count, int grid,
                              std::uint64_t seed) {
  CheckReport report{"assumptions", {}};
  const auto task = tasks::make_task(spec);
  const auto r = tasks::verify_assumptions(*task, sample_count, grid, seed);
  const auto& c = r.constants;
  const std::string kind = c.estimated ? " (estimated constants)" : "";

  const double s2 = c.sigma * c.sigma;
  const double z2 = c.zeta * c.zeta;
  double smooth_margin;
  double noise_margin;
  double hetero_margin;
  if (c.estimated) {
    smooth_margin = c.L * (1 + 1e-9) - r.lipschitz_hat;
    noise_margin = s2 * 1.03 + 1e-12 - r.sigma_sq_hat;
    hetero_margin = z2 * (1 + 1e-9) + 1e-12 - r.zeta_sq_hat;
  } else {
    smooth_margin = 1e-9 * c.L - std::abs(r.lipschitz_hat - c.L);
    noise_margin = s2 == 0.0 ? 1e-12 - r.sigma_sq_hat : 0.03 * s2 - std::abs(r.sigma_sq_hat - s2);
    hetero_margin = 1e-9 * std::max(1.0, z2) -
                    std::max(std::abs(r.zeta_sq_hat - z2), std::abs(r.zeta_sq_min - z2));
  }
  CheckItem smooth{"smoothness", r.lipschitz_ok, smooth_margin,
                   "L_hat=" + format_double(r.lipschitz_hat) + " L=" + format_double(c.L) + kind};
  CheckItem noise{"bounded_noise", r.sigma_ok, noise_margin,
                  "sigma_sq_hat=" + format_double(r.sigma_sq_hat) +
                      " sigma_sq=" + format_double(s2) + kind};
  CheckItem hetero{"bounded_heterogeneity", r.zeta_ok, hetero_margin,
                   "zeta_sq_hat=" + format_double(r.zeta_sq_hat) +
                       " zeta_sq=" + format_double(z2) + kind};
  report.items = {smooth, noise, hetero};
  return report;
}

}  // namespace fedro::harness
