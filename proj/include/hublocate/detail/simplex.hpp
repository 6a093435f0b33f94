// Copyright 2026 The hublocate Authors
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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace hublocate::detail {

// min c.x  s.t.  A x = b,  0 <= x <= upper.
struct LpProblem {
  std::size_t num_vars = 0;
  std::vector<double> cost;
  std::vector<double> upper;               // +inf allowed
  std::vector<std::vector<double>> rows;   // dense, num_vars wide
  std::vector<double> rhs;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;
};

// Dense bounded-variable two-phase primal simplex with Bland's rule.
class BoundedSimplex {
 public:
  explicit BoundedSimplex(const LpProblem& lp) : lp_(lp) {}

  LpResult solve() {
    setup();
    LpResult result;
    // Phase 1: minimize the sum of artificials.
    std::vector<double> phase1(cols_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) phase1[n_ + i] = 1.0;
    if (run(phase1) != LpStatus::kOptimal) {
      throw std::logic_error("phase 1 cannot be unbounded");
    }
    double infeas = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] >= n_) infeas += beta_[i];
    }
    double scale = 1.0;
    for (double r : lp_.rhs) scale = std::max(scale, std::abs(r));
    if (infeas > kFeasTol * scale) return result;
    drive_out_artificials();
    for (std::size_t i = 0; i < m_; ++i) upper_[n_ + i] = 0.0;
    std::vector<double> phase2(cols_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) phase2[j] = lp_.cost[j];
    const LpStatus status = run(phase2);
    result.status = status;
    if (status != LpStatus::kOptimal) return result;
    result.x.assign(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      if (at_upper_[j]) result.x[j] = upper_[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) result.x[basis_[i]] = beta_[i];
    }
    for (std::size_t j = 0; j < n_; ++j) {
      result.x[j] = std::clamp(result.x[j], 0.0, upper_[j]);
      result.objective += lp_.cost[j] * result.x[j];
    }
    return result;
  }

 private:
  static constexpr double kPivotTol = 1e-9;
  static constexpr double kCostTol = 1e-9;
  static constexpr double kFeasTol = 1e-9;

  void setup() {
    n_ = lp_.num_vars;
    m_ = lp_.rows.size();
    cols_ = n_ + m_;
    tab_.assign(m_, std::vector<double>(cols_, 0.0));
    beta_.assign(m_, 0.0);
    basis_.assign(m_, 0);
    upper_.assign(cols_, std::numeric_limits<double>::infinity());
    at_upper_.assign(cols_, false);
    in_basis_.assign(cols_, false);
    for (std::size_t j = 0; j < n_; ++j) upper_[j] = lp_.upper[j];
    for (std::size_t i = 0; i < m_; ++i) {
      const double sign = lp_.rhs[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) tab_[i][j] = sign * lp_.rows[i][j];
      tab_[i][n_ + i] = 1.0;
      beta_[i] = sign * lp_.rhs[i];
      basis_[i] = n_ + i;
      in_basis_[n_ + i] = true;
    }
  }

  std::vector<double> reduced_costs(const std::vector<double>& c) const {
    std::vector<double> d(c);
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) d[j] -= cb * tab_[i][j];
    }
    return d;
  }

  void pivot(std::size_t r, std::size_t q) {
    const double p = tab_[r][q];
    for (double& v : tab_[r]) v /= p;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = tab_[i][q];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) tab_[i][j] -= f * tab_[r][j];
      tab_[i][q] = 0.0;
    }
    in_basis_[basis_[r]] = false;
    basis_[r] = q;
    in_basis_[q] = true;
    at_upper_[q] = false;
  }

  LpStatus run(const std::vector<double>& c) {
    const std::size_t max_iter = 50000 + 100 * cols_ * (m_ + 1);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
      const std::vector<double> d = reduced_costs(c);
      std::size_t q = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (in_basis_[j] || upper_[j] <= 0.0) continue;
        if ((!at_upper_[j] && d[j] < -kCostTol) || (at_upper_[j] && d[j] > kCostTol)) {
          q = j;
          break;
        }
      }
      if (q == cols_) return LpStatus::kOptimal;
      const double dir = at_upper_[q] ? -1.0 : 1.0;
      double step = upper_[q];
      std::size_t leave = m_;
      bool leave_to_upper = false;
      for (std::size_t i = 0; i < m_; ++i) {
        const double alpha = dir * tab_[i][q];
        double limit;
        bool to_upper;
        if (alpha > kPivotTol) {
          limit = std::max(0.0, beta_[i]) / alpha;
          to_upper = false;
        } else if (alpha < -kPivotTol && std::isfinite(upper_[basis_[i]])) {
          limit = std::max(0.0, upper_[basis_[i]] - beta_[i]) / -alpha;
          to_upper = true;
        } else {
          continue;
        }
        if (limit < step || (limit == step && leave != m_ &&
                             basis_[i] < basis_[leave])) {
          step = limit;
          leave = i;
          leave_to_upper = to_upper;
        }
      }
      if (!std::isfinite(step)) return LpStatus::kUnbounded;
      for (std::size_t i = 0; i < m_; ++i) beta_[i] -= dir * step * tab_[i][q];
      if (leave == m_) {
        at_upper_[q] = !at_upper_[q];
        continue;
      }
      const double entering_value = at_upper_[q] ? upper_[q] - step : step;
      const std::size_t out = basis_[leave];
      pivot(leave, q);
      beta_[leave] = entering_value;
      at_upper_[out] = leave_to_upper;
    }
    throw std::runtime_error("simplex iteration limit reached");
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        if (in_basis_[j] || std::abs(tab_[i][j]) <= kPivotTol) continue;
        const double value = at_upper_[j] ? upper_[j] : 0.0;
        pivot(i, j);
        beta_[i] = value;
        break;
      }
    }
  }

  const LpProblem& lp_;
  std::size_t n_ = 0, m_ = 0, cols_ = 0;
  std::vector<std::vector<double>> tab_;
  std::vector<double> beta_;
  std::vector<std::size_t> basis_;
  std::vector<double> upper_;
  std::vector<bool> at_upper_;
  std::vector<bool> in_basis_;
};

inline LpResult solve_lp(const LpProblem& lp) {
  return BoundedSimplex(lp).solve();
}

}  // namespace hublocate::detail
