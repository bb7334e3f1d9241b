#pragma once

// Dense two-phase simplex for the small linear programs that arise on finite
// filtered spaces (tens of variables and constraints).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "supmart/error.hpp"

namespace supmart {

enum class Sense { LessEqual, Equal, GreaterEqual };
enum class Goal { Minimize, Maximize };
enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;

  bool optimal() const { return status == LpStatus::Optimal; }
};

class LinearProgram {
 public:
  using Terms = std::vector<std::pair<std::size_t, double>>;

  /// Adds a variable with the given objective coefficient. Variables are
  /// nonnegative unless `free` is set.
  std::size_t add_variable(double cost = 0.0, bool free = false) {
    cost_.push_back(cost);
    free_.push_back(free);
    for (auto& row : rows_) row.push_back(0.0);
    return cost_.size() - 1;
  }

  std::size_t variable_count() const { return cost_.size(); }
  std::size_t constraint_count() const { return rows_.size(); }

  void set_cost(std::size_t var, double cost) { cost_.at(var) = cost; }

  /// Dense constraint; `coeffs` must have one entry per variable.
  void add_constraint(std::vector<double> coeffs, Sense sense, double rhs) {
    if (coeffs.size() != cost_.size()) fail(ErrorKind::ShapeMismatch, "constraint width differs from variable count");
    rows_.push_back(std::move(coeffs));
    senses_.push_back(sense);
    rhs_.push_back(rhs);
  }

  /// Sparse constraint given as (variable, coefficient) pairs.
  void add_constraint(const Terms& terms, Sense sense, double rhs) {
    std::vector<double> row(cost_.size(), 0.0);
    for (auto [var, coeff] : terms) row.at(var) += coeff;
    add_constraint(std::move(row), sense, rhs);
  }

  LpResult solve(Goal goal) const;

 private:
  std::vector<double> cost_;
  std::vector<bool> free_;
  std::vector<std::vector<double>> rows_;
  std::vector<Sense> senses_;
  std::vector<double> rhs_;
};

namespace detail {

// Tableau in canonical form: rows_ x (cols + 1), last column is the rhs.
class Tableau {
 public:
  static constexpr double pivot_eps = 1e-9;

  Tableau(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<std::size_t> basis)
      : a_(std::move(a)), b_(std::move(b)), basis_(std::move(basis)) {}

  std::size_t rows() const { return a_.size(); }
  std::size_t cols() const { return a_.empty() ? 0 : a_.front().size(); }
  const std::vector<std::size_t>& basis() const { return basis_; }
  double rhs(std::size_t r) const { return b_[r]; }
  double at(std::size_t r, std::size_t c) const { return a_[r][c]; }

  void pivot(std::size_t r, std::size_t c) {
    const double p = a_[r][c];
    for (auto& v : a_[r]) v /= p;
    b_[r] /= p;
    for (std::size_t i = 0; i < rows(); ++i) {
      if (i == r) continue;
      const double f = a_[i][c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols(); ++j) a_[i][j] -= f * a_[r][j];
      a_[i][c] = 0.0;
      b_[i] -= f * b_[r];
      if (std::abs(b_[i]) < 1e-15) b_[i] = 0.0;
    }
    basis_[r] = c;
  }

  // Minimizes cost . x over the current basis, restricting entering columns to
  // `allowed`. Returns false if unbounded. Dantzig pricing with a largest-pivot
  // ratio test; falls back to Bland's rule after a run of degenerate pivots.
  bool minimize(const std::vector<double>& cost, const std::vector<bool>& allowed) {
    std::size_t degenerate_run = 0;
    for (;;) {
      const bool bland = degenerate_run > 2 * (rows() + cols());
      std::size_t enter = cols();
      double most_negative = -1e-11;
      for (std::size_t j = 0; j < cols(); ++j) {
        if (!allowed[j] || is_basic(j)) continue;
        double rc = cost[j];
        for (std::size_t i = 0; i < rows(); ++i) rc -= cost[basis_[i]] * a_[i][j];
        if (rc < most_negative) {
          enter = j;
          most_negative = rc;
          if (bland) break;
        }
      }
      if (enter == cols()) return true;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows(); ++i)
        if (a_[i][enter] > pivot_eps) best = std::min(best, b_[i] / a_[i][enter]);
      if (!std::isfinite(best)) return false;
      std::size_t leave = rows();
      const double slack = 1e-12 * std::max(1.0, best);
      for (std::size_t i = 0; i < rows(); ++i) {
        if (a_[i][enter] <= pivot_eps || b_[i] / a_[i][enter] > best + slack) continue;
        if (leave == rows() || (bland ? basis_[i] < basis_[leave] : a_[i][enter] > a_[leave][enter])) leave = i;
      }
      degenerate_run = best <= slack ? degenerate_run + 1 : 0;
      pivot(leave, enter);
      if (b_[leave] < 0.0) b_[leave] = 0.0;
    }
  }

  bool is_basic(std::size_t j) const { return std::find(basis_.begin(), basis_.end(), j) != basis_.end(); }

  void drop_row(std::size_t r) {
    a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(r));
    b_.erase(b_.begin() + static_cast<std::ptrdiff_t>(r));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
  }

 private:
  std::vector<std::vector<double>> a_;
  std::vector<double> b_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

inline LpResult LinearProgram::solve(Goal goal) const {
  const std::size_t n = cost_.size();
  const std::size_t m = rows_.size();

  // Column layout: structural (free variables split into +/-), slacks, artificials.
  std::vector<std::size_t> plus(n), minus(n, static_cast<std::size_t>(-1));
  std::size_t cols = 0;
  for (std::size_t j = 0; j < n; ++j) {
    plus[j] = cols++;
    if (free_[j]) minus[j] = cols++;
  }
  const std::size_t structural = cols;
  std::vector<std::size_t> slack(m, static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < m; ++i)
    if (senses_[i] != Sense::Equal) slack[i] = cols++;
  const std::size_t first_artificial = cols;
  cols += m;

  std::vector<std::vector<double>> a(m, std::vector<double>(cols, 0.0));
  std::vector<double> b(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double scale = 0.0;
    for (double v : rows_[i]) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      a[i][plus[j]] = rows_[i][j] / scale;
      if (free_[j]) a[i][minus[j]] = -rows_[i][j] / scale;
    }
    if (senses_[i] == Sense::LessEqual) a[i][slack[i]] = 1.0;
    if (senses_[i] == Sense::GreaterEqual) a[i][slack[i]] = -1.0;
    b[i] = rhs_[i] / scale;
    if (b[i] < 0) {
      for (auto& v : a[i]) v = -v;
      b[i] = -b[i];
    }
    a[i][first_artificial + i] = 1.0;
  }
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = first_artificial + i;
  detail::Tableau tab(std::move(a), std::move(b), std::move(basis));

  // Phase 1: minimize the sum of artificials.
  std::vector<double> phase1(cols, 0.0);
  for (std::size_t i = 0; i < m; ++i) phase1[first_artificial + i] = 1.0;
  std::vector<bool> all(cols, true);
  tab.minimize(phase1, all);
  double infeasibility = 0.0;
  for (std::size_t i = 0; i < tab.rows(); ++i)
    if (tab.basis()[i] >= first_artificial) infeasibility += tab.rhs(i);
  LpResult result;
  if (infeasibility > tol::lp) {
    result.status = LpStatus::Infeasible;
    return result;
  }
  // Drive remaining (zero-level) artificials out of the basis; drop redundant rows.
  for (std::size_t i = 0; i < tab.rows();) {
    if (tab.basis()[i] < first_artificial) {
      ++i;
      continue;
    }
    std::size_t enter = first_artificial;
    for (std::size_t j = 0; j < first_artificial; ++j) {
      if (std::abs(tab.at(i, j)) > 1e-9 && !tab.is_basic(j)) {
        enter = j;
        break;
      }
    }
    if (enter == first_artificial) {
      tab.drop_row(i);
    } else {
      tab.pivot(i, enter);
      ++i;
    }
  }

  // Phase 2.
  const double sign = goal == Goal::Minimize ? 1.0 : -1.0;
  std::vector<double> phase2(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    phase2[plus[j]] = sign * cost_[j];
    if (free_[j]) phase2[minus[j]] = -sign * cost_[j];
  }
  std::vector<bool> allowed(cols, true);
  for (std::size_t j = first_artificial; j < cols; ++j) allowed[j] = false;
  if (!tab.minimize(phase2, allowed)) {
    result.status = LpStatus::Unbounded;
    return result;
  }

  std::vector<double> raw(structural + (first_artificial - structural), 0.0);
  for (std::size_t i = 0; i < tab.rows(); ++i)
    if (tab.basis()[i] < raw.size()) raw[tab.basis()[i]] = tab.rhs(i);
  result.x.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    result.x[j] = raw[plus[j]];
    if (free_[j]) result.x[j] -= raw[minus[j]];
  }
  result.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) result.objective += cost_[j] * result.x[j];
  result.status = LpStatus::Optimal;
  return result;
}

}  // namespace supmart
