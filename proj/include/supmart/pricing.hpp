#pragma once

// Fair price of a contingent claim relative to a convex set of equivalent
// measures: the least alpha such that f_N <= alpha E^P{zeta|F_N} for some unit
// claim zeta. On a finite space the infimum is attained and is the optimum of
// a single linear program.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "supmart/error.hpp"
#include "supmart/filtered_space.hpp"
#include "supmart/linear_program.hpp"
#include "supmart/measure_set.hpp"
#include "supmart/process_calculus.hpp"

namespace supmart {

struct FairPriceResult {
  double price = 0.0;          // f_0
  Vector witness_claim;        // zeta_0, a unit claim
  bool witness_bound = false;  // f_N <= f_0 E^P{zeta_0 | F_N} for every member P
  double witness_slack = 0.0;  // min over cells and constraint measures of f_0 E{zeta_0|F_N} - f_N
  double lower_bound = 0.0;    // sup_P E^P f_N
};

namespace detail {

inline void require_claim(const FilteredSpace& space, std::span<const double> claim) {
  check_length(space, claim, "claim");
  for (double v : claim)
    if (v < 0.0 || !std::isfinite(v)) fail(ErrorKind::InvalidArgument, "claims must be nonnegative and finite");
  if (!measurable_row(space, space.horizon(), claim)) fail(ErrorKind::NotAdapted, "claim is not F_N-measurable");
}

// Verifies f_N <= price * E^P{zeta | F_N} for every member P. Hull sets check
// each generator (conditional expectations of convex combinations are
// averages of the generators'). On a polytope the witness conditional
// expectation is measure-independent.
inline void verify_witness(const MeasureSet& set, std::span<const double> claim, FairPriceResult& out) {
  const auto& space = set.space();
  const std::size_t n = space.horizon();
  out.witness_slack = std::numeric_limits<double>::infinity();
  if (set.is_hull()) {
    for (const auto& g : set.generators()) {
      const Vector cond = conditional_expectation(space, g, out.witness_claim, n);
      for (std::size_t w = 0; w < claim.size(); ++w)
        out.witness_slack = std::min(out.witness_slack, out.price * cond[w] - claim[w]);
    }
  } else {
    const Vector cond = common_conditional(set, out.witness_claim, n);
    for (std::size_t w = 0; w < claim.size(); ++w)
      out.witness_slack = std::min(out.witness_slack, out.price * cond[w] - claim[w]);
  }
  double scale = 1.0;
  for (double v : claim) scale = std::max(scale, v);
  out.witness_bound = out.witness_slack >= -tol::eq * scale;
}

}  // namespace detail

/// Minimizes alpha over (alpha, eta >= 0) with E^P{eta|F_N} >= f_N and
/// E^P eta = alpha for every member P.
inline FairPriceResult fair_price_full(const MeasureSet& set, std::span<const double> claim) {
  const auto& space = set.space();
  detail::require_claim(space, claim);
  const std::size_t n = space.outcome_count();
  LinearProgram lp;
  const std::size_t alpha = lp.add_variable(1.0);
  for (std::size_t w = 0; w < n; ++w) lp.add_variable(0.0);
  auto eta = [](std::size_t w) { return w + 1; };

  if (set.is_hull()) {
    for (const auto& g : set.generators()) {
      for (const auto& cell : space.partition(space.horizon())) {
        std::vector<std::pair<std::size_t, double>> terms;
        double rhs = 0.0;
        for (std::size_t w : cell) {
          terms.emplace_back(eta(w), g[w]);
          rhs += g[w] * claim[w];
        }
        lp.add_constraint(terms, Sense::GreaterEqual, rhs);
      }
    }
  } else {
    // The polytope leaves the split of mass inside an F_N cell unconstrained,
    // so the conditional bound for every member is the pointwise bound.
    for (std::size_t w = 0; w < n; ++w) lp.add_constraint(LinearProgram::Terms{{eta(w), 1.0}}, Sense::GreaterEqual, claim[w]);
  }
  const auto& basis = set.span_basis();
  for (std::size_t k = 0; k < basis.size(); ++k) {
    // sum_w b_w eta_w = alpha * sum_w b_w
    const double total = std::accumulate(basis[k].begin(), basis[k].end(), 0.0);
    std::vector<std::pair<std::size_t, double>> terms{{alpha, -total}};
    for (std::size_t w = 0; w < n; ++w) terms.emplace_back(eta(w), basis[k][w]);
    lp.add_constraint(terms, Sense::Equal, 0.0);
  }
  const auto res = lp.solve(Goal::Minimize);
  if (!res.optimal()) fail(ErrorKind::InfeasiblePricing, "full pricing program has no solution");

  FairPriceResult out;
  out.price = std::max(0.0, res.x[alpha]);
  out.lower_bound = sup_expectation(set, claim);
  out.witness_claim.assign(n, 1.0);
  if (out.price > 0.0) {
    for (std::size_t w = 0; w < n; ++w) out.witness_claim[w] = std::max(0.0, res.x[eta(w)]) / out.price;
  }
  detail::verify_witness(set, claim, out);
  return out;
}

/// Minimizes sum beta_i over beta >= 0 with sum beta_i E^P{xi_i|F_N} >= f_N on
/// every F_N cell, for the listed unit claims xi_i.
inline FairPriceResult fair_price_generated(const MeasureSet& set, const std::vector<Vector>& unit_claims,
                                            std::span<const double> claim) {
  const auto& space = set.space();
  detail::require_claim(space, claim);
  if (unit_claims.empty()) fail(ErrorKind::InvalidArgument, "at least one generating unit claim is required");
  const std::size_t n = space.horizon();
  std::vector<Vector> terminal;
  for (std::size_t i = 0; i < unit_claims.size(); ++i) {
    if (!is_unit_claim(set, unit_claims[i]))
      fail(ErrorKind::NotUnitClaim, "generating claim " + std::to_string(i) + " is not a unit claim");
    terminal.push_back(common_conditional(set, unit_claims[i], n));
  }
  LinearProgram lp;
  for (std::size_t i = 0; i < unit_claims.size(); ++i) lp.add_variable(1.0);
  for (const auto& cell : space.partition(n)) {
    const std::size_t w = cell.front();
    Vector row(unit_claims.size());
    for (std::size_t i = 0; i < unit_claims.size(); ++i) row[i] = terminal[i][w];
    lp.add_constraint(std::move(row), Sense::GreaterEqual, claim[w]);
  }
  const auto res = lp.solve(Goal::Minimize);
  if (!res.optimal())
    fail(ErrorKind::InfeasiblePricing, "the generating claims cannot dominate the contingent claim");

  FairPriceResult out;
  out.price = std::max(0.0, res.objective);
  out.lower_bound = sup_expectation(set, claim);
  out.witness_claim.assign(space.outcome_count(), 0.0);
  if (out.price > 0.0) {
    for (std::size_t i = 0; i < unit_claims.size(); ++i) {
      const double weight = std::max(0.0, res.x[i]) / out.price;
      for (std::size_t w = 0; w < space.outcome_count(); ++w) out.witness_claim[w] += weight * unit_claims[i][w];
    }
  } else {
    out.witness_claim = unit_claims.front();
  }
  detail::verify_witness(set, claim, out);
  return out;
}

/// Box-worst-case price of (S_N - K)^+ when D_N^1 <= S_m <= D_N^2.
inline double euro_call_price(double s0, double upper_bound, double strike) {
  if (!(s0 > 0.0)) fail(ErrorKind::InvalidArgument, "S0 must be positive");
  if (!(upper_bound > 0.0)) fail(ErrorKind::InvalidArgument, "upper price bound must be positive");
  if (strike > upper_bound) return 0.0;
  return s0 * (1.0 - strike / upper_bound);
}

/// Box-worst-case price of (K - S_N)^+.
inline double euro_put_price(double lower_bound, double strike) {
  if (!(lower_bound > 0.0)) fail(ErrorKind::InvalidArgument, "lower price bound must be positive");
  if (strike < lower_bound) return 0.0;
  return strike - lower_bound;
}

}  // namespace supmart
