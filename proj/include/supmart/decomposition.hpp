#pragma once

// Optional (local regular) decomposition f = M - g of a super-martingale
// relative to a convex set of equivalent measures.
//
// Two routes are provided:
//  * local_regular_witness: for any measure set, solves per (step, cell) the
//    linear feasibility problem for a nonnegative F_m-measurable increment
//    gbar_m with f_{m-1} - E^P{f_m|F_{m-1}} = E^P{gbar_m|F_{m-1}} for all P.
//  * optional_decomposition_complete: for complete sets, builds the step
//    claims xi^0_n = 1 + alpha_n d^n from a unit-claim martingale and
//    assembles M_m = f_0 + sum f_{i-1}(xi^0_i - 1).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "supmart/error.hpp"
#include "supmart/filtered_space.hpp"
#include "supmart/linear_program.hpp"
#include "supmart/measure_set.hpp"
#include "supmart/process_calculus.hpp"

namespace supmart {

struct WitnessOutcome {
  std::optional<Decomposition> decomposition;
  std::size_t failed_step = 0;  // set when infeasible
  std::size_t failed_cell = 0;  // cell of partitions[failed_step - 1]
  bool feasible() const { return decomposition.has_value(); }
};

namespace detail {

// Solves for gbar >= 0 on the children of one F_{m-1} cell. Returns values
// per child (in the order of space.children), or nullopt when infeasible.
inline std::optional<Vector> witness_on_cell(const MeasureSet& set, const AdaptedProcess& f, std::size_t m,
                                             std::size_t c) {
  const auto& space = set.space();
  const Cell& parent = space.cell(m - 1, c);
  const auto& kids = space.children(m - 1, c);
  const double prev = f.on_cell(m - 1, c);
  const auto& basis = set.span_basis();

  // rhs_b = sum_{w in cell} b_w (f_{m-1} - f_m(w)); child weights b(child)
  std::vector<double> rhs(basis.size());
  std::vector<Vector> weights(basis.size(), Vector(kids.size(), 0.0));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto& b = basis[k];
    for (std::size_t w : parent) rhs[k] += b[w] * (prev - f(m, w));
    for (std::size_t i = 0; i < kids.size(); ++i) weights[k][i] = cell_mass(b, space.cell(m, kids[i]));
  }
  double scale = 1.0;
  for (double r : rhs) scale = std::max(scale, std::abs(r));

  // Predictable candidate first: gbar constant on the cell (the classical
  // Doob compensator when the set is a singleton).
  {
    double num = 0.0, den = 0.0;
    std::vector<double> mass(basis.size());
    for (std::size_t k = 0; k < basis.size(); ++k) {
      mass[k] = cell_mass(basis[k], parent);
      num += mass[k] * rhs[k];
      den += mass[k] * mass[k];
    }
    const double level = den > 0.0 ? num / den : 0.0;
    bool ok = level >= -tol::eq * scale;
    for (std::size_t k = 0; k < basis.size() && ok; ++k)
      ok = std::abs(mass[k] * level - rhs[k]) <= tol::eq * scale;
    if (ok) return Vector(kids.size(), std::max(0.0, level));
  }

  LinearProgram lp;
  for (std::size_t i = 0; i < kids.size(); ++i) lp.add_variable(1.0);
  for (std::size_t k = 0; k < basis.size(); ++k) lp.add_constraint(weights[k], Sense::Equal, rhs[k]);
  const auto res = lp.solve(Goal::Minimize);
  if (!res.optimal()) return std::nullopt;
  return res.x;
}

inline Decomposition assemble(const AdaptedProcess& f, const std::vector<Vector>& increments,
                              std::optional<std::vector<Vector>> step_claims = std::nullopt) {
  const auto& space = f.space();
  ProcessRows g(space.horizon() + 1, Vector(space.outcome_count(), 0.0));
  ProcessRows mart(space.horizon() + 1, Vector(space.outcome_count(), 0.0));
  for (std::size_t t = 0; t <= space.horizon(); ++t) {
    for (std::size_t w = 0; w < space.outcome_count(); ++w) {
      if (t > 0) g[t][w] = g[t - 1][w] + increments[t - 1][w];
      mart[t][w] = f(t, w) + g[t][w];
    }
  }
  return Decomposition{f, AdaptedProcess(space, std::move(mart)), AdaptedProcess(space, std::move(g)),
                       std::move(step_claims)};
}

}  // namespace detail

/// Non-throwing witness search. Requires f to be a super-martingale.
inline WitnessOutcome try_local_regular_witness(const MeasureSet& set, const AdaptedProcess& f) {
  if (auto v = is_supermartingale(set, f); !v) {
    const auto& first = v.violations.front();
    fail(ErrorKind::NotSupermartingale,
         "step " + std::to_string(first.time) + " cell " + std::to_string(first.cell) + " under " + first.measure);
  }
  const auto& space = set.space();
  std::vector<Vector> increments;
  for (std::size_t m = 1; m <= space.horizon(); ++m) {
    Vector inc(space.outcome_count(), 0.0);
    for (std::size_t c = 0; c < space.cell_count(m - 1); ++c) {
      auto sol = detail::witness_on_cell(set, f, m, c);
      if (!sol) {
        WitnessOutcome out;
        out.failed_step = m;
        out.failed_cell = c;
        return out;
      }
      const auto& kids = space.children(m - 1, c);
      for (std::size_t i = 0; i < kids.size(); ++i)
        for (std::size_t w : space.cell(m, kids[i])) inc[w] = (*sol)[i];
    }
    increments.push_back(std::move(inc));
  }
  WitnessOutcome out;
  out.decomposition = detail::assemble(f, increments);
  return out;
}

inline Decomposition local_regular_witness(const MeasureSet& set, const AdaptedProcess& f) {
  auto out = try_local_regular_witness(set, f);
  if (!out.feasible())
    fail(ErrorKind::Infeasible, "no witness at step " + std::to_string(out.failed_step) + ", cell " +
                                    std::to_string(out.failed_cell) + " of time " +
                                    std::to_string(out.failed_step - 1));
  if (auto chk = check_decomposition(set, *out.decomposition); !chk)
    fail(ErrorKind::InvalidDecomposition, "witness re-verification failed: " + chk.message);
  return std::move(*out.decomposition);
}

struct AlphaResult {
  double alpha = 0.0;
  std::optional<std::size_t> minimizing_atom;  // smallest cell index attaining the minimum
  Vector step_claim;                           // xi^0_n = 1 + alpha d^n over outcomes
};

/// alpha_n = min over atoms with d_i < 0 of (1 - f_i) / (-d_i), with the bound
/// f <= 1 + alpha_n d^n verified on every atom of F_n. `ratio` is an
/// F_n-measurable nonnegative vector with sup_P E^P ratio <= 1.
inline AlphaResult alpha_coefficient(const MeasureSet& set, std::span<const double> xi0, std::size_t n,
                                     std::span<const double> ratio) {
  const auto& space = set.space();
  check_length(space, ratio, "ratio");
  if (n == 0 || n > space.horizon()) fail(ErrorKind::IndexOutOfRange, "alpha step must lie in 1..N");
  if (!measurable_row(space, n, ratio)) fail(ErrorKind::NotAdapted, "ratio is not F_n-measurable");
  for (double v : ratio)
    if (v < 0.0) fail(ErrorKind::InvalidArgument, "ratio must be nonnegative");
  if (sup_expectation(set, ratio) > 1.0 + tol::eq)
    fail(ErrorKind::InvalidArgument, "ratio is not normalized: sup expectation exceeds 1");
  const Vector d = increment_process(set, xi0)[n - 1];
  const auto& part = space.partition(n);

  AlphaResult out;
  for (std::size_t a = 0; a < part.size(); ++a) {
    const std::size_t w = part[a].front();
    if (d[w] < 0.0) {
      const double cand = (1.0 - ratio[w]) / (-d[w]);
      if (!out.minimizing_atom || cand < out.alpha) {
        out.alpha = cand;
        out.minimizing_atom = a;
      }
    }
  }
  out.step_claim.assign(space.outcome_count(), 1.0);
  for (std::size_t w = 0; w < out.step_claim.size(); ++w) out.step_claim[w] = 1.0 + out.alpha * d[w];
  for (std::size_t a = 0; a < part.size(); ++a) {
    const std::size_t w = part[a].front();
    if (ratio[w] > out.step_claim[w] + tol::eq * std::max(1.0, std::abs(out.step_claim[w])))
      fail(ErrorKind::IncompletenessDetected,
           "step " + std::to_string(n) + ": bound 1 + alpha d fails on atom " + std::to_string(a) + " (" +
               std::to_string(ratio[w]) + " > " + std::to_string(out.step_claim[w]) + ")");
  }
  Vector h(space.outcome_count(), 0.0);
  for (const auto& cell : space.partition(n - 1)) {
    std::fill(h.begin(), h.end(), 0.0);
    for (std::size_t w : cell) h[w] = out.step_claim[w] - 1.0;
    if (!set.annihilates(h)) fail(ErrorKind::MeasureDependent, "step claim has conditional mean different from 1");
  }
  return out;
}

/// Optional decomposition on a complete measure set, driven by the unit claim
/// xi0 (not identically 1).
inline Decomposition optional_decomposition_complete(const MeasureSet& set, std::span<const double> xi0,
                                                     const AdaptedProcess& f) {
  const auto& space = set.space();
  detail::require_same_space(set, f);
  check_length(space, xi0, "xi0");
  if (std::all_of(xi0.begin(), xi0.end(), [](double v) { return std::abs(v - 1.0) <= tol::eq; }))
    fail(ErrorKind::InvalidArgument, "xi0 must differ from the constant 1");
  if (!is_unit_claim(set, xi0)) fail(ErrorKind::NotUnitClaim, "xi0 is not a unit claim of the measure set");
  if (auto v = is_supermartingale(set, f); !v) {
    const auto& first = v.violations.front();
    fail(ErrorKind::NotSupermartingale,
         "step " + std::to_string(first.time) + " cell " + std::to_string(first.cell) + " under " + first.measure);
  }
  const auto d = increment_process(set, xi0);

  // Shift so the smallest value is exactly 1; constants are martingales, and
  // the shift depends only on f up to additive constants.
  double fmin = f(0, 0);
  for (const auto& row : f.rows())
    for (double v : row) fmin = std::min(fmin, v);
  const double shift = 1.0 - fmin;
  ProcessRows h = f.rows();
  for (auto& row : h)
    for (auto& v : row) v += shift;

  const std::size_t n_out = space.outcome_count();
  std::vector<Vector> increments, claims;
  ProcessRows mart(space.horizon() + 1, Vector(n_out, h[0][0]));
  for (std::size_t n = 1; n <= space.horizon(); ++n) {
    Vector ratio(n_out);
    for (std::size_t w = 0; w < n_out; ++w) ratio[w] = h[n][w] / h[n - 1][w];
    const bool degenerate = std::all_of(d[n - 1].begin(), d[n - 1].end(), [](double v) { return v == 0.0; });
    if (!degenerate) {
      const double s = sup_expectation(set, ratio);
      for (auto& v : ratio) v /= s;
    }
    // The super-martingale property already gives sup_P E^P ratio <= 1 for the
    // raw ratio; guard the rounding.
    const double sup_now = sup_expectation(set, ratio);
    if (sup_now > 1.0) {
      if (sup_now > 1.0 + tol::eq) fail(ErrorKind::InvalidArgument, "normalized ratio exceeds 1 in expectation");
      for (auto& v : ratio) v /= sup_now;
    }
    auto alpha = alpha_coefficient(set, xi0, n, ratio);
    Vector inc(n_out);
    for (std::size_t w = 0; w < n_out; ++w) {
      inc[w] = -h[n][w] + h[n - 1][w] * alpha.step_claim[w];
      mart[n][w] = mart[n - 1][w] + h[n - 1][w] * (alpha.step_claim[w] - 1.0);
    }
    increments.push_back(std::move(inc));
    claims.push_back(std::move(alpha.step_claim));
  }

  ProcessRows g(space.horizon() + 1, Vector(n_out, 0.0));
  for (std::size_t t = 1; t <= space.horizon(); ++t)
    for (std::size_t w = 0; w < n_out; ++w) g[t][w] = g[t - 1][w] + increments[t - 1][w];
  for (auto& row : mart)
    for (auto& v : row) v -= shift;
  Decomposition dec{f, AdaptedProcess(space, std::move(mart)), AdaptedProcess(space, std::move(g)),
                    std::move(claims)};
  if (auto chk = check_decomposition(set, dec); !chk)
    fail(ErrorKind::InvalidDecomposition, "complete-set decomposition re-verification failed: " + chk.message);
  return dec;
}

}  // namespace supmart
