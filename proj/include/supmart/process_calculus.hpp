#pragma once

// Super-martingale and martingale verdicts relative to a measure set, the
// ess-sup and unit-claim processes, and the class K constructions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "supmart/error.hpp"
#include "supmart/filtered_space.hpp"
#include "supmart/measure_set.hpp"

namespace supmart {

struct Violation {
  std::size_t time = 0;  // m: the step from m-1 to m
  std::size_t cell = 0;  // cell of partitions[m-1]
  std::string measure;   // "generator i" or "closure"
  double gap = 0.0;      // E{f_m | cell} - f_{m-1}, signed
};

struct VerdictReport {
  bool holds = true;
  std::vector<Violation> violations;
  explicit operator bool() const { return holds; }
};

namespace detail {

inline double scaled_tol(double scale) { return tol::eq * std::max(1.0, std::abs(scale)); }

inline void require_same_space(const MeasureSet& set, const AdaptedProcess& f) {
  if (!(set.space() == f.space())) fail(ErrorKind::ShapeMismatch, "process and measure set live on different spaces");
}

// Checks E^P{f_m | F_{m-1}} against f_{m-1}: upper side always, lower side if
// `two_sided`.
inline VerdictReport conditional_verdict(const MeasureSet& set, const AdaptedProcess& f, bool two_sided) {
  require_same_space(set, f);
  const auto& space = set.space();
  VerdictReport report;
  auto record = [&](std::size_t m, std::size_t c, std::string who, double gap) {
    report.holds = false;
    report.violations.push_back({m, c, std::move(who), gap});
  };
  for (std::size_t m = 1; m <= space.horizon(); ++m) {
    const auto& next = f.row(m);
    for (std::size_t c = 0; c < space.cell_count(m - 1); ++c) {
      const double prev = f.on_cell(m - 1, c);
      const double tolerance = scaled_tol(prev);
      if (set.is_hull()) {
        const Cell& cell = space.cell(m - 1, c);
        for (std::size_t i = 0; i < set.generators().size(); ++i) {
          const auto& p = set.generators()[i].probabilities();
          const double gap = cell_weighted_sum(p, next, cell) / cell_mass(p, cell) - prev;
          if (gap > tolerance || (two_sided && gap < -tolerance)) record(m, c, "generator " + std::to_string(i), gap);
        }
      } else {
        const double hi = set.max_conditional(next, m - 1, c).value - prev;
        if (hi > tolerance) record(m, c, "closure", hi);
        if (two_sided) {
          const double lo = set.min_conditional(next, m - 1, c).value - prev;
          if (lo < -tolerance) record(m, c, "closure", lo);
        }
      }
    }
  }
  return report;
}

}  // namespace detail

/// E^P{f_m | F_{m-1}} <= f_{m-1} for every member P, every step and cell.
inline VerdictReport is_supermartingale(const MeasureSet& set, const AdaptedProcess& f) {
  return detail::conditional_verdict(set, f, false);
}

inline VerdictReport is_martingale(const MeasureSet& set, const AdaptedProcess& f) {
  return detail::conditional_verdict(set, f, true);
}

/// f_m = ess sup_P E^P{xi | F_m}.
inline AdaptedProcess ess_sup_process(const MeasureSet& set, std::span<const double> xi) {
  check_length(set.space(), xi, "claim");
  for (double v : xi)
    if (v < 0.0) fail(ErrorKind::InvalidArgument, "ess-sup process needs a nonnegative random value");
  ProcessRows rows;
  for (std::size_t t = 0; t <= set.space().horizon(); ++t) rows.push_back(ess_sup_conditional(set, xi, t).row);
  return AdaptedProcess(set.space(), std::move(rows));
}

/// E^P{xi0 | F_m} for a unit claim, which must not depend on P.
inline AdaptedProcess unit_claim_martingale(const MeasureSet& set, std::span<const double> xi0) {
  if (!is_unit_claim(set, xi0)) fail(ErrorKind::NotUnitClaim, "claim is not a unit claim of the measure set");
  ProcessRows rows;
  for (std::size_t t = 0; t <= set.space().horizon(); ++t) rows.push_back(common_conditional(set, xi0, t));
  return AdaptedProcess(set.space(), std::move(rows));
}

/// One summand C * f_m * E^P{xi | F_m} of a class K process.
struct KTerm {
  Vector claim;            // xi, a unit claim
  AdaptedProcess weight;   // f, pathwise nonincreasing
  double coefficient = 1;  // C >= 0
};

inline bool is_nonincreasing(const AdaptedProcess& f) {
  for (std::size_t m = 1; m <= f.horizon(); ++m)
    for (std::size_t w = 0; w < f.space().outcome_count(); ++w)
      if (f(m, w) > f(m - 1, w) + detail::scaled_tol(f(m - 1, w))) return false;
  return true;
}

inline AdaptedProcess class_k_supermartingale(const MeasureSet& set, const std::vector<KTerm>& terms) {
  const auto& space = set.space();
  ProcessRows rows(space.horizon() + 1, Vector(space.outcome_count(), 0.0));
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const auto& term = terms[k];
    if (!(term.coefficient >= 0.0)) fail(ErrorKind::InvalidArgument, "class K coefficient must be nonnegative");
    if (!(term.weight.space() == space)) fail(ErrorKind::ShapeMismatch, "class K weight on a different space");
    if (!is_nonincreasing(term.weight))
      fail(ErrorKind::NotNonincreasing, "weight of term " + std::to_string(k) + " increases along a path");
    const auto m = unit_claim_martingale(set, term.claim);
    for (std::size_t t = 0; t <= space.horizon(); ++t)
      for (std::size_t w = 0; w < space.outcome_count(); ++w)
        rows[t][w] += term.coefficient * term.weight(t, w) * m(t, w);
  }
  return AdaptedProcess(space, std::move(rows));
}

/// f = M - g with M a martingale under the measure set and g nondecreasing,
/// g_0 = 0.
struct Decomposition {
  AdaptedProcess process;      // f
  AdaptedProcess martingale;   // M
  AdaptedProcess compensator;  // g
  std::optional<std::vector<Vector>> step_claims;  // xi^0_n, n = 1..N (entry n-1)
};

struct DecompositionCheck {
  bool valid = true;
  double reconstruction_error = 0.0;  // max |f - (M - g)|
  double initial_compensator = 0.0;   // max |g_0|
  double min_increment = 0.0;         // min over (m, w) of g_m - g_{m-1}
  bool martingale = true;
  bool witness_equation = true;       // f_{m-1} - E{f_m|F_{m-1}} = E{g_m - g_{m-1}|F_{m-1}}
  std::string message;
  explicit operator bool() const { return valid; }
};

inline DecompositionCheck check_decomposition(const MeasureSet& set, const Decomposition& dec,
                                              double tolerance = tol::eq) {
  const auto& space = set.space();
  DecompositionCheck out;
  const auto& f = dec.process;
  const auto& mart = dec.martingale;
  const auto& g = dec.compensator;
  double scale = 1.0;
  for (const auto& row : f.rows())
    for (double v : row) scale = std::max(scale, std::abs(v));
  const double tl = tolerance * scale;
  for (std::size_t t = 0; t <= space.horizon(); ++t)
    for (std::size_t w = 0; w < space.outcome_count(); ++w)
      out.reconstruction_error = std::max(out.reconstruction_error, std::abs(f(t, w) - (mart(t, w) - g(t, w))));
  for (std::size_t w = 0; w < space.outcome_count(); ++w)
    out.initial_compensator = std::max(out.initial_compensator, std::abs(g(0, w)));
  out.min_increment = space.horizon() == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t t = 1; t <= space.horizon(); ++t)
    for (std::size_t w = 0; w < space.outcome_count(); ++w)
      out.min_increment = std::min(out.min_increment, g(t, w) - g(t - 1, w));
  out.martingale = static_cast<bool>(is_martingale(set, mart));
  Vector h(space.outcome_count());
  for (std::size_t m = 1; m <= space.horizon() && out.witness_equation; ++m) {
    for (const auto& cell : space.partition(m - 1)) {
      std::fill(h.begin(), h.end(), 0.0);
      for (std::size_t w : cell) h[w] = f(m - 1, w) - f(m, w) - (g(m, w) - g(m - 1, w));
      if (!set.annihilates(h, tolerance)) {
        out.witness_equation = false;
        break;
      }
    }
  }
  std::string msg;
  if (out.reconstruction_error > tl) msg += "f != M - g; ";
  if (out.initial_compensator > tl) msg += "g_0 != 0; ";
  if (out.min_increment < -tl) msg += "g decreases; ";
  if (!out.martingale) msg += "M is not a martingale; ";
  if (!out.witness_equation) msg += "witness equation fails; ";
  out.valid = msg.empty();
  out.message = msg;
  return out;
}

/// Class K terms reproducing a nonnegative local regular super-martingale:
/// (xi = (f_N + g_N) / f_0, weight f_0, C = 1) and (xi = 1, weight -g, C = 1).
inline std::vector<KTerm> k_representation(const MeasureSet& set, const AdaptedProcess& f, const Decomposition& dec) {
  const auto& space = set.space();
  if (!(dec.process.space() == space) || dec.process.rows() != f.rows())
    fail(ErrorKind::InvalidDecomposition, "decomposition belongs to a different process");
  if (auto chk = check_decomposition(set, dec); !chk) fail(ErrorKind::InvalidDecomposition, chk.message);
  for (const auto& row : f.rows())
    for (double v : row)
      if (v < 0.0) fail(ErrorKind::InvalidArgument, "class K representation needs a nonnegative process");
  const double f0 = f(0, 0);
  if (!(f0 > 0.0)) fail(ErrorKind::ZeroInitialValue, "f_0 must be positive");
  const std::size_t n = space.horizon();
  Vector xi(space.outcome_count());
  for (std::size_t w = 0; w < xi.size(); ++w) xi[w] = std::max(0.0, (f(n, w) + dec.compensator(n, w)) / f0);
  ProcessRows neg_g = dec.compensator.rows();
  for (auto& row : neg_g)
    for (auto& v : row) v = -v;
  std::vector<KTerm> terms;
  terms.push_back({xi, AdaptedProcess::constant(space, f0), 1.0});
  terms.push_back({Vector(space.outcome_count(), 1.0), AdaptedProcess(space, std::move(neg_g)), 1.0});
  return terms;
}

}  // namespace supmart
