#pragma once

// Random instance generators and small independent oracles shared by the unit
// tests and the acceptance runner. Oracles work from raw partitions and
// probability vectors, never through the library's own conditional
// expectations or linear programs.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "supmart/supmart.hpp"

namespace testing_support {

using supmart::Cell;
using supmart::Partition;
using supmart::ProcessRows;
using supmart::Vector;
using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// ---------------------------------------------------------------- generators

/// Refining filtration on n outcomes with `steps` steps. Each cell splits with
/// probability `split` into 2 or 3 parts.
inline std::vector<Partition> random_filtration(Rng& rng, std::size_t n, std::size_t steps, double split = 0.7) {
  std::vector<Partition> parts;
  Cell all(n);
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  parts.push_back({all});
  for (std::size_t t = 1; t <= steps; ++t) {
    Partition next;
    for (const auto& cell : parts.back()) {
      if (cell.size() >= 2 && uniform(rng, 0, 1) < split) {
        const std::size_t k = std::min<std::size_t>(cell.size(), pick(rng, 2, 3));
        std::vector<std::size_t> cuts;
        std::vector<std::size_t> pos(cell.size() - 1);
        std::iota(pos.begin(), pos.end(), 1);
        std::shuffle(pos.begin(), pos.end(), rng);
        cuts.assign(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(k - 1));
        std::sort(cuts.begin(), cuts.end());
        std::size_t start = 0;
        cuts.push_back(cell.size());
        for (std::size_t c : cuts) {
          next.emplace_back(cell.begin() + static_cast<std::ptrdiff_t>(start), cell.begin() + static_cast<std::ptrdiff_t>(c));
          start = c;
        }
      } else {
        next.push_back(cell);
      }
    }
    parts.push_back(std::move(next));
  }
  for (auto& part : parts)
    for (auto& cell : part) std::sort(cell.begin(), cell.end());
  return parts;
}

inline Vector random_probabilities(Rng& rng, std::size_t n) {
  Vector p(n);
  for (auto& v : p) v = uniform(rng, 0.05, 1.0);
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= s;
  p.back() = 1.0 - std::accumulate(p.begin(), p.end() - 1, 0.0);
  return p;
}

inline Vector normalized(Vector p) {
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= s;
  p.back() = 1.0 - std::accumulate(p.begin(), p.end() - 1, 0.0);
  return p;
}

/// p * z / E^p z for z constant on the cells of `part`.
inline Vector reweighted(Rng& rng, const Vector& p, const Partition& part) {
  Vector q(p);
  for (const auto& cell : part) {
    const double z = uniform(rng, 0.3, 3.0);
    for (std::size_t w : cell) q[w] *= z;
  }
  return normalized(q);
}

/// Random values in [lo, hi] constant on the cells of `part`.
inline Vector random_measurable(Rng& rng, const Partition& part, double lo, double hi) {
  std::size_t n = 0;
  for (const auto& c : part) n += c.size();
  Vector x(n);
  for (const auto& cell : part) {
    const double v = uniform(rng, lo, hi);
    for (std::size_t w : cell) x[w] = v;
  }
  return x;
}

// ------------------------------------------------------------------- oracles

inline std::size_t cell_of(const Partition& part, std::size_t w) {
  for (std::size_t c = 0; c < part.size(); ++c)
    if (std::find(part[c].begin(), part[c].end(), w) != part[c].end()) return c;
  return part.size();
}

/// E^p{x | part} by direct summation.
inline Vector cond_exp(const Partition& part, const Vector& p, const Vector& x) {
  Vector out(x.size());
  for (std::size_t w = 0; w < x.size(); ++w) {
    const auto& cell = part[cell_of(part, w)];
    double num = 0, den = 0;
    for (std::size_t v : cell) {
      num += p[v] * x[v];
      den += p[v];
    }
    out[w] = num / den;
  }
  return out;
}

inline double expect(const Vector& p, const Vector& x) {
  double s = 0;
  for (std::size_t w = 0; w < x.size(); ++w) s += p[w] * x[w];
  return s;
}

/// Backward super-martingale: f_N given, f_{m-1} = max_P E^P{f_m|F_{m-1}} + slack.
inline ProcessRows supermartingale_from(Rng& rng, const std::vector<Partition>& parts, const std::vector<Vector>& gens,
                                        Vector terminal, double slack_prob = 0.5) {
  const std::size_t n_steps = parts.size() - 1;
  ProcessRows rows(parts.size());
  rows[n_steps] = std::move(terminal);
  for (std::size_t m = n_steps; m >= 1; --m) {
    Vector prev(rows[m].size(), -1e300);
    for (const auto& g : gens) {
      const Vector c = cond_exp(parts[m - 1], g, rows[m]);
      for (std::size_t w = 0; w < prev.size(); ++w) prev[w] = std::max(prev[w], c[w]);
    }
    for (const auto& cell : parts[m - 1]) {
      const double slack = uniform(rng, 0, 1) < slack_prob ? uniform(rng, 0, 2) : 0.0;
      for (std::size_t w : cell) prev[w] += slack;
    }
    rows[m - 1] = std::move(prev);
  }
  return rows;
}

/// Classical Doob compensator under a single measure:
/// g_m - g_{m-1} = f_{m-1} - E^p{f_m | F_{m-1}}.
inline ProcessRows doob_compensator(const std::vector<Partition>& parts, const Vector& p, const ProcessRows& f) {
  ProcessRows g(f.size(), Vector(f[0].size(), 0.0));
  for (std::size_t m = 1; m < f.size(); ++m) {
    const Vector c = cond_exp(parts[m - 1], p, f[m]);
    for (std::size_t w = 0; w < c.size(); ++w) g[m][w] = g[m - 1][w] + f[m - 1][w] - c[w];
  }
  return g;
}

/// Max over (m, w) of |E^p{x_m | F_{m-1}} - x_{m-1}| for each measure; measures
/// may have zero entries, in which case null cells are skipped.
inline double martingale_defect(const std::vector<Partition>& parts, const std::vector<Vector>& measures,
                                const ProcessRows& x) {
  double worst = 0;
  for (const auto& p : measures) {
    for (std::size_t m = 1; m < x.size(); ++m) {
      for (const auto& cell : parts[m - 1]) {
        double num = 0, den = 0;
        for (std::size_t w : cell) {
          num += p[w] * x[m][w];
          den += p[w];
        }
        if (den <= 1e-14) continue;
        worst = std::max(worst, std::abs(num / den - x[m - 1][cell.front()]));
      }
    }
  }
  return worst;
}

struct DecompositionAudit {
  double reconstruction = 0;  // max |f - (M - g)|
  double g0 = 0;              // max |g_0|
  double min_increment = 0;   // min Δg
  double martingale = 0;      // martingale_defect of M
  bool ok(double tol) const {
    return reconstruction <= tol && g0 <= tol && min_increment >= -tol && martingale <= tol;
  }
};

inline DecompositionAudit audit(const std::vector<Partition>& parts, const std::vector<Vector>& measures,
                                const ProcessRows& f, const ProcessRows& mart, const ProcessRows& g) {
  DecompositionAudit a;
  a.min_increment = 1e300;
  for (std::size_t t = 0; t < f.size(); ++t) {
    for (std::size_t w = 0; w < f[t].size(); ++w) {
      a.reconstruction = std::max(a.reconstruction, std::abs(f[t][w] - (mart[t][w] - g[t][w])));
      if (t == 0) a.g0 = std::max(a.g0, std::abs(g[0][w]));
      if (t > 0) a.min_increment = std::min(a.min_increment, g[t][w] - g[t - 1][w]);
    }
  }
  if (f.size() == 1) a.min_increment = 0;
  a.martingale = martingale_defect(parts, measures, mart);
  return a;
}

// --------------------------------------------------- one-period asset markets

/// One-period market with trivial steps prepended: partitions {Ω} for times
/// 0..lead, then singletons at time lead+1. S is constant s0 until the last
/// time and then takes the values `s1`.
struct OnePeriodMarket {
  std::vector<Partition> parts;
  ProcessRows asset;
  double s0 = 0;
  Vector s1;
};

inline OnePeriodMarket random_one_period(Rng& rng, std::size_t outcomes, std::size_t lead, double zero_prob = 0.15) {
  OnePeriodMarket mk;
  mk.s0 = 100;
  mk.s1.resize(outcomes);
  bool up = false, down = false;
  while (!up || !down) {
    up = down = false;
    for (auto& v : mk.s1) {
      v = uniform(rng, 0, 1) < zero_prob ? mk.s0 : std::round(uniform(rng, 60, 140) * 100) / 100;
      up = up || v > mk.s0;
      down = down || v < mk.s0;
    }
  }
  Cell all(outcomes);
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t t = 0; t <= lead; ++t) mk.parts.push_back({all});
  Partition singles;
  for (std::size_t w = 0; w < outcomes; ++w) singles.push_back({w});
  mk.parts.push_back(singles);
  mk.asset.assign(lead + 1, Vector(outcomes, mk.s0));
  mk.asset.push_back(mk.s1);
  return mk;
}

/// Extreme points of the one-period martingale-measure polytope, by direct
/// construction: unit mass on a zero-increment outcome, or the two-point
/// measure on a pair with increments of opposite signs.
inline std::vector<Vector> one_period_vertices(double s0, const Vector& s1) {
  std::vector<Vector> out;
  const std::size_t n = s1.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (s1[i] == s0) {
      Vector q(n, 0.0);
      q[i] = 1;
      out.push_back(q);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double di = s1[i] - s0, dj = s1[j] - s0;
      if (di < 0 && dj > 0) {
        Vector q(n, 0.0);
        q[i] = dj / (dj - di);
        q[j] = -di / (dj - di);
        out.push_back(q);
      }
    }
  }
  return out;
}

// ------------------------------------------------------------ binomial trees

/// Recombination-free tree on 2^N outcomes (or 3^N with `branching` = 3)
/// with a single asset; every node's children straddle the node value.
struct TreeMarket {
  std::vector<Partition> parts;
  ProcessRows asset;
};

inline TreeMarket random_tree(Rng& rng, std::size_t steps, std::size_t branching) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < steps; ++i) n *= branching;
  TreeMarket mk;
  mk.asset.assign(steps + 1, Vector(n, 100.0));
  for (std::size_t t = 0; t <= steps; ++t) {
    std::size_t width = 1;
    for (std::size_t i = t; i < steps; ++i) width *= branching;
    Partition part;
    for (std::size_t start = 0; start < n; start += width) {
      Cell c(width);
      std::iota(c.begin(), c.end(), start);
      part.push_back(c);
    }
    mk.parts.push_back(part);
  }
  for (std::size_t t = 1; t <= steps; ++t) {
    for (const auto& parent : mk.parts[t - 1]) {
      const double s = mk.asset[t - 1][parent.front()];
      const std::size_t width = parent.size() / branching;
      for (std::size_t k = 0; k < branching; ++k) {
        double v;
        if (k == 0) v = s * uniform(rng, 0.7, 0.97);
        else if (k == 1) v = s * uniform(rng, 1.03, 1.3);
        else v = s * uniform(rng, 0.75, 1.25);
        v = std::round(v * 1000) / 1000;
        for (std::size_t i = 0; i < width; ++i) mk.asset[t][parent[k * width + i]] = v;
      }
    }
  }
  return mk;
}

// ------------------------------------------------- micro fair-price oracle

/// Fair price on a two-outcome one-step space (F_1 = singletons), found by
/// search over (alpha, eta): eta_1 is eliminated through the first measure's
/// equation, the remaining violation
///   V(alpha, eta_0) = max(f_0 - eta_0, f_1 - eta_1, max_k |E^k eta - alpha|, -eta_1)
/// is minimized over eta_0 by a zooming grid, and alpha is located by
/// bisection (feasibility is monotone in alpha: shifting eta by a constant
/// keeps every constraint).
inline double grid_fair_price(const std::vector<Vector>& measures, const Vector& f) {
  const double fmax = std::max(f[0], f[1]);
  auto violation = [&](double alpha, double eta0) {
    const auto& p = measures.front();
    const double eta1 = (alpha - p[0] * eta0) / p[1];
    double v = std::max({f[0] - eta0, f[1] - eta1, -eta1, -eta0});
    for (const auto& q : measures) v = std::max(v, std::abs(q[0] * eta0 + q[1] * eta1 - alpha));
    return v;
  };
  auto min_violation = [&](double alpha) {
    double lo = 0, hi = alpha / measures.front()[0] + 1;
    double best = 1e300, arg = 0;
    for (int round = 0; round < 60; ++round) {
      const int k = 40;
      const double h = (hi - lo) / k;
      for (int i = 0; i <= k; ++i) {
        const double e = lo + h * i;
        const double v = violation(alpha, e);
        if (v < best) {
          best = v;
          arg = e;
        }
      }
      lo = std::max(0.0, arg - 2 * h);
      hi = arg + 2 * h;
    }
    return best;
  };
  double lo = 0, hi = fmax;  // alpha = max f is feasible with eta constant
  if (min_violation(0) <= 1e-13) return 0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (min_violation(mid) <= 1e-12 * std::max(1.0, fmax)) hi = mid;
    else lo = mid;
  }
  return hi;
}

inline supmart::FilteredSpace space_of(const std::vector<Partition>& parts) {
  std::size_t n = 0;
  for (const auto& c : parts.front()) n += c.size();
  return supmart::FilteredSpace::build(n, parts);
}

}  // namespace testing_support
