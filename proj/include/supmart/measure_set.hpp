#pragma once

// Convex sets of equivalent measures on a finite filtered space, and the
// measure-level operations built on them: conditional expectations, change of
// measure, essential suprema, the per-time restriction metric, unit claims and
// completeness.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "supmart/error.hpp"
#include "supmart/filtered_space.hpp"
#include "supmart/linear_program.hpp"

namespace supmart {

/// Strictly positive probability vector over the outcomes.
class Measure {
 public:
  explicit Measure(Vector probabilities) : p_(std::move(probabilities)) {
    if (p_.empty()) fail(ErrorKind::InvalidMeasure, "empty probability vector");
    double total = 0.0;
    for (std::size_t w = 0; w < p_.size(); ++w) {
      if (!(p_[w] > 0.0) || !std::isfinite(p_[w]))
        fail(ErrorKind::InvalidMeasure, "outcome " + std::to_string(w) + " has nonpositive probability");
      total += p_[w];
    }
    if (std::abs(total - 1.0) > tol::mass)
      fail(ErrorKind::InvalidMeasure, "probabilities sum to " + std::to_string(total));
  }

  static Measure uniform(std::size_t n) { return Measure(Vector(n, 1.0 / static_cast<double>(n))); }

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t w) const { return p_[w]; }
  const Vector& probabilities() const { return p_; }

 private:
  Vector p_;
};

inline double cell_mass(std::span<const double> p, const Cell& cell) {
  double s = 0.0;
  for (std::size_t w : cell) s += p[w];
  return s;
}

inline double cell_weighted_sum(std::span<const double> p, std::span<const double> x, const Cell& cell) {
  double s = 0.0;
  for (std::size_t w : cell) s += p[w] * x[w];
  return s;
}

inline void check_length(const FilteredSpace& space, std::span<const double> x, const char* what) {
  if (x.size() != space.outcome_count())
    fail(ErrorKind::ShapeMismatch, std::string(what) + " has " + std::to_string(x.size()) + " entries, expected " +
                                       std::to_string(space.outcome_count()));
}

/// E^P{X | F_t} as a row over outcomes.
inline Vector conditional_expectation(const FilteredSpace& space, const Measure& p, std::span<const double> x,
                                      std::size_t t) {
  check_length(space, p.probabilities(), "measure");
  check_length(space, x, "random value");
  Vector row(space.outcome_count());
  for (const auto& cell : space.partition(t)) {
    const double v = cell_weighted_sum(p.probabilities(), x, cell) / cell_mass(p.probabilities(), cell);
    for (std::size_t w : cell) row[w] = v;
  }
  return row;
}

/// E^{P1}{X | F_t} computed under P2 through the normalized density
/// phi_t = z / E^{P2}{z | F_t}, z = dP1/dP2.
inline Vector change_of_measure_conditional(const FilteredSpace& space, const Measure& p1, const Measure& p2,
                                            std::span<const double> x, std::size_t t) {
  check_length(space, p1.probabilities(), "measure");
  check_length(space, x, "random value");
  const std::size_t n = space.outcome_count();
  Vector density(n);
  for (std::size_t w = 0; w < n; ++w) density[w] = p1[w] / p2[w];
  const Vector density_t = conditional_expectation(space, p2, density, t);
  Vector weighted(n);
  for (std::size_t w = 0; w < n; ++w) weighted[w] = x[w] * density[w] / density_t[w];
  return conditional_expectation(space, p2, weighted, t);
}

/// rho_t(P1, P2): total variation over the cells of partitions[t].
inline double restriction_metric(const FilteredSpace& space, const Measure& p1, const Measure& p2, std::size_t t) {
  check_length(space, p1.probabilities(), "measure");
  check_length(space, p2.probabilities(), "measure");
  double d = 0.0;
  for (const auto& cell : space.partition(t))
    d += std::abs(cell_mass(p1.probabilities(), cell) - cell_mass(p2.probabilities(), cell));
  return d;
}

/// Optimum of a (conditional) expectation over the closure of a measure set.
struct Optimum {
  double value = 0.0;
  std::optional<std::size_t> generator;  // attaining generator, hull sets only
  Vector measure;                        // an attaining measure of the closure
};

/// A convex set of equivalent measures: either the convex hull of finitely many
/// strictly positive generators, or the set of strictly positive measures
/// under which every listed asset is a martingale.
class MeasureSet {
 public:
  enum class Kind { GeneratorHull, MartingalePolytope };

  static MeasureSet hull(const FilteredSpace& space, std::vector<Measure> generators);
  static MeasureSet martingale_polytope(const FilteredSpace& space, std::vector<AdaptedProcess> assets);

  Kind kind() const { return kind_; }
  bool is_hull() const { return kind_ == Kind::GeneratorHull; }
  const FilteredSpace& space() const { return space_; }
  const std::vector<Measure>& generators() const { return generators_; }
  const std::vector<AdaptedProcess>& assets() const { return assets_; }

  /// A strictly positive member (first generator, or the polytope's
  /// max-min interior point).
  const Measure& reference() const { return kind_ == Kind::GeneratorHull ? generators_.front() : *interior_; }

  /// Vectors spanning the linear hull of the set. A linear functional of the
  /// measure vanishes on every member iff it vanishes on each basis vector.
  const std::vector<Vector>& span_basis() const { return span_basis_; }

  /// Strictly positive members whose linear span equals that of the set.
  std::vector<Measure> spanning_measures() const;

  /// Polytope closure {q >= 0 : A q = b}; rows of A and b (empty for hulls).
  const std::vector<Vector>& constraint_rows() const { return rows_; }
  const Vector& constraint_rhs() const { return rhs_; }

  /// sup / inf over the closure of sum_w c[w] q[w].
  Optimum max_linear(std::span<const double> c) const;
  Optimum min_linear(std::span<const double> c) const;

  /// sup / inf over members of E^Q{X | cell}, cell in partitions[t].
  Optimum max_conditional(std::span<const double> x, std::size_t t, std::size_t cell) const;
  Optimum min_conditional(std::span<const double> x, std::size_t t, std::size_t cell) const;

  /// True iff sum_w h[w] q[w] = 0 for every member q (within tolerance,
  /// relative to the scale of h).
  bool annihilates(std::span<const double> h, double tolerance = tol::eq) const;

  /// Vertices of the closure (generators for hulls). Exhaustive basis
  /// enumeration; intended for small diagnostic instances.
  std::vector<Vector> vertices() const;

  /// Membership in the closure of the restriction of the set to F_n, for a
  /// measure given by its masses on the cells of partitions[n].
  bool restriction_contains(std::span<const double> atom_masses, std::size_t n) const;

 private:
  MeasureSet(Kind kind, FilteredSpace space) : kind_(kind), space_(std::move(space)) {}
  void build_polytope();

  Kind kind_;
  FilteredSpace space_;
  std::vector<Measure> generators_;
  std::vector<AdaptedProcess> assets_;
  std::vector<Vector> rows_;
  Vector rhs_;
  std::optional<Measure> interior_;
  std::vector<Vector> span_basis_;
  std::vector<Vector> null_space_;
};

inline MeasureSet MeasureSet::hull(const FilteredSpace& space, std::vector<Measure> generators) {
  if (generators.empty()) fail(ErrorKind::InvalidArgument, "a generator hull needs at least one measure");
  for (const auto& g : generators) check_length(space, g.probabilities(), "generator");
  MeasureSet set(Kind::GeneratorHull, space);
  set.generators_ = std::move(generators);
  for (const auto& g : set.generators_) set.span_basis_.push_back(g.probabilities());
  return set;
}

inline MeasureSet MeasureSet::martingale_polytope(const FilteredSpace& space, std::vector<AdaptedProcess> assets) {
  for (const auto& a : assets)
    if (!(a.space() == space)) fail(ErrorKind::ShapeMismatch, "asset defined on a different space");
  MeasureSet set(Kind::MartingalePolytope, space);
  set.assets_ = std::move(assets);
  set.build_polytope();
  return set;
}

inline void MeasureSet::build_polytope() {
  const std::size_t n = space_.outcome_count();
  for (std::size_t m = 1; m <= space_.horizon(); ++m) {
    for (const auto& cell : space_.partition(m - 1)) {
      for (const auto& asset : assets_) {
        Vector row(n, 0.0);
        bool nonzero = false;
        for (std::size_t w : cell) {
          row[w] = asset(m, w) - asset(m - 1, w);
          nonzero = nonzero || row[w] != 0.0;
        }
        if (nonzero) {
          rows_.push_back(std::move(row));
          rhs_.push_back(0.0);
        }
      }
    }
  }
  rows_.emplace_back(n, 1.0);
  rhs_.push_back(1.0);

  // Max-min interior point: maximize s subject to q >= s, A q = b.
  LinearProgram lp;
  for (std::size_t w = 0; w < n; ++w) lp.add_variable();
  const std::size_t s = lp.add_variable(1.0);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    Vector row = rows_[r];
    row.push_back(0.0);
    lp.add_constraint(std::move(row), Sense::Equal, rhs_[r]);
  }
  for (std::size_t w = 0; w < n; ++w) lp.add_constraint(LinearProgram::Terms{{w, 1.0}, {s, -1.0}}, Sense::GreaterEqual, 0.0);
  lp.add_constraint(LinearProgram::Terms{{s, 1.0}}, Sense::LessEqual, 1.0);
  const auto res = lp.solve(Goal::Maximize);
  if (!res.optimal() || res.x[s] <= tol::lp)
    fail(ErrorKind::EmptyMartingalePolytope, "no strictly positive martingale measure exists for the assets");
  Vector q(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(n));
  const double total = std::accumulate(q.begin(), q.end(), 0.0);
  for (auto& v : q) v /= total;
  interior_.emplace(std::move(q));

  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows_.size()), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < rows_.size(); ++r)
    for (std::size_t w = 0; w < n; ++w) a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(w)) = rows_[r][w];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double threshold = 1e-10 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > threshold) ++rank;
  span_basis_.push_back(interior_->probabilities());
  for (Eigen::Index k = rank; k < static_cast<Eigen::Index>(n); ++k) {
    Vector v(n);
    for (std::size_t w = 0; w < n; ++w) v[w] = svd.matrixV()(static_cast<Eigen::Index>(w), k);
    null_space_.push_back(v);
    span_basis_.push_back(std::move(v));
  }
}

inline std::vector<Measure> MeasureSet::spanning_measures() const {
  if (is_hull()) return generators_;
  std::vector<Measure> out{*interior_};
  const auto& q = interior_->probabilities();
  const double qmin = *std::min_element(q.begin(), q.end());
  for (const auto& v : null_space_) {
    double vmax = 0.0;
    for (double x : v) vmax = std::max(vmax, std::abs(x));
    const double step = 0.5 * qmin / vmax;
    Vector p(q.size());
    for (std::size_t w = 0; w < q.size(); ++w) p[w] = q[w] + step * v[w];
    // renormalize away rounding drift in the sum
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& x : p) x /= total;
    out.emplace_back(std::move(p));
  }
  return out;
}

inline bool MeasureSet::annihilates(std::span<const double> h, double tolerance) const {
  double scale = 1.0;
  for (double x : h) scale = std::max(scale, std::abs(x));
  for (const auto& b : span_basis_) {
    double s = 0.0;
    for (std::size_t w = 0; w < h.size(); ++w) s += b[w] * h[w];
    if (std::abs(s) > tolerance * scale) return false;
  }
  return true;
}

inline Optimum MeasureSet::max_linear(std::span<const double> c) const {
  check_length(space_, c, "objective");
  Optimum best;
  if (is_hull()) {
    for (std::size_t i = 0; i < generators_.size(); ++i) {
      double v = 0.0;
      for (std::size_t w = 0; w < c.size(); ++w) v += c[w] * generators_[i][w];
      if (!best.generator || v > best.value) {
        best.value = v;
        best.generator = i;
      }
    }
    best.measure = generators_[*best.generator].probabilities();
    return best;
  }
  LinearProgram lp;
  for (std::size_t w = 0; w < c.size(); ++w) lp.add_variable(c[w]);
  for (std::size_t r = 0; r < rows_.size(); ++r) lp.add_constraint(rows_[r], Sense::Equal, rhs_[r]);
  const auto res = lp.solve(Goal::Maximize);
  if (res.status == LpStatus::Unbounded) fail(ErrorKind::UnboundedObjective, "linear objective over the polytope");
  if (!res.optimal()) fail(ErrorKind::EmptyMartingalePolytope, "closure became infeasible");
  best.value = res.objective;
  best.measure = res.x;
  return best;
}

inline Optimum MeasureSet::min_linear(std::span<const double> c) const {
  Vector neg(c.begin(), c.end());
  for (auto& v : neg) v = -v;
  auto opt = max_linear(neg);
  opt.value = -opt.value;
  return opt;
}

inline Optimum MeasureSet::max_conditional(std::span<const double> x, std::size_t t, std::size_t cell_id) const {
  check_length(space_, x, "random value");
  const Cell& cell = space_.cell(t, cell_id);
  Optimum best;
  if (is_hull()) {
    for (std::size_t i = 0; i < generators_.size(); ++i) {
      const auto& p = generators_[i].probabilities();
      const double v = cell_weighted_sum(p, x, cell) / cell_mass(p, cell);
      if (!best.generator || v > best.value) {
        best.value = v;
        best.generator = i;
      }
    }
    best.measure = generators_[*best.generator].probabilities();
    return best;
  }
  // Charnes-Cooper: y = q / q(cell), scale s = 1 / q(cell).
  const std::size_t n = space_.outcome_count();
  LinearProgram lp;
  for (std::size_t w = 0; w < n; ++w) lp.add_variable(0.0);
  for (std::size_t w : cell) lp.set_cost(w, x[w]);
  const std::size_t s = lp.add_variable(0.0);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    Vector row = rows_[r];
    row.push_back(-rhs_[r]);
    lp.add_constraint(std::move(row), Sense::Equal, 0.0);
  }
  std::vector<std::pair<std::size_t, double>> norm;
  for (std::size_t w : cell) norm.emplace_back(w, 1.0);
  lp.add_constraint(norm, Sense::Equal, 1.0);
  const auto res = lp.solve(Goal::Maximize);
  if (res.status == LpStatus::Unbounded) fail(ErrorKind::UnboundedObjective, "conditional expectation over the polytope");
  if (!res.optimal()) fail(ErrorKind::EmptyMartingalePolytope, "conditional problem infeasible");
  best.value = res.objective;
  best.measure.assign(n, 0.0);
  for (std::size_t w = 0; w < n; ++w) best.measure[w] = res.x[w] / res.x[s];
  return best;
}

inline Optimum MeasureSet::min_conditional(std::span<const double> x, std::size_t t, std::size_t cell) const {
  Vector neg(x.begin(), x.end());
  for (auto& v : neg) v = -v;
  auto opt = max_conditional(neg, t, cell);
  opt.value = -opt.value;
  return opt;
}

inline std::vector<Vector> MeasureSet::vertices() const {
  if (is_hull()) {
    std::vector<Vector> out;
    for (const auto& g : generators_) out.push_back(g.probabilities());
    return out;
  }
  const std::size_t n = space_.outcome_count();
  // independent subset of the constraint rows
  std::vector<std::size_t> keep;
  Eigen::MatrixXd acc(0, static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    Eigen::MatrixXd next(acc.rows() + 1, acc.cols());
    next << acc, Eigen::Map<const Eigen::RowVectorXd>(rows_[r].data(), static_cast<Eigen::Index>(n));
    Eigen::FullPivLU<Eigen::MatrixXd> lu(next);
    lu.setThreshold(1e-10);
    if (lu.rank() == next.rows()) {
      acc = next;
      keep.push_back(r);
    }
  }
  const std::size_t k = keep.size();
  Eigen::VectorXd b(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) b(static_cast<Eigen::Index>(i)) = rhs_[keep[i]];

  std::vector<Vector> out;
  std::vector<std::size_t> pick(k);
  std::iota(pick.begin(), pick.end(), 0);
  for (;;) {
    Eigen::MatrixXd basis(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t c = 0; c < k; ++c) basis.col(static_cast<Eigen::Index>(c)) = acc.col(static_cast<Eigen::Index>(pick[c]));
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
    lu.setThreshold(1e-10);
    if (lu.isInvertible()) {
      Eigen::VectorXd sol = lu.solve(b);
      if (sol.minCoeff() >= -1e-12) {
        Vector q(n, 0.0);
        for (std::size_t c = 0; c < k; ++c) q[pick[c]] = std::max(0.0, sol(static_cast<Eigen::Index>(c)));
        bool seen = false;
        for (const auto& v : out) {
          double d = 0.0;
          for (std::size_t w = 0; w < n; ++w) d = std::max(d, std::abs(v[w] - q[w]));
          if (d < 1e-10) {
            seen = true;
            break;
          }
        }
        if (!seen) out.push_back(std::move(q));
      }
    }
    // next combination
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

inline bool MeasureSet::restriction_contains(std::span<const double> atom_masses, std::size_t n) const {
  const auto& part = space_.partition(n);
  if (atom_masses.size() != part.size()) fail(ErrorKind::ShapeMismatch, "atom mass vector length");
  if (is_hull()) {
    // convex-combination feasibility: sum_i a_i P_i(A) = masses(A)
    LinearProgram lp;
    for (std::size_t i = 0; i < generators_.size(); ++i) lp.add_variable();
    for (std::size_t c = 0; c < part.size(); ++c) {
      Vector row(generators_.size());
      for (std::size_t i = 0; i < generators_.size(); ++i) row[i] = cell_mass(generators_[i].probabilities(), part[c]);
      lp.add_constraint(std::move(row), Sense::Equal, atom_masses[c]);
    }
    lp.add_constraint(Vector(generators_.size(), 1.0), Sense::Equal, 1.0);
    return lp.solve(Goal::Minimize).optimal();
  }
  // The martingale constraints of steps 1..n only involve masses of F_n cells,
  // and every feasible F_n marginal extends to a full closure member.
  for (double v : atom_masses)
    if (v < -tol::eq) return false;
  if (std::abs(std::accumulate(atom_masses.begin(), atom_masses.end(), 0.0) - 1.0) > tol::eq) return false;
  for (std::size_t m = 1; m <= n; ++m) {
    for (std::size_t c = 0; c < space_.cell_count(m - 1); ++c) {
      for (const auto& asset : assets_) {
        double s = 0.0, scale = 0.0;
        for (std::size_t a = 0; a < part.size(); ++a) {
          const std::size_t w = part[a].front();
          if (space_.atom_of(m - 1, w) != c) continue;
          const double inc = asset(m, w) - asset(m - 1, w);
          s += atom_masses[a] * inc;
          scale = std::max(scale, std::abs(inc));
        }
        if (std::abs(s) > tol::eq * std::max(1.0, scale)) return false;
      }
    }
  }
  return true;
}

/// ess sup over the set of E^P{X | F_t}: the per-cell maximum, with the
/// attaining generator or closure measure per cell.
struct ConditionalSup {
  Vector row;
  std::vector<Optimum> per_cell;
};

inline ConditionalSup ess_sup_conditional(const MeasureSet& set, std::span<const double> x, std::size_t t) {
  const auto& space = set.space();
  ConditionalSup out;
  out.row.assign(space.outcome_count(), 0.0);
  for (std::size_t c = 0; c < space.cell_count(t); ++c) {
    auto opt = set.max_conditional(x, t, c);
    for (std::size_t w : space.cell(t, c)) out.row[w] = opt.value;
    out.per_cell.push_back(std::move(opt));
  }
  return out;
}

/// sup over the set of E^P X.
inline double sup_expectation(const MeasureSet& set, std::span<const double> x) { return set.max_linear(x).value; }

/// True iff xi >= 0 and E^P xi = 1 for every member of the set.
inline bool is_unit_claim(const MeasureSet& set, std::span<const double> xi) {
  check_length(set.space(), xi, "claim");
  for (double v : xi)
    if (v < 0.0 || !std::isfinite(v)) return false;
  if (set.is_hull()) {
    for (const auto& g : set.generators()) {
      double e = 0.0;
      for (std::size_t w = 0; w < xi.size(); ++w) e += g[w] * xi[w];
      if (std::abs(e - 1.0) > tol::eq) return false;
    }
    return true;
  }
  return std::abs(set.max_linear(xi).value - 1.0) <= tol::eq && std::abs(set.min_linear(xi).value - 1.0) <= tol::eq;
}

/// E^P{X | F_t} for a random value whose conditional expectation does not
/// depend on the member measure P. Throws MeasureDependent otherwise.
inline Vector common_conditional(const MeasureSet& set, std::span<const double> x, std::size_t t) {
  const auto& space = set.space();
  Vector row = conditional_expectation(space, set.reference(), x, t);
  Vector h(space.outcome_count(), 0.0);
  for (std::size_t c = 0; c < space.cell_count(t); ++c) {
    const Cell& cell = space.cell(t, c);
    std::fill(h.begin(), h.end(), 0.0);
    for (std::size_t w : cell) h[w] = x[w] - row[w];
    if (!set.annihilates(h))
      fail(ErrorKind::MeasureDependent,
           "conditional expectation at time " + std::to_string(t) + " on cell " + std::to_string(c) +
               " differs across member measures");
  }
  return row;
}

/// d^n = m_n - m_{n-1} with m_n = E^P{xi0 | F_n}; entry n-1 holds d^n as a row
/// over outcomes, n = 1..N. Increments within tolerance of zero are snapped to 0.
inline std::vector<Vector> increment_process(const MeasureSet& set, std::span<const double> xi0) {
  if (!is_unit_claim(set, xi0)) fail(ErrorKind::NotUnitClaim, "xi0 is not a unit claim of the measure set");
  const auto& space = set.space();
  std::vector<Vector> m;
  for (std::size_t n = 0; n <= space.horizon(); ++n) m.push_back(common_conditional(set, xi0, n));
  std::vector<Vector> d;
  for (std::size_t n = 1; n <= space.horizon(); ++n) {
    Vector row(space.outcome_count());
    for (std::size_t w = 0; w < row.size(); ++w) {
      row[w] = m[n][w] - m[n - 1][w];
      if (std::abs(row[w]) <= tol::eq) row[w] = 0.0;
    }
    d.push_back(std::move(row));
  }
  return d;
}

/// Two-point measure on the cells of partitions[n] built from an increment
/// pair d_i <= 0 < d_j.
struct CompletionMeasure {
  std::size_t time = 0;
  std::size_t negative_atom = 0;  // i
  std::size_t positive_atom = 0;  // j
  Vector atom_masses;             // indexed by cell of partitions[time]
};

inline std::vector<CompletionMeasure> completion_measures(const MeasureSet& set, std::span<const double> xi0,
                                                          std::size_t n) {
  const auto& space = set.space();
  if (n == 0 || n > space.horizon()) fail(ErrorKind::IndexOutOfRange, "completion time must lie in 1..N");
  const auto d = increment_process(set, xi0)[n - 1];
  const auto& part = space.partition(n);
  std::vector<std::size_t> neg, pos;
  for (std::size_t c = 0; c < part.size(); ++c) (d[part[c].front()] > 0.0 ? pos : neg).push_back(c);
  std::vector<CompletionMeasure> out;
  for (std::size_t i : neg) {
    for (std::size_t j : pos) {
      const double di = d[part[i].front()];
      const double dj = d[part[j].front()];
      CompletionMeasure cm;
      cm.time = n;
      cm.negative_atom = i;
      cm.positive_atom = j;
      cm.atom_masses.assign(part.size(), 0.0);
      cm.atom_masses[i] = dj / (-di + dj);
      cm.atom_masses[j] = -di / (-di + dj);
      out.push_back(std::move(cm));
    }
  }
  return out;
}

struct CompletenessFailure {
  std::size_t time;
  std::size_t negative_atom;
  std::size_t positive_atom;
};

struct CompletenessReport {
  bool complete = true;
  std::vector<CompletenessFailure> failures;
  explicit operator bool() const { return complete; }
};

inline CompletenessReport is_complete(const MeasureSet& set, std::span<const double> xi0) {
  CompletenessReport report;
  for (std::size_t n = 1; n <= set.space().horizon(); ++n) {
    for (const auto& cm : completion_measures(set, xi0, n)) {
      if (!set.restriction_contains(cm.atom_masses, n)) {
        report.complete = false;
        report.failures.push_back({n, cm.negative_atom, cm.positive_atom});
      }
    }
  }
  return report;
}

}  // namespace supmart
