#pragma once

// Martingale representation with respect to traded assets and the
// self-financed superhedging strategy built from a fair-price witness.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "supmart/error.hpp"
#include "supmart/filtered_space.hpp"
#include "supmart/measure_set.hpp"
#include "supmart/pricing.hpp"
#include "supmart/process_calculus.hpp"

namespace supmart {

/// Portfolio of cash (one column) and risky holdings (one column per asset).
/// Slot t = 0 holds the initial position; slot t >= 1 the holdings carried
/// over (t-1, t], chosen with the information of time t-1.
struct TradingStrategy {
  std::vector<AdaptedProcess> assets;
  PredictableProcess cash;
  PredictableProcess risky;
};

/// H with M_n = M_0 + sum_{i <= n} <H_i, S_i - S_{i-1}>, solved per step and
/// cell by least squares with a residual check.
inline PredictableProcess martingale_representation(const MeasureSet& set, const AdaptedProcess& mart) {
  if (set.is_hull()) fail(ErrorKind::InvalidArgument, "representation needs a martingale polytope over traded assets");
  detail::require_same_space(set, mart);
  if (auto v = is_martingale(set, mart); !v)
    fail(ErrorKind::NotMartingale, "step " + std::to_string(v.violations.front().time) + " cell " +
                                       std::to_string(v.violations.front().cell));
  const auto& space = set.space();
  const auto& assets = set.assets();
  const std::size_t dim = assets.size();
  PredictableProcess::Rows rows(space.horizon() + 1,
                                std::vector<Vector>(space.outcome_count(), Vector(dim, 0.0)));
  for (std::size_t m = 1; m <= space.horizon(); ++m) {
    for (std::size_t c = 0; c < space.cell_count(m - 1); ++c) {
      const auto& kids = space.children(m - 1, c);
      const std::size_t anchor = space.cell(m - 1, c).front();
      Eigen::MatrixXd a(static_cast<Eigen::Index>(kids.size()), static_cast<Eigen::Index>(dim));
      Eigen::VectorXd b(static_cast<Eigen::Index>(kids.size()));
      double scale = 1.0;
      for (std::size_t k = 0; k < kids.size(); ++k) {
        const std::size_t w = space.cell(m, kids[k]).front();
        for (std::size_t j = 0; j < dim; ++j)
          a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = assets[j](m, w) - assets[j](m - 1, anchor);
        b(static_cast<Eigen::Index>(k)) = mart(m, w) - mart(m - 1, anchor);
        scale = std::max(scale, std::abs(mart(m, w)));
      }
      Eigen::VectorXd h = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
      if (dim > 0) h = a.completeOrthogonalDecomposition().solve(b);
      const double residual = kids.empty() ? 0.0 : (a * h - b).cwiseAbs().maxCoeff();
      if (residual > tol::residual * scale)
        fail(ErrorKind::NoRepresentation, "step " + std::to_string(m) + ", cell " + std::to_string(c) +
                                              ": residual " + std::to_string(residual));
      for (std::size_t w : space.cell(m - 1, c))
        for (std::size_t j = 0; j < dim; ++j) rows[m][w][j] = h(static_cast<Eigen::Index>(j));
    }
  }
  return PredictableProcess(space, dim, std::move(rows));
}

/// X_t = cash_t + <risky_t, S_t>.
inline AdaptedProcess strategy_capital(const TradingStrategy& strategy) {
  const auto& space = strategy.cash.space();
  ProcessRows rows(space.horizon() + 1, Vector(space.outcome_count(), 0.0));
  for (std::size_t t = 0; t <= space.horizon(); ++t) {
    for (std::size_t w = 0; w < space.outcome_count(); ++w) {
      double x = strategy.cash(t, w, 0);
      for (std::size_t j = 0; j < strategy.assets.size(); ++j) x += strategy.risky(t, w, j) * strategy.assets[j](t, w);
      rows[t][w] = x;
    }
  }
  return AdaptedProcess(space, std::move(rows));
}

struct FinancingViolation {
  std::size_t time;
  std::size_t cell;  // cell of partitions[time - 1]
  double residual;
};

struct SelfFinancingReport {
  bool holds = true;
  double max_residual = 0.0;
  std::vector<FinancingViolation> violations;
  explicit operator bool() const { return holds; }
};

/// Checks cash_m - cash_{m-1} + <risky_m - risky_{m-1}, S_{m-1}> = 0.
inline SelfFinancingReport verify_self_financing(const TradingStrategy& strategy) {
  const auto& space = strategy.cash.space();
  if (strategy.risky.dimension() != strategy.assets.size())
    fail(ErrorKind::ShapeMismatch, "risky holdings do not match the asset count");
  SelfFinancingReport report;
  for (std::size_t m = 1; m <= space.horizon(); ++m) {
    for (std::size_t c = 0; c < space.cell_count(m - 1); ++c) {
      const std::size_t w = space.cell(m - 1, c).front();
      double r = strategy.cash(m, w, 0) - strategy.cash(m - 1, w, 0);
      double scale = std::max({1.0, std::abs(strategy.cash(m, w, 0)), std::abs(strategy.cash(m - 1, w, 0))});
      for (std::size_t j = 0; j < strategy.assets.size(); ++j) {
        const double trade = (strategy.risky(m, w, j) - strategy.risky(m - 1, w, j)) * strategy.assets[j](m - 1, w);
        r += trade;
        scale = std::max(scale, std::abs(trade));
      }
      report.max_residual = std::max(report.max_residual, std::abs(r));
      if (std::abs(r) > tol::eq * scale) {
        report.holds = false;
        report.violations.push_back({m, c, r});
      }
    }
  }
  return report;
}

struct PriceMode {
  enum class Kind { Full, Generated } kind = Kind::Full;
  std::vector<Vector> unit_claims;  // generating set T for Generated

  static PriceMode full() { return {}; }
  static PriceMode generated(std::vector<Vector> claims) { return {Kind::Generated, std::move(claims)}; }
};

/// T = {S_i / S_0 : i = 0..N} for a single asset.
inline std::vector<Vector> asset_ratio_claims(const AdaptedProcess& asset) {
  std::vector<Vector> out;
  const double s0 = asset(0, 0);
  if (!(s0 > 0.0)) fail(ErrorKind::InvalidArgument, "asset must start at a positive price");
  for (std::size_t i = 0; i <= asset.horizon(); ++i) {
    Vector xi(asset.row(i));
    for (auto& v : xi) v /= s0;
    out.push_back(std::move(xi));
  }
  return out;
}

struct SuperhedgeResult {
  TradingStrategy strategy;
  Decomposition decomposition;  // of the spliced process (M_m for m < N, f_N at N)
  FairPriceResult price;
};

inline SuperhedgeResult superhedge(const MeasureSet& set, std::span<const double> claim, const PriceMode& mode) {
  if (set.is_hull()) fail(ErrorKind::InvalidArgument, "superhedging needs a martingale polytope over traded assets");
  const auto& space = set.space();
  const std::size_t n = space.horizon();
  FairPriceResult price = mode.kind == PriceMode::Kind::Full ? fair_price_full(set, claim)
                                                             : fair_price_generated(set, mode.unit_claims, claim);

  ProcessRows mart(n + 1);
  for (std::size_t t = 0; t <= n; ++t) {
    mart[t] = common_conditional(set, price.witness_claim, t);
    for (auto& v : mart[t]) v *= price.price;
  }
  // X_0 must equal the price exactly
  std::fill(mart[0].begin(), mart[0].end(), price.price);
  ProcessRows spliced = mart;
  spliced[n].assign(claim.begin(), claim.end());
  ProcessRows g(n + 1, Vector(space.outcome_count(), 0.0));
  for (std::size_t w = 0; w < space.outcome_count(); ++w) g[n][w] = mart[n][w] - claim[w];

  AdaptedProcess mart_process(space, mart);
  Decomposition dec{AdaptedProcess(space, std::move(spliced)), mart_process, AdaptedProcess(space, std::move(g)),
                    std::nullopt};
  const auto holdings = martingale_representation(set, mart_process);

  PredictableProcess::Rows cash(n + 1, std::vector<Vector>(space.outcome_count(), Vector(1, 0.0)));
  for (std::size_t w = 0; w < space.outcome_count(); ++w) cash[0][w][0] = price.price;
  for (std::size_t t = 1; t <= n; ++t) {
    for (std::size_t w = 0; w < space.outcome_count(); ++w) {
      // M_t - <H_t, S_t> = M_{t-1} - <H_t, S_{t-1}> once the representation holds
      double c = mart[t - 1][w];
      for (std::size_t j = 0; j < set.assets().size(); ++j) c -= holdings(t, w, j) * set.assets()[j](t - 1, w);
      cash[t][w][0] = c;
    }
  }
  TradingStrategy strategy{set.assets(), PredictableProcess(space, 1, std::move(cash)), holdings};
  return SuperhedgeResult{std::move(strategy), std::move(dec), std::move(price)};
}

}  // namespace supmart
