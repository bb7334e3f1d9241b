#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace supmart;
namespace ts = testing_support;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Io;
}

MeasureSet binomial() {
  auto space = FilteredSpace::build(2, {{{0, 1}}, {{0}, {1}}});
  return MeasureSet::martingale_polytope(space, {AdaptedProcess(space, {{100, 100}, {120, 80}})});
}

}  // namespace

TEST(Hedging, BinomialCallReplicates) {
  auto set = binomial();
  auto r = superhedge(set, Vector{20, 0}, PriceMode::full());
  EXPECT_NEAR(r.price.price, 10, 1e-9);
  EXPECT_NEAR(r.strategy.risky(1, 0, 0), 0.5, 1e-12);
  EXPECT_NEAR(r.strategy.cash(1, 0, 0), -40, 1e-9);
  auto x = strategy_capital(r.strategy);
  EXPECT_EQ(x(0, 0), r.price.price);
  EXPECT_NEAR(x(1, 0), 20, 1e-9);
  EXPECT_NEAR(x(1, 1), 0, 1e-9);
  for (double g : r.decomposition.compensator.terminal()) EXPECT_NEAR(g, 0, 1e-9);
  EXPECT_TRUE(verify_self_financing(r.strategy).holds);
}

TEST(Hedging, ConstantClaimHoldsNoRisk) {
  auto set = binomial();
  auto r = superhedge(set, Vector{5, 5}, PriceMode::full());
  for (std::size_t t = 0; t <= 1; ++t)
    for (std::size_t w = 0; w < 2; ++w) EXPECT_NEAR(r.strategy.risky(t, w, 0), 0, 1e-12);
  EXPECT_NEAR(r.price.price, 5, 1e-12);
}

TEST(Hedging, RepresentationOfMartingale) {
  auto set = binomial();
  auto space = set.space();
  auto h = martingale_representation(set, AdaptedProcess(space, {{3, 3}, {5, 1}}));
  EXPECT_NEAR(h(1, 0, 0), 0.1, 1e-12);
  EXPECT_EQ(kind_of([&] { martingale_representation(set, AdaptedProcess(space, {{4, 4}, {5, 1}})); }),
            ErrorKind::NotMartingale);
  auto hull = MeasureSet::hull(space, {Measure({0.5, 0.5})});
  EXPECT_EQ(kind_of([&] { martingale_representation(hull, AdaptedProcess(space, {{3, 3}, {5, 1}})); }),
            ErrorKind::InvalidArgument);
}

TEST(Hedging, SelfFinancingDetectsInjection) {
  auto set = binomial();
  auto r = superhedge(set, Vector{20, 0}, PriceMode::full());
  auto rows = r.strategy.cash.rows();
  for (auto& v : rows[1]) v[0] += 1;
  TradingStrategy bad{r.strategy.assets, PredictableProcess(set.space(), 1, rows), r.strategy.risky};
  auto rep = verify_self_financing(bad);
  EXPECT_FALSE(rep.holds);
  ASSERT_EQ(rep.violations.size(), 1u);
  EXPECT_EQ(rep.violations[0].time, 1u);
  EXPECT_NEAR(rep.max_residual, 1, 1e-12);
}

TEST(HedgingProperty, RandomTreesAreDominated) {
  ts::Rng rng(51);
  for (int it = 0; it < 100; ++it) {
    auto mk = ts::random_tree(rng, ts::pick(rng, 1, 3), ts::pick(rng, 2, 3));
    auto space = ts::space_of(mk.parts);
    auto set = MeasureSet::martingale_polytope(space, {AdaptedProcess(space, mk.asset)});
    const Vector f = ts::random_measurable(rng, mk.parts.back(), 0, 20);
    const auto mode = it % 2 == 0 ? PriceMode::full() : PriceMode::generated(asset_ratio_claims(set.assets().front()));
    auto r = superhedge(set, f, mode);
    auto x = strategy_capital(r.strategy);
    EXPECT_EQ(x(0, 0), r.price.price);
    EXPECT_LE(verify_self_financing(r.strategy).max_residual, 1e-9);
    for (std::size_t w = 0; w < f.size(); ++w) EXPECT_GE(x(space.horizon(), w) - f[w], -1e-9);
  }
}
