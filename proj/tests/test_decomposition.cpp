#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace supmart;
namespace ts = testing_support;

namespace {

std::vector<Partition> two_step() { return {{{0, 1, 2, 3}}, {{0, 1}, {2, 3}}, {{0}, {1}, {2}, {3}}}; }

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Io;
}

}  // namespace

TEST(Decomposition, MartingaleHasZeroCompensator) {
  auto space = FilteredSpace::build(4, two_step());
  auto set = MeasureSet::hull(space, {Measure({0.1, 0.3, 0.2, 0.4})});
  AdaptedProcess mart(space, {{5.6, 5.6, 5.6, 5.6}, {5, 5, 6, 6}, {8, 4, 3, 7.5}});
  auto dec = local_regular_witness(set, mart);
  for (const auto& row : dec.compensator.rows())
    for (double v : row) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Decomposition, SingletonHullGivesDoobCompensator) {
  ts::Rng rng(31);
  for (int it = 0; it < 200; ++it) {
    const std::size_t n = ts::pick(rng, 2, 12);
    auto parts = ts::random_filtration(rng, n, ts::pick(rng, 1, 4));
    auto space = FilteredSpace::build(n, parts);
    const Vector p = ts::random_probabilities(rng, n);
    auto set = MeasureSet::hull(space, {Measure(p)});
    const Vector terminal = ts::random_measurable(rng, parts.back(), 0, 10);
    const auto f_rows = ts::supermartingale_from(rng, parts, {p}, terminal);
    AdaptedProcess f(space, f_rows);
    auto dec = local_regular_witness(set, f);
    const auto g = ts::doob_compensator(parts, p, f_rows);
    for (std::size_t t = 0; t < g.size(); ++t)
      for (std::size_t w = 0; w < n; ++w) EXPECT_NEAR(dec.compensator(t, w), g[t][w], 1e-9 * (1 + std::abs(g[t][w])));
  }
}

TEST(Decomposition, NonRegularEnvelopeIsInfeasible) {
  // P2 = P1 reweighted on F_1 cells; the digital has unequal expectations
  auto space = FilteredSpace::build(4, two_step());
  auto set = MeasureSet::hull(space, {Measure({0.25, 0.25, 0.25, 0.25}), Measure({0.3, 0.3, 0.2, 0.2})});
  auto f = ess_sup_process(set, Vector{1, 0, 0, 0});
  EXPECT_NEAR(f(0, 0), 0.3, 1e-12);
  auto out = try_local_regular_witness(set, f);
  EXPECT_FALSE(out.feasible());
  EXPECT_EQ(out.failed_step, 1u);
  EXPECT_EQ(out.failed_cell, 0u);
  EXPECT_EQ(kind_of([&] { local_regular_witness(set, f); }), ErrorKind::Infeasible);

  auto g = ess_sup_process(set, Vector{2, 0, 3, 0});  // E1 = 1.25, E2 = 1.2
  EXPECT_FALSE(try_local_regular_witness(set, g).feasible());
  // E1 = E2 iff the two F_1 cells carry equal sums
  auto h = ess_sup_process(set, Vector{2, 0, 1, 1});
  auto ok = try_local_regular_witness(set, h);
  ASSERT_TRUE(ok.feasible());
  EXPECT_TRUE(check_decomposition(set, *ok.decomposition).valid);
}

TEST(Decomposition, RejectsNonSupermartingale) {
  auto space = FilteredSpace::build(4, two_step());
  auto set = MeasureSet::hull(space, {Measure({0.25, 0.25, 0.25, 0.25})});
  AdaptedProcess up(space, {{0, 0, 0, 0}, {1, 1, 1, 1}, {1, 1, 1, 1}});
  EXPECT_EQ(kind_of([&] { local_regular_witness(set, up); }), ErrorKind::NotSupermartingale);
}

TEST(DecompositionProperty, RandomHullWitnessesAreValid) {
  ts::Rng rng(32);
  int returned = 0;
  for (int it = 0; it < 300; ++it) {
    const std::size_t n = ts::pick(rng, 2, 12);
    auto parts = ts::random_filtration(rng, n, ts::pick(rng, 1, 4));
    auto space = FilteredSpace::build(n, parts);
    std::vector<Vector> raw{ts::random_probabilities(rng, n)};
    for (std::size_t k = ts::pick(rng, 0, 3); k > 0; --k)
      raw.push_back(ts::uniform(rng, 0, 1) < 0.5 ? ts::random_probabilities(rng, n)
                                                 : ts::reweighted(rng, raw.front(), parts[1]));
    std::vector<Measure> gens;
    for (const auto& r : raw) gens.emplace_back(r);
    auto set = MeasureSet::hull(space, gens);
    const Vector terminal = ts::random_measurable(rng, parts.back(), 0, 10);
    const auto f_rows = ts::supermartingale_from(rng, parts, raw, terminal);
    auto out = try_local_regular_witness(set, AdaptedProcess(space, f_rows));
    if (!out.feasible()) continue;
    ++returned;
    const auto& d = *out.decomposition;
    auto a = ts::audit(parts, raw, f_rows, d.martingale.rows(), d.compensator.rows());
    EXPECT_TRUE(a.ok(1e-9)) << a.reconstruction << " " << a.g0 << " " << a.min_increment << " " << a.martingale;
  }
  EXPECT_GT(returned, 100);
}

TEST(Decomposition, AlphaCoefficientOnTrinomial) {
  Partition singles{{0}, {1}, {2}};
  auto space = FilteredSpace::build(3, {{{0, 1, 2}}, singles});
  auto set = MeasureSet::martingale_polytope(space, {AdaptedProcess(space, {{100, 100, 100}, {120, 100, 80}})});
  const Vector xi0{1.2, 1.0, 0.8};  // d = (0.2, 0, -0.2)
  const Vector ratio{1.4, 0.9, 0.5};  // sup E over (a, 1 - 2a, a): max(0.9, 0.95) = 0.95
  auto r = alpha_coefficient(set, xi0, 1, ratio);
  // atoms with d <= 0 are 1 (d = 0 contributes nothing) and 2: (1 - 0.5) / 0.2 = 2.5
  EXPECT_NEAR(r.alpha, 2.5, 1e-12);
  ASSERT_TRUE(r.minimizing_atom.has_value());
  EXPECT_EQ(*r.minimizing_atom, 2u);
  EXPECT_NEAR(r.step_claim[0], 1.5, 1e-12);
  EXPECT_NEAR(r.step_claim[1], 1.0, 1e-12);
  EXPECT_NEAR(r.step_claim[2], 0.5, 1e-12);
  for (std::size_t w = 0; w < 3; ++w) EXPECT_GE(r.step_claim[w] + 1e-12, ratio[w]);
  EXPECT_EQ(kind_of([&] { alpha_coefficient(set, xi0, 1, Vector{2.0, 1.0, 1.0}); }), ErrorKind::InvalidArgument);
}

TEST(Decomposition, OptionalDecompositionOnBinomial) {
  Partition singles{{0}, {1}};
  auto space = FilteredSpace::build(2, {{{0, 1}}, singles});
  auto set = MeasureSet::martingale_polytope(space, {AdaptedProcess(space, {{100, 100}, {120, 80}})});
  AdaptedProcess f(space, {{12, 12}, {20, 0}});
  auto dec = optional_decomposition_complete(set, Vector{1.2, 0.8}, f);
  ASSERT_TRUE(dec.step_claims.has_value());
  auto chk = check_decomposition(set, dec);
  EXPECT_TRUE(chk.valid) << chk.message;
  EXPECT_EQ(kind_of([&] { optional_decomposition_complete(set, Vector{1, 1}, f); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([&] { optional_decomposition_complete(set, Vector{1.5, 0.8}, f); }), ErrorKind::NotUnitClaim);
}

TEST(DecompositionProperty, CompleteOnePeriodMarkets) {
  ts::Rng rng(33);
  for (int it = 0; it < 100; ++it) {
    auto mk = ts::random_one_period(rng, ts::pick(rng, 2, 7), ts::pick(rng, 0, 2));
    auto space = ts::space_of(mk.parts);
    auto set = MeasureSet::martingale_polytope(space, {AdaptedProcess(space, mk.asset)});
    Vector xi0(mk.s1.size());
    for (std::size_t w = 0; w < xi0.size(); ++w) xi0[w] = mk.s1[w] / mk.s0;
    ASSERT_TRUE(is_complete(set, xi0).complete);
    const auto verts = ts::one_period_vertices(mk.s0, mk.s1);
    Vector terminal(xi0.size());
    for (auto& v : terminal) v = ts::uniform(rng, 0, 10);
    const auto f_rows = ts::supermartingale_from(rng, mk.parts, verts, terminal);
    auto dec = optional_decomposition_complete(set, xi0, AdaptedProcess(space, f_rows));
    auto a = ts::audit(mk.parts, verts, f_rows, dec.martingale.rows(), dec.compensator.rows());
    EXPECT_TRUE(a.ok(1e-9)) << a.reconstruction << " " << a.g0 << " " << a.min_increment << " " << a.martingale;
  }
}
