#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "unate/unate.hpp"

using namespace unate;

namespace {

TruthTable table_of(const char* spec) { return to_truth_table(build_function(spec)); }

/// Smallest k >= 1 with 2^-k <= m <= 2^-(k-1), found by scanning.
std::optional<std::size_t> scan_bucket(double m) {
  for (int k = 1; k < 1100; ++k)
    if (std::ldexp(1.0, -k) <= m && m <= std::ldexp(1.0, -(k - 1))) return k;
  return std::nullopt;
}

} // namespace

TEST(ScoreLevels, ClampedFloorOfLog) {
  EXPECT_EQ(score_levels(4), 1u);
  EXPECT_EQ(score_levels(64), 1u);
  EXPECT_EQ(score_levels(256), 1u);
  EXPECT_EQ(score_levels(4096), 2u);
  EXPECT_EQ(score_levels(65536), 4u);
}

TEST(Subsets, EnumeratesBinomialCount) {
  std::size_t count = 0;
  for_each_subset(IndexSet::range(7), 3, [&](const IndexSet& s) {
    EXPECT_EQ(s.size(), 3u);
    ++count;
  });
  EXPECT_EQ(count, 35u);
  EXPECT_DOUBLE_EQ(binomial(7, 3), 35.0);
  EXPECT_EQ(level_of_size(3), 2u);
  EXPECT_FALSE(level_of_size(4));
}

TEST(Influence, ConstantIsZero) {
  Rng rng(1, 0);
  const auto e = estimate_influence(build_function("constant:n=16"), 1000, rng);
  EXPECT_DOUBLE_EQ(e.value, 0.0);
}

TEST(Influence, ParityIsHalfTheArity) {
  Rng rng(2, 0);
  const auto e = estimate_influence(build_function("parity:n=64"), 1000, rng);
  EXPECT_DOUBLE_EQ(e.value, 32.0);
  EXPECT_DOUBLE_EQ(e.radius, 0.0);
}

TEST(Influence, DictatorMatchesExact) {
  Rng rng(3, 0);
  const auto e = estimate_influence(build_function("dictator:n=16"), 100000, rng);
  const double exact = edge_stats(table_of("dictator:n=16")).total_influence().value();
  EXPECT_DOUBLE_EQ(exact, 0.5);
  EXPECT_NEAR(e.value, exact, 2 * e.radius);
}

TEST(GoodPair, DictatorIsGoodForPlusOnly) {
  const auto f = build_function("dictator:n=8,i=1");
  const auto p = AeParams::for_arity(8);
  const IndexSet s{1, 2, 3};
  EXPECT_TRUE(is_good_pair(f, Point(8), s, 0, Sign::plus, p));
  EXPECT_FALSE(is_good_pair(f, Point(8), s, 0, Sign::minus, p));
  EXPECT_FALSE(is_good_pair(f, Point(8), s, 4, Sign::plus, p));
  EXPECT_THROW(is_good_pair(f, Point(8), IndexSet{0, 1, 2}, 0, Sign::plus, p), ContractViolation);
  EXPECT_THROW(is_good_pair(f, Point(8), IndexSet{1, 2}, 0, Sign::plus, p), ContractViolation);
}

TEST(GoodPair, ParityIsOrientedButNeverFound) {
  // Every half-set of an even set flips an even number of bits.
  const auto f = build_function("parity:n=8");
  const auto r = evaluate_good_pair(f, Point(8), IndexSet{1, 2, 3}, 0, Sign::plus,
                                    AeParams::for_arity(8));
  EXPECT_TRUE(r.oriented);
  EXPECT_FALSE(r.good);
  EXPECT_DOUBLE_EQ(r.probability.value, 0.0);
}

TEST(Strong, LevelOneMatchesOrientation) {
  Rng rng(4, 0);
  const auto p = AeParams::for_arity(6);
  for (int k = 0; k < 30; ++k) {
    const TruthTable t = TruthTable::random(rng, 6);
    const auto f = table_oracle(t);
    const Point x = random_point(rng, 6);
    const auto i = static_cast<std::size_t>(rng.below(6));
    const bool differs = t.get(x.index()) != t.get(x.flipped(i).index());
    const bool mono = differs && t.get(x.index()) == x[i];
    EXPECT_EQ(is_strong(f, x, i, 1, Sign::plus, EvalMode{}, p), mono);
    EXPECT_EQ(is_strong(f, x, i, 1, Sign::minus, EvalMode{}, p), differs && !mono);
  }
}

TEST(Strong, SampledAgreesWithExact) {
  Rng rng(5, 0);
  const auto p = AeParams::for_arity(8);
  int checked = 0;
  for (int k = 0; k < 40 && checked < 10; ++k) {
    const auto f = table_oracle(TruthTable::random(rng, 8));
    const Point x = random_point(rng, 8);
    const auto i = static_cast<std::size_t>(rng.below(8));
    const Sign sign = f(x) == x[i] ? Sign::plus : Sign::minus;
    const auto exact = evaluate_strong(f, x, i, 2, sign, EvalMode{}, p);
    if (exact.sets == 0) continue;
    ++checked;
    EXPECT_EQ(exact.sets, 35u);
    const auto sampled = evaluate_strong(f, x, i, 2, sign, EvalMode::sampled(4096, 9), p);
    EXPECT_FALSE(sampled.exact);
    EXPECT_NEAR(sampled.good_fraction, exact.good_fraction, 2 * sampled.radius + 1e-9);
  }
  EXPECT_GT(checked, 0);
}

TEST(Strong, ExactModeRespectsCap) {
  const auto f = build_function("dictator:n=40");
  EXPECT_THROW(evaluate_strong(f, Point(40), 0, 3, Sign::plus, EvalMode{}, AeParams::for_arity(40)),
               ContractViolation);
}

TEST(ScoreTable, Dictator) {
  const auto st = score_table(table_of("dictator:n=4,i=1"), AeParams::for_arity(4));
  ASSERT_EQ(st.lambda, 1u);
  EXPECT_DOUBLE_EQ(st.score_plus[0][0], 1.0);
  EXPECT_DOUBLE_EQ(st.score_minus[0][0], 0.0);
  EXPECT_DOUBLE_EQ(st.weighted_plus[0], 1.0);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_DOUBLE_EQ(st.weighted_plus[i], 0.0);
  EXPECT_DOUBLE_EQ(score_sum_min(st), 0.0);
}

TEST(ScoreTable, ConstantIsZero) {
  const auto st = score_table(table_of("constant:n=5"), AeParams::for_arity(5));
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(st.weighted_plus[i], 0.0);
    EXPECT_DOUBLE_EQ(st.weighted_minus[i], 0.0);
  }
}

TEST(ScoreTable, ParityIsHalfEverywhere) {
  const auto st = score_table(table_of("parity:n=4"), AeParams::for_arity(4));
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(st.score_plus[i][0], 0.5);
    EXPECT_DOUBLE_EQ(st.score_minus[i][0], 0.5);
  }
  EXPECT_DOUBLE_EQ(score_sum_min(st), 2.0);
}

TEST(ScoreTable, LevelOneEqualsEdgeFractions) {
  Rng rng(6, 0);
  for (int k = 0; k < 5; ++k) {
    const TruthTable t = TruthTable::random(rng, 6);
    const auto st = score_table(t, AeParams::for_arity(6));
    const auto f = [&t](std::uint64_t x) { return t.get(x); };
    for (unsigned i = 0; i < 6; ++i) {
      EXPECT_DOUBLE_EQ(st.score_plus[i][0], oracle::edge_points(f, 6, i, true) / 64.0);
      EXPECT_DOUBLE_EQ(st.score_minus[i][0], oracle::edge_points(f, 6, i, false) / 64.0);
    }
  }
}

TEST(ScoreTable, UnateTablesScoreZero) {
  Rng rng(7, 0);
  for (int k = 0; k < 10; ++k) {
    const TruthTable t = random_monotone_table(rng, 6).shifted(rng.below(64));
    EXPECT_DOUBLE_EQ(score_sum_min(score_table(t, AeParams::for_arity(6))), 0.0);
  }
}

TEST(ScoreTable, LevelOverrideAndSampledMode) {
  ScoreOptions opt;
  opt.levels = 2;
  const auto st = score_table(table_of("dictator:n=8,i=3"), AeParams::for_arity(8), opt);
  EXPECT_EQ(st.lambda, 2u);
  EXPECT_DOUBLE_EQ(st.score_plus[2][1], 1.0);
  EXPECT_DOUBLE_EQ(st.weighted_plus[2], 4.0 / std::sqrt(8.0));

  ScoreOptions sampled;
  sampled.mode = EvalMode::sampled(16, 3);
  sampled.point_budget = 400;
  const auto ps = score_table(table_of("parity:n=4"), AeParams::for_arity(4), sampled);
  EXPECT_FALSE(ps.exact);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(ps.score_plus[i][0], 0.5, 0.1);
  EXPECT_THROW(score_table(TruthTable(13), AeParams::for_arity(13)), ContractViolation);
}

TEST(Buckets, BucketOfMatchesScan) {
  EXPECT_EQ(bucket_of(0.5), 1u);
  EXPECT_EQ(bucket_of(1.0), 1u);
  EXPECT_EQ(bucket_of(0.25), 2u);
  EXPECT_EQ(bucket_of(0.3), 2u);
  EXPECT_FALSE(bucket_of(0.0));
  EXPECT_FALSE(bucket_of(1.5));
  Rng rng(8, 0);
  for (int k = 0; k < 2000; ++k) {
    const double m = std::ldexp(rng.uniform(), -static_cast<int>(rng.below(40)));
    if (m <= 0) continue;
    EXPECT_EQ(bucket_of(m), scan_bucket(m)) << m;
  }
  for (int e = 0; e < 60; ++e) EXPECT_EQ(bucket_of(std::ldexp(1.0, -e)), scan_bucket(std::ldexp(1.0, -e)));
}

TEST(Buckets, EpsTildeFormula) {
  EXPECT_DOUBLE_EQ(eps_tilde_sq(16, 0.5, 1.0), 0.25 / (1048576.0 * 5.0));
  EXPECT_DOUBLE_EQ(eps_tilde_sq(16, 0.5, 2.0), 2 * eps_tilde_sq(16, 0.5, 1.0));
}

TEST(Buckets, UnateTableHasNoDominatingTriple) {
  const auto st = score_table(table_of("dictator:n=4"), AeParams::for_arity(4));
  const auto rep = bucket_report(st, 0.25);
  EXPECT_FALSE(rep.dominating);
  EXPECT_EQ(rep.unbucketed.size(), 4u);
}

TEST(Buckets, ParityDominatingTriple) {
  const auto st = score_table(table_of("parity:n=4"), AeParams::for_arity(4));
  const auto rep = bucket_report(st, 0.5);
  EXPECT_EQ(rep.bucket_count, 6u);
  ASSERT_TRUE(rep.dominating);
  EXPECT_EQ(rep.dominating->t, 1u);
  EXPECT_EQ(rep.dominating->r, 1u);
  EXPECT_EQ(rep.dominating->h, 1u);
  EXPECT_DOUBLE_EQ(rep.dominating->H, 2.0);
  EXPECT_EQ(rep.dominating->directions.size(), 4u);
  EXPECT_DOUBLE_EQ(rep.dominating->contribution, 2.0);
  EXPECT_THROW(bucket_report(st, 0.0), ContractViolation);
}

TEST(Buckets, InvariantHoldsOnRandomTables) {
  Rng rng(9, 0);
  for (int k = 0; k < 10; ++k) {
    const TruthTable t = TruthTable::random(rng, 6);
    const auto st = score_table(t, AeParams::for_arity(6));
    const auto rep = bucket_report(st, 0.1);
    for (const auto& e : rep.entries) {
      if (!e.bucket) continue;
      const double m = std::min(st.weighted_plus[e.direction], st.weighted_minus[e.direction]);
      EXPECT_LE(std::ldexp(1.0, -static_cast<int>(*e.bucket)), m);
      EXPECT_LE(m, std::ldexp(1.0, -static_cast<int>(*e.bucket) + 1));
    }
  }
}

TEST(Informative, ConstantIsNeverInformative) {
  InformativeParams prm;
  InformativeBudgets b;
  b.ae = AeParams::for_arity(4);
  const auto r = is_informative(build_function("constant:n=4"), IndexSet{1}, 0, prm, b);
  EXPECT_FALSE(r.informative);
  EXPECT_DOUBLE_EQ(r.good_frac_plus.value, 0.0);
}

TEST(Informative, DictatorRevealsNothing) {
  InformativeParams prm;
  InformativeBudgets b;
  b.ae = AeParams::for_arity(4);
  const auto r = is_informative(build_function("dictator:n=4,i=1"), IndexSet{1}, 0, prm, b);
  EXPECT_DOUBLE_EQ(r.good_frac_plus.value, 1.0);
  EXPECT_DOUBLE_EQ(r.revealing_fraction.value, 0.0);
  EXPECT_FALSE(r.informative);
}

TEST(Informative, ParityIsInformative) {
  InformativeParams prm;
  InformativeBudgets b;
  b.ae = AeParams::for_arity(4);
  const auto f = build_function("parity:n=4");
  const auto r = is_informative(f, IndexSet{2}, 0, prm, b);
  EXPECT_DOUBLE_EQ(r.threshold_plus, 0.05);
  EXPECT_DOUBLE_EQ(r.good_frac_plus.value, 0.5);
  EXPECT_DOUBLE_EQ(r.revealing_fraction.value, 1.0);
  EXPECT_TRUE(r.informative);
  ASSERT_EQ(r.revealing.size(), 1u);
  EXPECT_EQ(r.revealing[0], (IndexSet{0, 2}));
  EXPECT_DOUBLE_EQ(informative_fraction(f, 0, prm, b).value, 1.0);
  prm.form = ThresholdForm::bucket;
  prm.H = 4;
  EXPECT_DOUBLE_EQ(prm.threshold_plus(4), 0.1 * 2 / 8);
}

TEST(Persistency, ZeroTauAndConstant) {
  Rng rng(10, 0);
  EXPECT_TRUE(is_persistent(build_function("parity:n=8"), Point(8), 0, 0.0, 1, rng).persistent);
  const auto c = is_persistent(build_function("constant:n=8"), Point(8), 3, 0.0, 100, rng);
  EXPECT_TRUE(c.persistent);
  EXPECT_DOUBLE_EQ(c.p_hat, 0.0);
}

TEST(Persistency, ParityOddTauAlwaysChanges) {
  Rng rng(11, 0);
  const auto r = is_persistent(build_function("parity:n=8"), Point(8), 3, 0.5, 200, rng);
  EXPECT_FALSE(r.persistent);
  EXPECT_DOUBLE_EQ(r.p_hat, 1.0);
  const auto np = nonpersistent_fraction(build_function("parity:n=8"), 1, 0.5, 50, 20, rng);
  EXPECT_DOUBLE_EQ(np.fraction.value, 1.0);
  EXPECT_DOUBLE_EQ(np.walk.value, 1.0);
  EXPECT_DOUBLE_EQ(nonpersistent_fraction(build_function("constant:n=8"), 2, 0.1, 50, 20, rng)
                       .fraction.value,
                   0.0);
  EXPECT_DOUBLE_EQ(nonpersistent_fraction(build_function("parity:n=8"), 0, 0.1, 50, 20, rng)
                       .fraction.value,
                   0.0);
}

TEST(Persistency, DictatorWalkMatchesClosedForm) {
  // Flipping tau of n coordinates hits the dictator coordinate w.p. tau / n.
  Rng rng(12, 0);
  const auto e = flip_disagreement(build_function("dictator:n=10"), 3, 100000, rng);
  EXPECT_NEAR(e.value, 0.3, 4 * e.std_error);
}

TEST(Persistency, MajorityWalkBoundedByUniformEdges) {
  // tau * Pr[uniform edge bi-chromatic] = tau * 2 I_f / n with I_f = edges / 2^n.
  Rng rng(13, 0);
  const auto f = build_function("majority:n=33");
  const auto inf = estimate_influence(f, 100000, rng);
  const auto walk = flip_disagreement(f, 4, 100000, rng);
  const double bound = 4 * 2 * inf.value / 33;
  const double sigma = std::hypot(walk.std_error, 4 * 2 * inf.std_error / 33);
  EXPECT_LE(walk.value, bound + 3 * sigma);
}

TEST(Robust, LevelOneReducesToNeighbourChecks) {
  Rng rng(14, 0);
  int checked = 0;
  for (int k = 0; k < 200; ++k) {
    const auto f = table_oracle(TruthTable::random(rng, 4));
    const Point x = random_point(rng, 4);
    const auto i = static_cast<std::size_t>(rng.below(4));
    if (f(x) == f(x.flipped(i)) || f(x) == x[i]) continue;
    const std::size_t j = (i + 1 + rng.below(3)) % 4;
    ++checked;
    const auto r = is_robust_set(f, x, i, IndexSet{j}, 1, 0, rng);
    EXPECT_TRUE(r.exact);
    EXPECT_EQ(r.robust, f(x.flipped(j)) == f(x));
  }
  EXPECT_GT(checked, 20);
}

TEST(Robust, OrientationMismatchThrows) {
  Rng rng(15, 0);
  EXPECT_THROW(is_robust_set(build_function("constant:n=4"), Point(4), 0, IndexSet{1}, 1, 0, rng),
               ContractViolation);
  EXPECT_THROW(is_robust_set(build_function("dictator:n=4,i=1"), Point(4), 0, IndexSet{1}, 1, 0, rng),
               ContractViolation);
}

TEST(Robust, AntiDictatorEveryLevelTwoSetIsRobust) {
  Rng rng(16, 0);
  const auto f = build_function("anti_dictator:n=8,i=1");
  for_each_subset(IndexSet::range(8).without(0), 3, [&](const IndexSet& s) {
    const auto r = is_robust_set(f, Point(8), 0, s, 2, 0, rng);
    EXPECT_TRUE(r.robust);
    EXPECT_DOUBLE_EQ(r.threshold, 1.0 - 1.0 / 9.0);
  });
}

TEST(Solid, AntiDictator) {
  Rng rng(17, 0);
  const auto f = build_function("anti_dictator:n=8,i=1");
  const LabeledEdge e = LabeledEdge::checked(f, Point(8), 0);
  ASSERT_EQ(e.kind, EdgeKind::anti_monotone);
  // tau = 2 hits the dictator coordinate w.p. 2/8.
  const auto loose = is_solid_edge(f, e, 2, 0.3, 20000, rng);
  EXPECT_TRUE(loose.solid);
  EXPECT_NEAR(loose.lower.p_hat, 0.25, 0.02);
  EXPECT_NEAR(loose.upper.p_hat, 0.125, 0.02);
  EXPECT_FALSE(is_solid_edge(f, e, 2, 0.1, 20000, rng).solid);
  EXPECT_TRUE(is_solid_edge(f, e, 1, 0.2, 20000, rng).solid);
}

TEST(Solid, ParityIsNotSolid) {
  Rng rng(18, 0);
  const auto f = build_function("parity:n=8");
  const LabeledEdge e = LabeledEdge::checked(f, Point::from_bits("01000000"), 0);
  ASSERT_EQ(e.kind, EdgeKind::anti_monotone);
  const auto r = is_solid_edge(f, e, 2, 0.1, 200, rng);
  EXPECT_TRUE(r.lower.persistent);
  EXPECT_FALSE(r.upper.persistent);
  EXPECT_FALSE(r.solid);
  const LabeledEdge m = LabeledEdge::checked(f, Point(8), 0);
  EXPECT_THROW(is_solid_edge(f, m, 2, 0.1, 10, rng), ContractViolation);
}
