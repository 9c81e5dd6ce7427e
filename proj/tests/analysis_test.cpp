// Copyright 2026 The coxf Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "coxf/analysis.hpp"

#include <gtest/gtest.h>

#include <set>

#include "coxf/exact.hpp"
#include "coxf/rng.hpp"

namespace coxf {
namespace {

// Hall's condition on the blocks: every set T of blocks has at least |T|
// neighbours among the chosen workers.
bool hall_condition(const CodingMatrix& code, const std::vector<Index>& workers) {
  const Index n = code.blocks();
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::set<Index> neighbours;
    for (Index w : workers)
      for (Index j = 0; j < n; ++j)
        if ((mask >> j & 1u) && code(w, j) != 0) neighbours.insert(w);
    if (static_cast<Index>(neighbours.size()) < __builtin_popcount(mask)) return false;
  }
  return true;
}

TEST(BinomialTest, SmallValuesAndSaturation) {
  EXPECT_EQ(binomial(5, 2), 10u);
  EXPECT_EQ(binomial(12, 9), 220u);
  EXPECT_EQ(binomial(4, 5), 0u);
  EXPECT_EQ(binomial(200, 100), std::numeric_limits<std::uint64_t>::max());
}

TEST(SubsetTest, LexicographicOrderAndEarlyStop) {
  std::vector<std::vector<Index>> seen;
  for_each_subset(4, 2, [&](const std::vector<Index>& s) {
    seen.push_back(s);
    return true;
  });
  const std::vector<std::vector<Index>> expected = {{0, 1}, {0, 2}, {0, 3},
                                                    {1, 2}, {1, 3}, {2, 3}};
  EXPECT_EQ(seen, expected);
  int visits = 0;
  EXPECT_FALSE(for_each_subset(6, 3, [&](const std::vector<Index>&) { return ++visits < 4; }));
  EXPECT_EQ(visits, 4);
}

TEST(MatchingTest, AgreesWithHallCondition) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const CodingMatrix code = make_p_bernoulli(6, 8, 0.3, 5, seed);
    const SupportGraph g = SupportGraph::from(code);
    Rng rng(seed);
    const auto subset = rng.sample_without_replacement(8, 6);
    ASSERT_EQ(has_perfect_matching(g, subset), hall_condition(code, subset)) << seed;
  }
}

TEST(MatchingTest, SizeOfMaximumMatching) {
  CoefficientMatrix c = CoefficientMatrix::Zero(4, 3);
  c(0, 0) = c(1, 0) = c(2, 0) = 1;  // three workers fight over block 0
  c(3, 1) = 1;
  const SupportGraph g = SupportGraph::from(CodingMatrix(c, CodeFamily::kCustom));
  EXPECT_EQ(g.edge_count(), 4);
  EXPECT_EQ(maximum_matching(g, {0, 1, 2, 3}), 2);
  EXPECT_FALSE(has_perfect_matching(g, {0, 1, 3}));
}

TEST(MatchingTest, FullRankImpliesMatching) {
  // Unit coefficients can lose rank despite a matching, never the reverse.
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const CodingMatrix code = make_p_bernoulli(5, 6, 0.5, 1, seed);
    const SupportGraph g = SupportGraph::from(code);
    for_each_subset(6, 5, [&](const std::vector<Index>& s) {
      if (has_full_column_rank(code.rows(s))) EXPECT_TRUE(has_perfect_matching(g, s));
      return true;
    });
  }
}

TEST(MatchingTest, BandGraphsAlwaysMatch) {
  for (Index n = 1; n <= 8; ++n)
    for (Index s = 0; s <= 3; ++s) {
      const SupportGraph g = SupportGraph::from(make_s_diagonal(n, n + s, s, 1, 0));
      for_each_subset(n + s, n, [&](const std::vector<Index>& subset) {
        EXPECT_TRUE(has_perfect_matching(g, subset)) << n << " " << s;
        return true;
      });
    }
}

TEST(MatchingTest, IsolatedBlockHasNoMatching) {
  CoefficientMatrix c = CoefficientMatrix::Ones(4, 3);
  c.col(1).setZero();
  EXPECT_FALSE(has_perfect_matching(SupportGraph::from(CodingMatrix(c, CodeFamily::kCustom)),
                                    {0, 1, 2}));
}

TEST(MatchingTest, GenericCoefficientsMatchRankExactly) {
  // Over a large coefficient set a matching almost surely yields full rank.
  Index disagreements = 0, subsets = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const CodingMatrix code = make_p_bernoulli(5, 7, 0.4, kDefaultCoefficientSetSize, seed);
    const SupportGraph g = SupportGraph::from(code);
    for_each_subset(7, 5, [&](const std::vector<Index>& s) {
      disagreements += has_full_column_rank(code.rows(s)) != has_perfect_matching(g, s);
      ++subsets;
      return true;
    });
  }
  EXPECT_EQ(subsets, 2100);
  EXPECT_EQ(disagreements, 0);
}

TEST(ThresholdTest, FourBlockExample) {
  EXPECT_EQ(recovery_threshold_exact(make_s_diagonal(4, 5, 1, 1, 0)), 4);
  EXPECT_EQ(recovery_threshold_exact(make_identity(6)), 6);
}

TEST(ThresholdTest, UnitTwoBandAgreesWithMinorOracle) {
  // Oracle: smallest k such that every k-subset has a nonzero n x n minor.
  const CodingMatrix code = make_s_diagonal(4, 6, 2, 1, 0);
  Index oracle = 7;
  for (Index k = 4; k <= 6 && oracle == 7; ++k) {
    bool all = true;
    for_each_subset(6, k, [&](const std::vector<Index>& rows) {
      bool any = false;
      for_each_subset(k, 4, [&](const std::vector<Index>& pick) {
        std::vector<Index> chosen;
        for (Index i : pick) chosen.push_back(rows[i]);
        any = any || exact_determinant(code.rows(chosen)) != 0;
        return !any;
      });
      all = all && any;
      return all;
    });
    if (all) oracle = k;
  }
  EXPECT_EQ(recovery_threshold_exact(code), oracle);
  EXPECT_GT(oracle, 4);
}

TEST(ThresholdTest, DiagonalCodesAreOptimal) {
  for (Index s : {0, 1, 2}) {
    CodeSpec spec;
    spec.n = 5;
    spec.s = s;
    spec.seed = 4;
    const CodingMatrix code = regenerate_until_valid(spec, 10).code;
    EXPECT_EQ(recovery_threshold_exact(code), 5);
  }
}

TEST(ThresholdTest, UnrecoverableCodeReportsMPlusOne) {
  CoefficientMatrix c = CoefficientMatrix::Zero(4, 2);
  c.col(0).setOnes();  // block 1 is never computed
  EXPECT_EQ(recovery_threshold_exact(CodingMatrix(c, CodeFamily::kCustom)), 5);
}

TEST(ThresholdTest, RepeatedRowsRaiseTheThreshold) {
  // Rows 1 and 2 identical: {1, 2} fails, every 3-subset works.
  CoefficientMatrix c(4, 2);
  c << 1, 1, 1, 1, 1, 0, 0, 1;
  EXPECT_EQ(recovery_threshold_exact(CodingMatrix(c, CodeFamily::kCustom)), 3);
}

TEST(ThresholdTest, GuardStopsHugeEnumerations) {
  const CodingMatrix code = make_p_bernoulli(20, 40, 0.5, 9, 1);
  EXPECT_THROW(find_rank_deficient_subset(code, 20), EnumerationLimit);
}

TEST(ResistTest, DiagonalResistsExactlyS) {
  CodeSpec spec;
  spec.n = 5;
  spec.s = 2;
  spec.seed = 9;
  const CodingMatrix code = regenerate_until_valid(spec, 10).code;
  EXPECT_TRUE(verify_resists(code, 2).resists);
  EXPECT_TRUE(verify_resists(code, 1).resists);
  const ResistCheck three = verify_resists(code, 3);
  EXPECT_FALSE(three.resists);
  EXPECT_FALSE(has_full_column_rank(code.rows(three.witness)));
}

TEST(ResistTest, SquareInvertibleCodeResistsNothing) {
  const CodingMatrix code = make_identity(4);
  EXPECT_TRUE(verify_resists(code, 0).resists);
  EXPECT_FALSE(verify_resists(code, 1).resists);
}

TEST(ResistTest, LoadAtLeastSPlusOnePerBlock) {
  // Any code resisting s stragglers touches each block at least s + 1 times.
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const CodingMatrix code = make_p_bernoulli(4, 7, 0.6, kDefaultCoefficientSetSize, seed);
    for (Index s = 0; s <= 3; ++s) {
      if (!verify_resists(code, s).resists) continue;
      for (Index j = 0; j < 4; ++j)
        EXPECT_GE((code.coefficients().col(j).array() != 0).count(), s + 1);
    }
  }
}

TEST(ResistTest, LowDegreeColumnGivesWitness) {
  CoefficientMatrix c = CoefficientMatrix::Ones(5, 3);
  c(0, 2) = c(1, 2) = c(2, 2) = 0;  // block 3 seen by workers 4 and 5 only
  const ResistCheck r = verify_resists(CodingMatrix(c, CodeFamily::kCustom), 2);
  EXPECT_FALSE(r.resists);
  EXPECT_EQ(r.witness, (std::vector<Index>{0, 1, 2}));
}

TEST(AuditTest, DiagonalMeetsBothBounds) {
  CodeSpec spec;
  spec.n = 6;
  spec.s = 2;
  spec.seed = 2;
  const AuditRecord a = lower_bound_audit(regenerate_until_valid(spec, 10).code, 2);
  EXPECT_EQ(a.load, 18);
  EXPECT_EQ(a.load_slack, 0);
  EXPECT_EQ(a.recovery_threshold, 6);
  EXPECT_EQ(a.threshold_slack, 0);
}

TEST(AuditTest, DenseCodeHasLoadSlack) {
  const CodingMatrix code = make_p_bernoulli(4, 6, 1.0, kDefaultCoefficientSetSize, 5);
  const AuditRecord a = lower_bound_audit(code, 2);
  EXPECT_EQ(a.load, 24);
  EXPECT_EQ(a.load_slack, 24 - 12);
  EXPECT_THROW(lower_bound_audit(make_identity(3), 1), InvalidArgument);
}

TEST(MonteCarloTest, JobsDoNotChangeResults) {
  CodeSpec spec;
  spec.family = CodeFamily::kCross;
  spec.n = 10;
  spec.m = 12;
  spec.d1 = 2;
  spec.d2 = 2;
  spec.seed = 77;
  const McReport one = rank_experiment(spec, 200, 1);
  const McReport four = rank_experiment(spec, 200, 4);
  EXPECT_EQ(one.full_rank_count, four.full_rank_count);
  EXPECT_EQ(one.mean_load_per_worker, four.mean_load_per_worker);
  EXPECT_EQ(one.load_stddev, four.load_stddev);
  EXPECT_EQ(one.matching_count, four.matching_count);
  EXPECT_EQ(one.rank_without_matching, 0);
  EXPECT_EQ(one.protocol, McProtocol::kResampleCodeSubset);
}

TEST(MonteCarloTest, SingleTrialFractionIsZeroOrOne) {
  CodeSpec spec;
  spec.family = CodeFamily::kPBernoulli;
  spec.n = 8;
  spec.m = 10;
  spec.p = 0.3;
  spec.seed = 5;
  const double f = rank_experiment(spec, 1).full_rank_fraction;
  EXPECT_TRUE(f == 0.0 || f == 1.0);
}

TEST(MonteCarloTest, FixedCodeProtocol) {
  const CodingMatrix dense = make_p_bernoulli(6, 9, 1.0, kDefaultCoefficientSetSize, 2);
  const McReport r = probabilistic_threshold_estimate(dense, 100, 3, 2);
  EXPECT_EQ(r.full_rank_fraction, 1.0);
  EXPECT_EQ(r.matching_count, 100);
  EXPECT_EQ(r.protocol, McProtocol::kFixedCode);
  EXPECT_DOUBLE_EQ(r.mean_load_per_worker, 6.0);
}

TEST(MonteCarloTest, VerifiedDiagonalCodeAlwaysDecodes) {
  CodeSpec spec;
  spec.n = 8;
  spec.s = 2;
  spec.seed = 6;
  const McReport r = probabilistic_threshold_estimate(regenerate_until_valid(spec, 10).code, 300, 1);
  EXPECT_EQ(r.full_rank_fraction, 1.0);
}

TEST(MonteCarloTest, CrossLoadNearExpectation) {
  // Expected entries per worker: n (d1/n + d2/m - d1 d2/(n m)) for independent picks.
  CodeSpec spec;
  spec.family = CodeFamily::kCross;
  spec.n = 20;
  spec.m = 24;
  spec.d1 = 2;
  spec.d2 = 2;
  spec.seed = 1;
  const McReport r = load_statistics(spec, 400);
  const double expected = 20.0 * (2.0 / 20 + 2.0 / 24 - 4.0 / 480);
  EXPECT_NEAR(r.mean_load_per_worker, expected, 0.1);
}

TEST(MonteCarloTest, LoadStatisticsOfDiagonalCodeAreConstant) {
  CodeSpec spec;
  spec.n = 10;
  spec.s = 2;
  const McReport r = load_statistics(spec, 20);
  EXPECT_DOUBLE_EQ(r.mean_load_per_worker, 30.0 / 12.0);
  EXPECT_EQ(r.load_stddev, 0.0);
}

}  // namespace
}  // namespace coxf
