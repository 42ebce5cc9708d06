// Copyright (c) 2026 The ExPO-desk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "expo/analysis.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "test_util.h"

namespace expo {
namespace {

// Brute force: every threshold in the score set and +inf, FAR/FRR counted
// directly, EER interpolated at the first sign change of FAR - FRR.
double BruteEer(const std::vector<LabeledScore>& s) {
  std::vector<double> th;
  for (const auto& x : s) th.push_back(x.score);
  std::sort(th.begin(), th.end());
  th.erase(std::unique(th.begin(), th.end()), th.end());
  th.push_back(std::numeric_limits<double>::infinity());
  double nt = 0, nn = 0;
  for (const auto& x : s) (x.target ? nt : nn) += 1;
  double prev_far = 1.0, prev_frr = 0.0;
  for (double t : th) {
    double fa = 0, miss = 0;
    for (const auto& x : s) {
      if (x.target && x.score < t) ++miss;
      if (!x.target && x.score >= t) ++fa;
    }
    const double far = fa / nn, frr = miss / nt;
    if (far - frr <= 0) {
      const double d0 = prev_far - prev_frr;
      const double d1 = far - frr;
      if (d0 == d1) return (far + frr) / 2;
      const double w = d0 / (d0 - d1);
      return prev_far + w * (far - prev_far);
    }
    prev_far = far;
    prev_frr = frr;
  }
  return 0.0;
}

double BruteMinDcf(const std::vector<LabeledScore>& s, const DcfParams& p) {
  double nt = 0, nn = 0;
  for (const auto& x : s) (x.target ? nt : nn) += 1;
  std::vector<double> th;
  for (const auto& x : s) th.push_back(x.score);
  th.push_back(std::numeric_limits<double>::infinity());
  const double norm = std::min(p.c_miss * p.p_target, p.c_fa * (1 - p.p_target));
  double best = std::numeric_limits<double>::infinity();
  for (double t : th) {
    double fa = 0, miss = 0;
    for (const auto& x : s) {
      if (x.target && x.score < t) ++miss;
      if (!x.target && x.score >= t) ++fa;
    }
    const double c = p.c_miss * p.p_target * (miss / nt) +
                     p.c_fa * (1 - p.p_target) * (fa / nn);
    best = std::min(best, c / norm);
  }
  return best;
}

std::vector<LabeledScore> RandomTrials(Rng* rng, int n) {
  std::vector<LabeledScore> s;
  for (int i = 0; i < n; ++i) {
    const bool target = i % 2 == 0;
    s.push_back({rng->Normal() + (target ? 1.0 : 0.0), target});
  }
  return s;
}

ScoreRecord Record(bool target, std::vector<std::optional<double>> sims,
                   double final_score = 0.5) {
  ScoreRecord r;
  r.enroll_id = "e";
  r.test_id = "t";
  r.target = target;
  r.final_score = final_score;
  r.similarity.values = std::move(sims);
  if (r.similarity.NumDefined() > 0) r.evidence_score = EvidenceScore(r.similarity);
  return r;
}

TEST(EerTest, PerfectSeparationIsZero) {
  const std::vector<LabeledScore> s = {{0.9, true}, {0.8, true}, {0.1, false}, {0.2, false}};
  EXPECT_EQ(ComputeEer(s).eer, 0.0);
  EXPECT_EQ(ComputeMinDcf(s), 0.0);
}

TEST(EerTest, OneSwappedPairOfThreeIsOneThird) {
  const std::vector<LabeledScore> s = {{0.9, true}, {0.8, true}, {0.3, true},
                                       {0.5, false}, {0.2, false}, {0.1, false}};
  EXPECT_NEAR(ComputeEer(s).eer, 1.0 / 3.0, 1e-12);
}

TEST(EerTest, FullyInvertedIsOne) {
  const std::vector<LabeledScore> s = {{0.1, true}, {0.2, true}, {0.8, false}, {0.9, false}};
  EXPECT_NEAR(ComputeEer(s).eer, 1.0, 1e-12);
}

TEST(EerTest, AllEqualScoresGiveMinDcfOne) {
  const std::vector<LabeledScore> s = {{0.5, true}, {0.5, false}, {0.5, true}, {0.5, false}};
  EXPECT_NEAR(ComputeMinDcf(s), 1.0, 1e-12);
  EXPECT_NEAR(ComputeEer(s).eer, 0.5, 1e-12);
}

TEST(EerTest, SingleClassOrNonFiniteThrows) {
  const std::vector<LabeledScore> one = {{0.5, true}, {0.7, true}};
  EXPECT_THROW(ComputeEer(one), ConfigError);
  EXPECT_THROW(ComputeMinDcf(one), ConfigError);
  const std::vector<LabeledScore> nan = {
      {std::numeric_limits<double>::quiet_NaN(), true}, {0.1, false}};
  EXPECT_THROW(ComputeEer(nan), NumericError);
}

TEST(EerTest, MatchesBruteForceSweep) {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const auto s = RandomTrials(&rng, 200);
    EXPECT_NEAR(ComputeEer(s).eer, BruteEer(s), 1e-12);
    for (const DcfParams p : {DcfParams{}, DcfParams{0.05, 1.0, 1.0},
                              DcfParams{0.5, 2.0, 1.0}}) {
      EXPECT_NEAR(ComputeMinDcf(s, p), BruteMinDcf(s, p), 1e-9);
    }
  }
}

TEST(EerTest, InvariantUnderMonotoneTransform) {
  Rng rng(6);
  auto s = RandomTrials(&rng, 200);
  const double eer = ComputeEer(s).eer;
  const double dcf = ComputeMinDcf(s);
  for (auto& x : s) x.score = std::exp(2.0 * x.score) - 3.0;
  EXPECT_NEAR(ComputeEer(s).eer, eer, 1e-12);
  EXPECT_NEAR(ComputeMinDcf(s), dcf, 1e-12);
}

TEST(EerTest, BoundsHold) {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const auto s = RandomTrials(&rng, 50);
    const double eer = ComputeEer(s).eer;
    EXPECT_GE(eer, 0.0);
    EXPECT_LE(eer, 1.0);
    EXPECT_GE(ComputeMinDcf(s), 0.0);
    EXPECT_LE(ComputeMinDcf(s), 1.0 + 1e-12);
  }
}

TEST(ColumnTest, SkipsUnlabeledAndMissingEvidence) {
  std::vector<ScoreRecord> r = {Record(true, {0.9, std::nullopt}, 0.8),
                                Record(false, {std::nullopt, std::nullopt}, 0.1),
                                Record(false, {0.2, 0.1}, 0.3)};
  ScoreRecord unlabeled = Record(true, {0.5, 0.5});
  unlabeled.target.reset();
  r.push_back(unlabeled);
  EXPECT_EQ(ExtractColumn(r, ScoreColumn::kFinal).size(), 3u);
  EXPECT_EQ(ExtractColumn(r, ScoreColumn::kEvidence).size(), 2u);
  const MetricReport m = EvaluateColumn(r, ScoreColumn::kEvidence);
  EXPECT_EQ(m.n_target, 1);
  EXPECT_EQ(m.n_nontarget, 1);
  EXPECT_EQ(m.eer, 0.0);
}

TEST(CorrelationTest, HandCases) {
  const std::vector<double> x = {1, 2, 3};
  const std::vector<double> y = {2, 4, 6};
  const std::vector<double> z = {3, 2, 1};
  EXPECT_NEAR(PearsonCorrelation(x, y), 1.0, 1e-15);
  EXPECT_NEAR(PearsonCorrelation(x, z), -1.0, 1e-15);
  const std::vector<double> c = {1, 1, 1};
  EXPECT_THROW(PearsonCorrelation(x, c), NumericError);
  EXPECT_THROW(PearsonCorrelation(std::vector<double>{1}, std::vector<double>{1}),
               ConfigError);
}

TEST(CorrelationTest, ExplainabilityUsesRecordsWithEvidence) {
  std::vector<ScoreRecord> r = {Record(true, {0.2}, 1.0), Record(false, {0.4}, 2.0),
                                Record(true, {0.6}, 3.0),
                                Record(true, {std::nullopt}, -50.0)};
  EXPECT_NEAR(ExplainabilityCorrelation(r), 1.0, 1e-12);
}

TEST(FRatioTest, ConstantPoolsGiveExactRatio) {
  std::vector<ScoreRecord> r;
  for (int n = 0; n < 10; ++n) {
    r.push_back(Record(true, {0.75, 0.75}));
    r.push_back(Record(false, {0.375, std::nullopt}));
  }
  const FRatioReport rep = ComputeFRatio(r, PhoneInventory({"A", "[N-V]"}), 10, 1);
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_TRUE(rep.rows[0].included);
  EXPECT_NEAR(rep.rows[0].ratio, 2.0, 1e-12);
  EXPECT_EQ(rep.rows[0].within_mean, 0.75);
  EXPECT_EQ(rep.rows[0].between_mean, 0.375);
  EXPECT_FALSE(rep.rows[1].included);
  EXPECT_EQ(rep.rows[1].n_within, 10);
  EXPECT_EQ(rep.rows[1].n_between, 0);
  EXPECT_EQ(rep.ToCsv(),
            "phone,within,between,ratio,included\n"
            "A,0.75,0.375,2,1\n"
            "[N-V],NA,NA,NA,0\n");
}

TEST(FRatioTest, LowCountPhoneIsExcluded) {
  std::vector<ScoreRecord> r;
  for (int n = 0; n < 6; ++n) {
    r.push_back(Record(true, {0.8, n < 3 ? std::optional<double>(0.7) : std::nullopt}));
    r.push_back(Record(false, {0.1, 0.2}));
  }
  const FRatioReport rep = ComputeFRatio(r, PhoneInventory({"A", "ZH"}), 5, 1);
  EXPECT_TRUE(rep.rows[0].included);
  EXPECT_FALSE(rep.rows[1].included);
  EXPECT_EQ(rep.rows[1].n_available, 3);
}

TEST(FRatioTest, DeterministicAndRowsIndependent) {
  Rng rng(8);
  std::vector<ScoreRecord> r;
  for (int n = 0; n < 400; ++n) {
    const bool target = n % 2 == 0;
    std::vector<std::optional<double>> sims;
    for (int i = 0; i < 3; ++i) {
      const double v = std::tanh(rng.Normal() * 0.3 + (target ? 0.8 : 0.2));
      sims.push_back(i == 2 && n >= 250 ? std::nullopt : std::optional<double>(v));
    }
    r.push_back(Record(target, sims));
  }
  const PhoneInventory inv({"A", "B", "ZH"});
  const FRatioReport a = ComputeFRatio(r, inv, 100, 4);
  const FRatioReport b = ComputeFRatio(r, inv, 100, 4);
  EXPECT_EQ(a.ToCsv(), b.ToCsv());
  EXPECT_NE(a.ToCsv(), ComputeFRatio(r, inv, 100, 5).ToCsv());
  // Thinning ZH below the sample size drops it; A and B are unchanged.
  EXPECT_TRUE(a.rows[2].included);
  std::vector<ScoreRecord> trimmed = r;
  for (size_t n = 100; n < trimmed.size(); ++n) trimmed[n].similarity.values[2].reset();
  const FRatioReport d = ComputeFRatio(trimmed, inv, 100, 4);
  EXPECT_FALSE(d.rows[2].included);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(a.rows[i].ratio, d.rows[i].ratio);
    EXPECT_EQ(a.rows[i].within_mean, d.rows[i].within_mean);
  }
  for (const auto& row : a.rows) {
    if (!row.included) continue;
    EXPECT_GE(row.within_mean, -1.0);
    EXPECT_LE(row.within_mean, 1.0);
    EXPECT_GE(row.between_mean, -1.0);
    EXPECT_LE(row.between_mean, 1.0);
    EXPECT_GT(row.ratio, 1.0);
  }
}

TEST(FRatioTest, InvalidInputThrows) {
  std::vector<ScoreRecord> r = {Record(true, {std::nullopt, std::nullopt})};
  EXPECT_THROW(ComputeFRatio(r, PhoneInventory({"A", "B"}), 1, 1), ConfigError);
  EXPECT_THROW(ComputeFRatio(r, PhoneInventory({"A", "B", "C"}), 1, 1),
               DimensionError);
  EXPECT_THROW(ComputeFRatio(r, PhoneInventory({"A", "B"}), 0, 1), ConfigError);
}

TEST(ExplanationTest, PositiveTrialListsTraitThreeAsAh) {
  const PhoneInventory inv = PhoneInventory::Default();
  std::vector<std::optional<double>> sims(inv.Size());
  sims[2] = 0.958;  // third trait, AH
  sims[5] = 0.959;
  sims[22] = 0.973;
  ScoreRecord r = Record(true, sims, 0.914);
  r.enroll_id = "enr";
  r.test_id = "tst";
  const std::string text = ExportExplanation(r, inv);
  EXPECT_NE(text.find("phone\t2\tAH\t0.958\n"), std::string::npos);
  EXPECT_NE(text.find("phone\t0\tAA\tNA\n"), std::string::npos);
  EXPECT_NE(text.find("final\t0.914\n"), std::string::npos);
  EXPECT_EQ(text.substr(0, 9), "enroll\ten");
  EXPECT_EQ(ParseExplanation(text, inv), r);
}

TEST(ExplanationTest, AllAbsentRecordRoundTrips) {
  const PhoneInventory inv({"A", "B", "[N-V]"});
  ScoreRecord r = Record(false, {std::nullopt, std::nullopt, std::nullopt}, -0.258);
  const std::string text = ExportExplanation(r, inv);
  EXPECT_NE(text.find("evidence\tNA\n"), std::string::npos);
  EXPECT_EQ(ParseExplanation(text, inv), r);
}

TEST(ExplanationTest, MalformedTextReportsLine) {
  const PhoneInventory inv({"A", "B"});
  const std::string text =
      "enroll\te\ntest\tt\nlabel\t1\nfinal\t0.5\nevidence\t0.5\n"
      "phone\t0\tA\t0.5\nphone\t1\tX\t0.5\n";
  try {
    ParseExplanation(text, inv, "x.tsv");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 7);
    EXPECT_EQ(e.path(), "x.tsv");
  }
}

TEST(ReportTest, KeyValueAndCsvLayout) {
  const MetricReport f{0.04, 0.3, 0.5, 250, 250};
  const MetricReport e{0.016, 0.2, 0.4, 250, 248};
  const std::string kv = FormatMetricReport(f, e, 0.83);
  EXPECT_NE(kv.find("final.eer=0.04\n"), std::string::npos);
  EXPECT_NE(kv.find("evidence.n_nontarget=248\n"), std::string::npos);
  EXPECT_NE(kv.find("correlation.final_evidence=0.83\n"), std::string::npos);
  EXPECT_EQ(FormatMetricCsv(f, e),
            "column,eer,min_dcf,threshold_at_eer,n_target,n_nontarget\n"
            "final,0.04,0.3,0.5,250,250\n"
            "evidence,0.016,0.2,0.4,250,248\n");
}

}  // namespace
}  // namespace expo
