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

#include "expo/scoring.h"

#include <gtest/gtest.h>

#include <cmath>

#include "test_util.h"

namespace expo {
namespace {

using testing::RandomTraitSet;
using testing::RandomVector;
using testing::TempDir;

double NaiveCosine(const Vector& a, const Vector& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (int64_t i = 0; i < a.size(); ++i) {
    dot += a(i) * b(i);
    na += a(i) * a(i);
    nb += b(i) * b(i);
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

Vector Vec(std::initializer_list<double> v) {
  Vector out(static_cast<int64_t>(v.size()));
  int64_t i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

struct Fixture {
  Corpus corpus;
  ModelState model;
  TrialList trials;
};

Fixture SmallSetup() {
  CorpusConfig c;
  c.n_speakers = 4;
  c.utts_per_speaker = 5;
  c.feature_dim = 6;
  c.seed = 3;
  Fixture f;
  f.corpus = GenerateCorpus(c, PhoneInventory::Default());
  f.model = InitModel(EncoderConfig{6, EncoderConfig::ParseLayers("-1,0,1:8:relu|0:6:identity")},
                      5, f.corpus.inventory.Size(), f.corpus.SpeakerIds(), 2);
  f.trials = MakeTrials(f.corpus, 20, 20, 4);
  return f;
}

TEST(CosineTest, HandCases) {
  EXPECT_DOUBLE_EQ(CosineSimilarity(Vec({1, 2, 3}), Vec({1, 2, 3})), 1.0);
  EXPECT_DOUBLE_EQ(CosineSimilarity(Vec({1, 0}), Vec({0, 5})), 0.0);
  EXPECT_DOUBLE_EQ(CosineSimilarity(Vec({1, -2}), Vec({-1, 2})), -1.0);
  EXPECT_THROW(CosineSimilarity(Vec({0, 0}), Vec({1, 2})), NumericError);
  EXPECT_THROW(CosineSimilarity(Vec({1, 0}), Vec({1, 2, 3})), DimensionError);
}

TEST(CosineTest, SymmetricScaleInvariantAndBounded) {
  Rng rng(1);
  for (int n = 0; n < 200; ++n) {
    const Vector a = RandomVector(&rng, 7);
    const Vector b = RandomVector(&rng, 7);
    const double s = CosineSimilarity(a, b);
    EXPECT_EQ(s, CosineSimilarity(b, a));
    EXPECT_NEAR(s, CosineSimilarity(3.5 * a, 0.25 * b), 1e-12);
    EXPECT_NEAR(s, NaiveCosine(a, b), 1e-12);
    EXPECT_LE(std::abs(s), 1.0);
  }
}

TEST(TraitSimilarityTest, MatchesElementwiseOracle) {
  Rng rng(2);
  for (int n = 0; n < 200; ++n) {
    const PhoneticTraitSet a = RandomTraitSet(&rng, 12, 4, 0.6);
    const PhoneticTraitSet b = RandomTraitSet(&rng, 12, 4, 0.6);
    const TraitSimilarityVector s = TraitSimilarity(a, b);
    ASSERT_EQ(s.Size(), 12);
    int defined = 0;
    for (int i = 0; i < 12; ++i) {
      const bool both = a.present[i] && b.present[i];
      ASSERT_EQ(s.values[i].has_value(), both);
      if (both) {
        ++defined;
        EXPECT_NEAR(*s.values[i],
                    NaiveCosine(a.traits.row(i).transpose(),
                                b.traits.row(i).transpose()),
                    1e-12);
      }
    }
    EXPECT_EQ(s.NumDefined(), defined);
  }
}

TEST(TraitSimilarityTest, MismatchedShapesThrow) {
  Rng rng(3);
  EXPECT_THROW(TraitSimilarity(RandomTraitSet(&rng, 5, 4, 1.0),
                               RandomTraitSet(&rng, 6, 4, 1.0)),
               DimensionError);
}

TEST(EvidenceScoreTest, MeanOfDefinedEntries) {
  TraitSimilarityVector s;
  s.values = {std::nullopt, 0.958, std::nullopt, 0.959, 0.973};
  EXPECT_NEAR(EvidenceScore(s), (0.958 + 0.959 + 0.973) / 3.0, 1e-15);
  EXPECT_NEAR(EvidenceScore(s), 0.963333333333, 1e-12);
}

TEST(EvidenceScoreTest, NoSharedPhoneIsUndefined) {
  TraitSimilarityVector s;
  s.values = {std::nullopt, std::nullopt};
  EXPECT_THROW(EvidenceScore(s), UndefinedEvidenceError);
}

TEST(EvidenceScoreTest, BoundedByExtremesOfDefinedEntries) {
  Rng rng(4);
  for (int n = 0; n < 300; ++n) {
    const PhoneticTraitSet a = RandomTraitSet(&rng, 10, 3, 0.5);
    const PhoneticTraitSet b = RandomTraitSet(&rng, 10, 3, 0.5);
    const TraitSimilarityVector s = TraitSimilarity(a, b);
    if (s.NumDefined() == 0) {
      EXPECT_THROW(EvidenceScore(s), UndefinedEvidenceError);
      continue;
    }
    double lo = 2.0, hi = -2.0, sum = 0.0;
    for (const auto& v : s.values) {
      if (!v) continue;
      lo = std::min(lo, *v);
      hi = std::max(hi, *v);
      sum += *v;
    }
    const double e = EvidenceScore(s);
    EXPECT_EQ(e, sum / s.NumDefined());
    EXPECT_GE(e, lo - 1e-15);
    EXPECT_LE(e, hi + 1e-15);
  }
}

TEST(ScorePairTest, RecordWithoutSharedPhoneHasNoEvidence) {
  PhoneticTraitSet a;
  a.traits = Matrix::Zero(3, 2);
  a.present = {true, false, false};
  a.frame_counts = {1, 0, 0};
  a.traits(0, 0) = 1.0;
  PhoneticTraitSet b = a;
  b.present = {false, true, false};
  b.frame_counts = {0, 1, 0};
  b.traits(1, 1) = 1.0;
  const ScoreRecord r =
      ScorePair({"e", Vec({1, 0})}, a, {"t", Vec({1, 1})}, b);
  EXPECT_FALSE(r.evidence_score.has_value());
  EXPECT_NEAR(r.final_score, 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(r.enroll_id, "e");
  EXPECT_EQ(r.test_id, "t");
}

TEST(ScoreTrialsTest, CachedAndUncachedAgree) {
  const Fixture f = SmallSetup();
  const auto cached = ScoreTrials(f.model, f.corpus, f.trials, true);
  const auto plain = ScoreTrials(f.model, f.corpus, f.trials, false);
  ASSERT_EQ(cached.size(), 40u);
  EXPECT_EQ(cached, plain);
  for (size_t n = 0; n < cached.size(); ++n) {
    EXPECT_EQ(cached[n].enroll_id, f.trials.trials[n].enroll_id);
    EXPECT_EQ(cached[n].target, f.trials.trials[n].target);
    EXPECT_TRUE(std::isfinite(cached[n].final_score));
    EXPECT_LE(std::abs(cached[n].final_score), 1.0 + 1e-12);
  }
}

TEST(ScoreTrialsTest, DuplicatedUtteranceScoresOne) {
  Fixture f = SmallSetup();
  UtteranceFeatures copy = f.corpus.utterances[0];
  PhoneAlignment align = f.corpus.alignments[0];
  copy.utterance_id = "dup";
  align.utterance_id = "dup";
  f.corpus.utterances.push_back(copy);
  f.corpus.alignments.push_back(align);
  f.corpus.RebuildIndex();
  TrialList t;
  t.trials.push_back({f.corpus.utterances[0].utterance_id, "dup", true});
  const auto r = ScoreTrials(f.model, f.corpus, t);
  EXPECT_NEAR(r[0].final_score, 1.0, 1e-12);
  ASSERT_TRUE(r[0].evidence_score.has_value());
  EXPECT_NEAR(*r[0].evidence_score, 1.0, 1e-12);
}

TEST(ScoreTrialsTest, UnknownUtteranceOrInventoryMismatchThrows) {
  Fixture f = SmallSetup();
  TrialList t;
  t.trials.push_back({"nope", f.corpus.utterances[0].utterance_id, false});
  EXPECT_THROW(ScoreTrials(f.model, f.corpus, t), ConfigError);
  f.model.num_phones += 1;
  EXPECT_THROW(ScoreTrials(f.model, f.corpus, f.trials), DimensionError);
}

TEST(ScoreFileTest, RoundTripKeepsEveryField) {
  const Fixture f = SmallSetup();
  auto records = ScoreTrials(f.model, f.corpus, f.trials);
  records[0].target.reset();
  ScoreRecord none;
  none.enroll_id = "a";
  none.test_id = "b";
  none.target = false;
  none.final_score = -0.25;
  none.similarity.values.assign(f.corpus.inventory.Size(), std::nullopt);
  records.push_back(none);
  TempDir dir;
  SaveScores(dir.File("scores.txt"), records);
  EXPECT_EQ(LoadScores(dir.File("scores.txt")), records);
  const std::string line = FormatScoreLine(none);
  EXPECT_EQ(line.substr(0, 20), "a\tb\t0\t-0.25\tNA\tNA\tNA");
}

TEST(ScoreFileTest, MalformedLinesReportLineNumbers) {
  TempDir dir;
  testing::WriteFile(dir.File("s"), "a\tb\t1\t0.5\t0.5\t0.5\na\tb\tyes\t0.5\t0.5\t0.5\n");
  try {
    LoadScores(dir.File("s"));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  testing::WriteFile(dir.File("t"), "a\tb\t1\t0.5\tNA\t0.5\n");
  EXPECT_THROW(LoadScores(dir.File("t")), ParseError);
}

TEST(ScoreTrialsTest, ReloadedCheckpointScoresIdentically) {
  const Fixture f = SmallSetup();
  TempDir dir;
  SaveCheckpoint(dir.File("ckpt"), f.model);
  const ModelState back = LoadCheckpoint(dir.File("ckpt"));
  EXPECT_EQ(ScoreTrials(back, f.corpus, f.trials),
            ScoreTrials(f.model, f.corpus, f.trials));
}

}  // namespace
}  // namespace expo
