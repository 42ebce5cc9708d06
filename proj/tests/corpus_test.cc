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

#include "expo/corpus.h"

#include <gtest/gtest.h>

#include <set>

#include "test_util.h"

namespace expo {
namespace {

using testing::ReadFile;
using testing::TempDir;
using testing::WriteFile;

CorpusConfig SmallConfig() {
  CorpusConfig c;
  c.n_speakers = 4;
  c.utts_per_speaker = 3;
  c.feature_dim = 5;
  return c;
}

TEST(PhoneInventoryTest, DefaultHasFortyLabelsWithNonVerbalLast) {
  const PhoneInventory inv = PhoneInventory::Default();
  EXPECT_EQ(inv.Size(), 40);
  EXPECT_EQ(inv.Label(inv.NonVerbalIndex()), "[N-V]");
  EXPECT_EQ(inv.NonVerbalIndex(), 39);
  std::set<std::string> unique(inv.labels().begin(), inv.labels().end());
  EXPECT_EQ(unique.size(), 40u);
  EXPECT_EQ(inv.IndexOf("ZH"), 38);
  EXPECT_FALSE(inv.IndexOf("XX").has_value());
}

TEST(PhoneInventoryTest, RejectsInvalidLabelSets) {
  EXPECT_THROW(PhoneInventory({"A"}), ConfigError);
  EXPECT_THROW(PhoneInventory({"A", "A"}), ConfigError);
  EXPECT_THROW(PhoneInventory({"A", "B C"}), ConfigError);
}

TEST(PhoneInventoryTest, ExtendedAppendsLabels) {
  const PhoneInventory inv({"A", "B"});
  const PhoneInventory ext = inv.Extended({"C"});
  EXPECT_EQ(ext.Size(), 3);
  EXPECT_EQ(ext.Label(0), "A");
  EXPECT_EQ(ext.Label(2), "C");
}

TEST(GenerateCorpusTest, CountsMatchSpeakersTimesUtterances) {
  CorpusConfig c;
  c.n_speakers = 20;
  c.utts_per_speaker = 10;
  const Corpus corpus = GenerateCorpus(c, PhoneInventory::Default());
  EXPECT_EQ(corpus.utterances.size(), 200u);
  EXPECT_EQ(corpus.alignments.size(), 200u);
  EXPECT_EQ(corpus.profiles.size(), 20u);
  EXPECT_EQ(corpus.SpeakerIds().size(), 20u);
}

TEST(GenerateCorpusTest, ZeroNoiseSingleSegmentEqualsSignature) {
  CorpusConfig c;
  c.n_speakers = 1;
  c.utts_per_speaker = 1;
  c.feature_dim = 4;
  c.min_phones_per_utt = c.max_phones_per_utt = 1;
  c.noise_std = 0.0;
  const Corpus corpus = GenerateCorpus(c, PhoneInventory::Default());
  ASSERT_EQ(corpus.alignments[0].segments.size(), 1u);
  const int p = corpus.alignments[0].segments[0].phone;
  const Matrix& f = corpus.utterances[0].features;
  for (int64_t t = 0; t < f.rows(); ++t) {
    for (int64_t d = 0; d < f.cols(); ++d) {
      EXPECT_EQ(f(t, d), corpus.profiles[0].signatures(p, d));
    }
  }
}

TEST(GenerateCorpusTest, ZeroNoiseFramesOfSameSpeakerPhoneAreIdentical) {
  CorpusConfig c = SmallConfig();
  c.noise_std = 0.0;
  const Corpus corpus = GenerateCorpus(c, PhoneInventory::Default());
  for (size_t u = 0; u < corpus.utterances.size(); ++u) {
    const auto& utt = corpus.utterances[u];
    const auto phones = corpus.alignments[u].FramePhones();
    const size_t spk = u / c.utts_per_speaker;
    for (int64_t t = 0; t < utt.NumFrames(); ++t) {
      EXPECT_EQ(utt.features.row(t),
                corpus.profiles[spk].signatures.row(phones[t]));
    }
  }
}

TEST(GenerateCorpusTest, AlignmentsCoverFramesExactly) {
  const Corpus corpus = GenerateCorpus(SmallConfig(), PhoneInventory::Default());
  for (size_t u = 0; u < corpus.utterances.size(); ++u) {
    const auto& segs = corpus.alignments[u].segments;
    int64_t t = 0;
    for (const auto& s : segs) {
      EXPECT_EQ(s.start_frame, t);
      EXPECT_GT(s.end_frame, s.start_frame);
      t = s.end_frame;
    }
    EXPECT_EQ(t, corpus.utterances[u].NumFrames());
    EXPECT_NO_THROW(corpus.alignments[u].Validate(t, 40));
  }
}

TEST(GenerateCorpusTest, SameSeedIsBitIdenticalOtherSeedDiffers) {
  const PhoneInventory inv = PhoneInventory::Default();
  CorpusConfig c = SmallConfig();
  c.seed = 7;
  const Corpus a = GenerateCorpus(c, inv);
  const Corpus b = GenerateCorpus(c, inv);
  ASSERT_EQ(a.utterances.size(), b.utterances.size());
  for (size_t i = 0; i < a.utterances.size(); ++i) {
    EXPECT_EQ(a.utterances[i].features, b.utterances[i].features);
    EXPECT_EQ(a.alignments[i], b.alignments[i]);
  }
  TempDir dir;
  SaveFeatures(dir.File("a.txt"), a.utterances);
  SaveFeatures(dir.File("b.txt"), b.utterances);
  EXPECT_EQ(ReadFile(dir.File("a.txt")), ReadFile(dir.File("b.txt")));

  c.seed = 8;
  const Corpus d = GenerateCorpus(c, inv);
  const bool same = a.utterances[0].features.rows() ==
                        d.utterances[0].features.rows() &&
                    a.utterances[0].features == d.utterances[0].features;
  EXPECT_FALSE(same);
}

TEST(GenerateCorpusTest, MoreUtterancesKeepEarlierOnesUnchanged) {
  const PhoneInventory inv = PhoneInventory::Default();
  CorpusConfig c = SmallConfig();
  const Corpus small = GenerateCorpus(c, inv);
  c.utts_per_speaker = 5;
  const Corpus big = GenerateCorpus(c, inv);
  const CorpusSplit split = big.SplitPerSpeaker(3);
  ASSERT_EQ(split.first.utterances.size(), small.utterances.size());
  EXPECT_EQ(split.second.utterances.size(), 8u);
  for (size_t i = 0; i < small.utterances.size(); ++i) {
    EXPECT_EQ(split.first.utterances[i].utterance_id,
              small.utterances[i].utterance_id);
    EXPECT_EQ(split.first.utterances[i].features, small.utterances[i].features);
  }
}

TEST(GenerateCorpusTest, RejectsInvalidConfig) {
  const PhoneInventory inv = PhoneInventory::Default();
  CorpusConfig c = SmallConfig();
  c.n_speakers = 0;
  EXPECT_THROW(GenerateCorpus(c, inv), ConfigError);
  c = SmallConfig();
  c.min_segment_frames = 5;
  c.max_segment_frames = 2;
  EXPECT_THROW(GenerateCorpus(c, inv), ConfigError);
  c = SmallConfig();
  c.noise_std = -1.0;
  EXPECT_THROW(GenerateCorpus(c, inv), ConfigError);
  c = SmallConfig();
  c.phone_weights = {1.0, 2.0};
  EXPECT_THROW(GenerateCorpus(c, inv), ConfigError);
}

TEST(GenerateCorpusTest, ZeroWeightPhoneNeverOccurs) {
  const PhoneInventory inv = PhoneInventory::Default();
  CorpusConfig c = SmallConfig();
  c.phone_weights.assign(inv.Size(), 1.0);
  c.phone_weights[38] = 0.0;
  const Corpus corpus = GenerateCorpus(c, inv);
  for (const auto& a : corpus.alignments) {
    for (const auto& s : a.segments) EXPECT_NE(s.phone, 38);
  }
}

TEST(TrialsTest, CountsAndLabelsAreExact) {
  const Corpus corpus = GenerateCorpus(SmallConfig(), PhoneInventory::Default());
  const TrialList trials = MakeTrials(corpus, 5, 5, 3);
  EXPECT_EQ(trials.trials.size(), 10u);
  EXPECT_EQ(trials.NumTarget(), 5);
  EXPECT_EQ(trials.NumNontarget(), 5);
  for (const Trial& t : trials.trials) {
    EXPECT_NE(t.enroll_id, t.test_id);
    const auto& a = corpus.utterances[corpus.IndexOf(t.enroll_id)];
    const auto& b = corpus.utterances[corpus.IndexOf(t.test_id)];
    EXPECT_EQ(a.speaker_id == b.speaker_id, t.target);
  }
  EXPECT_EQ(MakeTrials(corpus, 5, 5, 3), trials);
}

TEST(TrialsTest, ImpossibleRequestsThrow) {
  CorpusConfig c = SmallConfig();
  c.n_speakers = 1;
  const Corpus one = GenerateCorpus(c, PhoneInventory::Default());
  EXPECT_THROW(MakeTrials(one, 0, 1, 1), ConfigError);
  c.n_speakers = 3;
  c.utts_per_speaker = 1;
  const Corpus singles = GenerateCorpus(c, PhoneInventory::Default());
  EXPECT_THROW(MakeTrials(singles, 1, 0, 1), ConfigError);
}

TEST(TrialsTest, PerUtteranceProtocolGivesTwoTrialsPerUtterance) {
  CorpusConfig c;
  c.n_speakers = 20;
  c.utts_per_speaker = 10;
  c.feature_dim = 3;
  const Corpus corpus = GenerateCorpus(c, PhoneInventory::Default());
  const TrialList trials = MakePerUtteranceTrials(corpus, 5);
  EXPECT_EQ(trials.trials.size(), 400u);
  EXPECT_EQ(trials.NumTarget(), 200);
  EXPECT_NO_THROW(ValidateTrials(trials, corpus));
}

TEST(TrialsTest, ValidateRejectsUnknownIds) {
  const Corpus corpus = GenerateCorpus(SmallConfig(), PhoneInventory::Default());
  TrialList t;
  t.trials.push_back({"nope", corpus.utterances[0].utterance_id, false});
  EXPECT_THROW(ValidateTrials(t, corpus), Error);
}

TEST(FileIoTest, RoundTripsAreIdentity) {
  const PhoneInventory inv = PhoneInventory::Default();
  const Corpus corpus = GenerateCorpus(SmallConfig(), inv);
  const TrialList trials = MakeTrials(corpus, 4, 4, 1);
  TempDir dir;
  SaveInventory(dir.File("inv.txt"), inv);
  SaveAlignments(dir.File("ali.txt"), corpus.alignments, inv);
  SaveTrials(dir.File("trials.txt"), trials);
  SaveFeatures(dir.File("feats.txt"), corpus.utterances);

  EXPECT_EQ(LoadInventory(dir.File("inv.txt")), inv);
  EXPECT_EQ(LoadAlignments(dir.File("ali.txt"), inv), corpus.alignments);
  EXPECT_EQ(LoadTrials(dir.File("trials.txt")), trials);
  const auto feats = LoadFeatures(dir.File("feats.txt"));
  ASSERT_EQ(feats.size(), corpus.utterances.size());
  for (size_t i = 0; i < feats.size(); ++i) {
    EXPECT_EQ(feats[i].utterance_id, corpus.utterances[i].utterance_id);
    EXPECT_EQ(feats[i].speaker_id, corpus.utterances[i].speaker_id);
    EXPECT_EQ(feats[i].features, corpus.utterances[i].features);
  }
  const Corpus back = AssembleCorpus(inv, feats, corpus.alignments);
  EXPECT_EQ(back.utterances.size(), corpus.utterances.size());
}

TEST(FileIoTest, TrialFileUsesLabelEnrollTestColumns) {
  TrialList t;
  t.trials.push_back({"a", "b", true});
  t.trials.push_back({"a", "c", false});
  TempDir dir;
  SaveTrials(dir.File("t.txt"), t);
  EXPECT_EQ(ReadFile(dir.File("t.txt")), "1\ta\tb\n0\ta\tc\n");
}

int64_t ParseErrorLine(const std::string& text) {
  TempDir dir;
  WriteFile(dir.File("ali.txt"), text);
  try {
    LoadAlignments(dir.File("ali.txt"), PhoneInventory::Default());
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

TEST(FileIoTest, AlignmentErrorsNameTheLine) {
  EXPECT_EQ(ParseErrorLine("u\t0\t2\tAA\nu\t3\t5\tAE\n"), 2);  // gap
  EXPECT_EQ(ParseErrorLine("u\t0\t3\tAA\nu\t2\t5\tAE\n"), 2);  // overlap
  EXPECT_EQ(ParseErrorLine("u\t0\t2\tAA\nu\t2\t4\tQQ\n"), 2);  // unknown label
  EXPECT_EQ(ParseErrorLine("u\t0\t2\n"), 1);                   // malformed
  EXPECT_EQ(ParseErrorLine("u\t0\tx\tAA\n"), 1);
  EXPECT_EQ(ParseErrorLine("u\t1\t2\tAA\n"), 1);               // not at 0
  EXPECT_EQ(ParseErrorLine("u\t0\t0\tAA\n"), 1);               // empty
  EXPECT_EQ(ParseErrorLine("u\t0\t2\tAA\nu\t2\t4\tAE\n"), -1);
}

TEST(FileIoTest, MissingFileIsAnIoError) {
  EXPECT_THROW(LoadTrials("/nonexistent/trials.txt"), IoError);
}

TEST(FileIoTest, MalformedTrialAndFeatureFilesThrow) {
  TempDir dir;
  WriteFile(dir.File("t.txt"), "2\ta\tb\n");
  EXPECT_THROW(LoadTrials(dir.File("t.txt")), ParseError);
  WriteFile(dir.File("t.txt"), "1\ta\ta\n");
  EXPECT_THROW(LoadTrials(dir.File("t.txt")), ParseError);
  WriteFile(dir.File("f.txt"), "u s 2 2\n1 2\n3\n");
  EXPECT_THROW(LoadFeatures(dir.File("f.txt")), ParseError);
}

TEST(AlignmentTest, ValidateChecksLengthAndRange) {
  PhoneAlignment a{"u", {{0, 2, 0}, {2, 5, 1}}};
  EXPECT_NO_THROW(a.Validate(5, 2));
  EXPECT_THROW(a.Validate(6, 2), DimensionError);
  EXPECT_THROW(a.Validate(5, 1), DimensionError);
  EXPECT_EQ(a.FramePhones(), (std::vector<int>{0, 0, 1, 1, 1}));
}

}  // namespace
}  // namespace expo
