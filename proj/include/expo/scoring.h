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

#ifndef EXPO_SCORING_H_
#define EXPO_SCORING_H_

#include <optional>
#include <string>
#include <vector>

#include "expo/common.h"
#include "expo/corpus.h"
#include "expo/trait_layer.h"
#include "expo/training.h"

namespace expo {

// Cosine similarity; throws NumericError on a zero-norm input.
double CosineSimilarity(const Eigen::Ref<const Vector>& a,
                        const Eigen::Ref<const Vector>& b);

// The decision statistic: cosine between the two speaker embeddings.
double FinalScore(const SpeakerEmbedding& a, const SpeakerEmbedding& b);

// Per-phone cosine between enrollment and test traits; an entry is defined
// only where the phone is present in both utterances.
struct TraitSimilarityVector {
  std::vector<std::optional<double>> values;

  int Size() const { return static_cast<int>(values.size()); }
  int NumDefined() const;
};

TraitSimilarityVector TraitSimilarity(const PhoneticTraitSet& enroll,
                                      const PhoneticTraitSet& test);

// Mean of the defined entries. Throws UndefinedEvidenceError when the two
// utterances share no phone.
double EvidenceScore(const TraitSimilarityVector& s);

struct ScoreRecord {
  std::string enroll_id;
  std::string test_id;
  std::optional<bool> target;
  double final_score = 0.0;
  std::optional<double> evidence_score;  // absent iff no co-present phone
  TraitSimilarityVector similarity;

  bool operator==(const ScoreRecord& other) const;
};

// Combines embeddings and traits of two utterances into one record.
ScoreRecord ScorePair(const SpeakerEmbedding& enroll_emb,
                      const PhoneticTraitSet& enroll_traits,
                      const SpeakerEmbedding& test_emb,
                      const PhoneticTraitSet& test_traits);

// Scores every trial. With use_cache, each utterance is forwarded once and
// reused; the records are identical either way.
std::vector<ScoreRecord> ScoreTrials(const ModelState& model,
                                     const Corpus& corpus,
                                     const TrialList& trials,
                                     bool use_cache = true);

// enroll<TAB>test<TAB>label<TAB>final<TAB>evidence<TAB>s(0)..s(I-1), with
// "NA" for any undefined value (label too, when unknown).
std::string FormatScoreLine(const ScoreRecord& record);
void SaveScores(const std::string& path,
                const std::vector<ScoreRecord>& records);
std::vector<ScoreRecord> LoadScores(const std::string& path);

}  // namespace expo

#endif  // EXPO_SCORING_H_
