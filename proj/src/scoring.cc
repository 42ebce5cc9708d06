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

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "expo/text_io.h"

namespace expo {

namespace {
constexpr char kNa[] = "NA";
}  // namespace

double CosineSimilarity(const Eigen::Ref<const Vector>& a,
                        const Eigen::Ref<const Vector>& b) {
  if (a.size() != b.size()) throw DimensionError("cosine of unequal lengths");
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) {
    throw NumericError("cosine similarity of a zero-norm vector");
  }
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

double FinalScore(const SpeakerEmbedding& a, const SpeakerEmbedding& b) {
  return CosineSimilarity(a.vector, b.vector);
}

int TraitSimilarityVector::NumDefined() const {
  return static_cast<int>(
      std::count_if(values.begin(), values.end(),
                    [](const auto& v) { return v.has_value(); }));
}

TraitSimilarityVector TraitSimilarity(const PhoneticTraitSet& enroll,
                                      const PhoneticTraitSet& test) {
  if (enroll.NumPhones() != test.NumPhones() ||
      enroll.traits.cols() != test.traits.cols()) {
    throw DimensionError("trait sets differ in inventory size or dim");
  }
  TraitSimilarityVector s;
  s.values.resize(enroll.NumPhones());
  for (int i = 0; i < enroll.NumPhones(); ++i) {
    if (enroll.present[i] && test.present[i]) {
      s.values[i] = CosineSimilarity(enroll.traits.row(i).transpose(),
                                     test.traits.row(i).transpose());
    }
  }
  return s;
}

double EvidenceScore(const TraitSimilarityVector& s) {
  double sum = 0.0;
  int n = 0;
  for (const auto& v : s.values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) {
    throw UndefinedEvidenceError("no phone is present in both utterances");
  }
  return sum / n;
}

bool ScoreRecord::operator==(const ScoreRecord& other) const {
  return enroll_id == other.enroll_id && test_id == other.test_id &&
         target == other.target && final_score == other.final_score &&
         evidence_score == other.evidence_score &&
         similarity.values == other.similarity.values;
}

ScoreRecord ScorePair(const SpeakerEmbedding& enroll_emb,
                      const PhoneticTraitSet& enroll_traits,
                      const SpeakerEmbedding& test_emb,
                      const PhoneticTraitSet& test_traits) {
  ScoreRecord rec;
  rec.enroll_id = enroll_emb.utterance_id;
  rec.test_id = test_emb.utterance_id;
  rec.final_score = FinalScore(enroll_emb, test_emb);
  rec.similarity = TraitSimilarity(enroll_traits, test_traits);
  if (rec.similarity.NumDefined() > 0) {
    rec.evidence_score = EvidenceScore(rec.similarity);
  }
  return rec;
}

std::vector<ScoreRecord> ScoreTrials(const ModelState& model,
                                     const Corpus& corpus,
                                     const TrialList& trials, bool use_cache) {
  model.CheckShapes();
  if (corpus.inventory.Size() != model.num_phones) {
    throw DimensionError("corpus inventory size does not match the model");
  }
  ValidateTrials(trials, corpus);
  struct Cached {
    SpeakerEmbedding embedding;
    PhoneticTraitSet traits;
  };
  std::unordered_map<std::string, Cached> cache;
  auto forward = [&](const std::string& id) -> Cached {
    if (use_cache) {
      auto it = cache.find(id);
      if (it != cache.end()) return it->second;
    }
    const size_t idx = corpus.IndexOf(id);
    UtteranceForward fwd =
        ForwardUtterance(model.encoder, model.projection, corpus.utterances[idx],
                         corpus.alignments[idx], model.num_phones);
    Cached c{std::move(fwd.embedding), std::move(fwd.traits)};
    if (use_cache) cache.emplace(id, c);
    return c;
  };

  std::vector<ScoreRecord> records;
  records.reserve(trials.trials.size());
  for (const Trial& trial : trials.trials) {
    const Cached e = forward(trial.enroll_id);
    const Cached t = forward(trial.test_id);
    ScoreRecord rec = ScorePair(e.embedding, e.traits, t.embedding, t.traits);
    rec.enroll_id = trial.enroll_id;
    rec.test_id = trial.test_id;
    rec.target = trial.target;
    records.push_back(std::move(rec));
  }
  return records;
}

std::string FormatScoreLine(const ScoreRecord& r) {
  std::string line = r.enroll_id + '\t' + r.test_id + '\t';
  line += r.target ? (*r.target ? "1" : "0") : kNa;
  line += '\t' + FormatDouble(r.final_score) + '\t';
  line += r.evidence_score ? FormatDouble(*r.evidence_score) : kNa;
  for (const auto& v : r.similarity.values) {
    line += '\t';
    line += v ? FormatDouble(*v) : kNa;
  }
  return line;
}

void SaveScores(const std::string& path,
                const std::vector<ScoreRecord>& records) {
  std::string out;
  for (const auto& r : records) out += FormatScoreLine(r) + '\n';
  WriteFileAtomic(path, out);
}

std::vector<ScoreRecord> LoadScores(const std::string& path) {
  std::vector<ScoreRecord> records;
  const auto lines = ReadLines(path);
  int64_t width = -1;
  for (size_t n = 0; n < lines.size(); ++n) {
    const int64_t line_no = static_cast<int64_t>(n) + 1;
    if (lines[n].empty()) continue;
    auto f = SplitTabs(lines[n]);
    if (f.size() < 6) {
      throw ParseError(path, line_no, "expected at least 6 tab-separated fields");
    }
    if (width < 0) width = static_cast<int64_t>(f.size());
    if (static_cast<int64_t>(f.size()) != width) {
      throw ParseError(path, line_no, "row width differs from the first row");
    }
    ScoreRecord r;
    r.enroll_id = std::string(f[0]);
    r.test_id = std::string(f[1]);
    if (f[2] == "1") {
      r.target = true;
    } else if (f[2] == "0") {
      r.target = false;
    } else if (f[2] != kNa) {
      throw ParseError(path, line_no, "label must be 1, 0 or NA");
    }
    auto final_score = ParseDouble(f[3]);
    if (!final_score) throw ParseError(path, line_no, "malformed final score");
    r.final_score = *final_score;
    if (f[4] != kNa) {
      auto ev = ParseDouble(f[4]);
      if (!ev) throw ParseError(path, line_no, "malformed evidence score");
      r.evidence_score = *ev;
    }
    for (size_t i = 5; i < f.size(); ++i) {
      if (f[i] == kNa) {
        r.similarity.values.emplace_back();
        continue;
      }
      auto v = ParseDouble(f[i]);
      if (!v) throw ParseError(path, line_no, "malformed similarity value");
      r.similarity.values.emplace_back(*v);
    }
    if (r.evidence_score.has_value() != (r.similarity.NumDefined() > 0)) {
      throw ParseError(path, line_no,
                       "evidence must be NA exactly when no similarity is defined");
    }
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace expo
