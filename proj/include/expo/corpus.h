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

#ifndef EXPO_CORPUS_H_
#define EXPO_CORPUS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "expo/common.h"

namespace expo {

// Ordered phone labels; the position of a label is its phone index. The last
// entry is the non-verbal label by convention.
class PhoneInventory {
 public:
  explicit PhoneInventory(std::vector<std::string> labels);

  // 39 CMU phones followed by "[N-V]".
  static PhoneInventory Default();

  int Size() const { return static_cast<int>(labels_.size()); }
  const std::string& Label(int index) const { return labels_.at(index); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<int> IndexOf(const std::string& label) const;
  int NonVerbalIndex() const { return Size() - 1; }

  // New inventory with extra labels appended after the existing ones.
  PhoneInventory Extended(const std::vector<std::string>& extra) const;

  bool operator==(const PhoneInventory& other) const {
    return labels_ == other.labels_;
  }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
};

struct UtteranceFeatures {
  std::string utterance_id;
  std::string speaker_id;
  Matrix features;  // T x F

  int64_t NumFrames() const { return features.rows(); }
  int64_t Dim() const { return features.cols(); }
};

// [start_frame, end_frame) labelled with one phone index.
struct Segment {
  int64_t start_frame = 0;
  int64_t end_frame = 0;
  int phone = 0;

  int64_t Length() const { return end_frame - start_frame; }
  bool operator==(const Segment&) const = default;
};

struct PhoneAlignment {
  std::string utterance_id;
  std::vector<Segment> segments;

  // End of the last segment; 0 for an empty alignment.
  int64_t NumFrames() const;

  // Per-frame phone index, length NumFrames().
  std::vector<int> FramePhones() const;

  // Throws DimensionError unless the segments tile [0, num_frames) in order
  // with phones in [0, inventory_size).
  void Validate(int64_t num_frames, int inventory_size) const;

  bool operator==(const PhoneAlignment&) const = default;
};

struct SpeakerProfile {
  std::string speaker_id;
  Matrix signatures;  // I x F, one characteristic vector per phone
  double noise_std = 0.0;
};

struct Trial {
  std::string enroll_id;
  std::string test_id;
  bool target = false;

  bool operator==(const Trial&) const = default;
};

struct TrialList {
  std::vector<Trial> trials;

  int64_t NumTarget() const;
  int64_t NumNontarget() const;
  bool operator==(const TrialList&) const = default;
};

// Knobs of the synthetic generator. Each speaker's per-phone signature is
//   phone_base[p] + speaker_base[s] + speaker_phone[s][p]
// with independent zero-mean Gaussian parts of the given scales. The
// phone_base part is shared by all speakers.
struct CorpusConfig {
  int n_speakers = 20;
  int utts_per_speaker = 10;
  int feature_dim = 20;
  int min_segment_frames = 2;
  int max_segment_frames = 6;
  int min_phones_per_utt = 20;
  int max_phones_per_utt = 30;
  double noise_std = 0.6;
  double phone_scale = 2.0;
  double speaker_scale = 1.0;
  double speaker_phone_scale = 0.5;
  // Relative draw weight per phone index; empty means uniform.
  std::vector<double> phone_weights;
  uint64_t seed = 1;

  void Validate(int inventory_size) const;
};

struct CorpusSplit;

struct Corpus {
  PhoneInventory inventory = PhoneInventory::Default();
  std::vector<UtteranceFeatures> utterances;
  std::vector<PhoneAlignment> alignments;  // parallel to utterances
  std::vector<SpeakerProfile> profiles;

  // Index of an utterance by id; throws Error if unknown.
  size_t IndexOf(const std::string& utterance_id) const;
  bool Contains(const std::string& utterance_id) const;

  // Speaker ids in first-appearance order, and utterance indices per speaker.
  std::vector<std::string> SpeakerIds() const;
  std::map<std::string, std::vector<size_t>> UtterancesBySpeaker() const;

  // Subset holding only the given speakers (profiles kept when available).
  Corpus SelectSpeakers(const std::vector<std::string>& speaker_ids) const;

  // Splits every speaker's utterances (in corpus order) into the first
  // n_first and the rest; profiles are copied to both halves.
  CorpusSplit SplitPerSpeaker(int n_first) const;

  // Checks alignment/feature pairing and every alignment invariant.
  void Validate() const;

  void RebuildIndex();

 private:
  std::unordered_map<std::string, size_t> index_;
};

// Deterministic synthetic corpus. Speaker s uses its own seed stream, so the
// first n speakers of a larger corpus equal the corpus generated with n.
struct CorpusSplit {
  Corpus first;
  Corpus second;
};

Corpus GenerateCorpus(const CorpusConfig& config,
                      const PhoneInventory& inventory);

// Random trials: n_target same-speaker and n_nontarget cross-speaker pairs,
// sampled with replacement over speakers and utterances.
TrialList MakeTrials(const Corpus& corpus, int64_t n_target,
                     int64_t n_nontarget, uint64_t seed);

// One target and one non-target trial per utterance, the utterance being
// the enrollment side of both.
TrialList MakePerUtteranceTrials(const Corpus& corpus, uint64_t seed);

// Throws ConfigError if a trial references an unknown id or pairs an
// utterance with itself.
void ValidateTrials(const TrialList& trials, const Corpus& corpus);

// --- File formats -----------------------------------------------------------
// Inventory:  one label per line.
// Alignment:  utt_id<TAB>start_frame<TAB>end_frame<TAB>phone_label
// Trials:     label(1|0)<TAB>enroll_utt_id<TAB>test_utt_id
// Features:   "utt_id speaker_id T F" header followed by T rows of F values.

void SaveInventory(const std::string& path, const PhoneInventory& inventory);
PhoneInventory LoadInventory(const std::string& path);

void SaveAlignments(const std::string& path,
                    const std::vector<PhoneAlignment>& alignments,
                    const PhoneInventory& inventory);
std::vector<PhoneAlignment> LoadAlignments(const std::string& path,
                                           const PhoneInventory& inventory);

void SaveTrials(const std::string& path, const TrialList& trials);
TrialList LoadTrials(const std::string& path);

void SaveFeatures(const std::string& path,
                  const std::vector<UtteranceFeatures>& utterances);
std::vector<UtteranceFeatures> LoadFeatures(const std::string& path);

// Pairs features with alignments by utterance id and validates coverage.
Corpus AssembleCorpus(const PhoneInventory& inventory,
                      std::vector<UtteranceFeatures> utterances,
                      const std::vector<PhoneAlignment>& alignments);

}  // namespace expo

#endif  // EXPO_CORPUS_H_
