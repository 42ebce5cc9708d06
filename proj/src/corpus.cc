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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "expo/rng.h"
#include "expo/text_io.h"

namespace expo {

namespace {

// Seed stream layout inside one generator seed.
constexpr uint64_t kPhoneBaseStream = 1;
constexpr uint64_t kSpeakerStreamBase = 1000;
constexpr uint64_t kUtteranceStreamBase = 1ULL << 32;

std::string SpeakerName(int s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "spk%03d", s);
  return buf;
}

std::string UtteranceName(int s, int u) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "spk%03d-utt%03d", s, u);
  return buf;
}

Vector GaussianVector(Rng* rng, int dim, double scale) {
  Vector v(dim);
  for (int d = 0; d < dim; ++d) v(d) = scale * rng->Normal();
  return v;
}

// Draws an index from the (unnormalised) weights by inverse CDF.
int DrawWeighted(Rng* rng, const std::vector<double>& cumulative) {
  const double u = rng->Uniform() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  return static_cast<int>(it - cumulative.begin());
}

}  // namespace

// --- PhoneInventory -------------------------------------------------------

PhoneInventory::PhoneInventory(std::vector<std::string> labels)
    : labels_(std::move(labels)) {
  if (labels_.size() < 2) {
    throw ConfigError("phone inventory needs at least 2 labels");
  }
  for (size_t i = 0; i < labels_.size(); ++i) {
    const std::string& label = labels_[i];
    if (label.empty() ||
        label.find_first_of(" \t\r\n") != std::string::npos) {
      throw ConfigError("invalid phone label '" + label + "'");
    }
    if (!index_.emplace(label, static_cast<int>(i)).second) {
      throw ConfigError("duplicate phone label '" + label + "'");
    }
  }
}

PhoneInventory PhoneInventory::Default() {
  return PhoneInventory({"AA", "AE", "AH", "AO", "AW", "AY", "B",  "CH",
                         "D",  "DH", "EH", "ER", "EY", "F",  "G",  "HH",
                         "IH", "IY", "JH", "K",  "L",  "M",  "N",  "NG",
                         "OW", "OY", "P",  "R",  "S",  "SH", "T",  "TH",
                         "UH", "UW", "V",  "W",  "Y",  "Z",  "ZH", "[N-V]"});
}

std::optional<int> PhoneInventory::IndexOf(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

PhoneInventory PhoneInventory::Extended(
    const std::vector<std::string>& extra) const {
  std::vector<std::string> labels = labels_;
  labels.insert(labels.end(), extra.begin(), extra.end());
  return PhoneInventory(std::move(labels));
}

// --- PhoneAlignment ---------------------------------------------------------

int64_t PhoneAlignment::NumFrames() const {
  return segments.empty() ? 0 : segments.back().end_frame;
}

std::vector<int> PhoneAlignment::FramePhones() const {
  std::vector<int> phones(static_cast<size_t>(NumFrames()), -1);
  for (const Segment& seg : segments) {
    for (int64_t t = seg.start_frame; t < seg.end_frame; ++t) {
      phones[static_cast<size_t>(t)] = seg.phone;
    }
  }
  return phones;
}

void PhoneAlignment::Validate(int64_t num_frames, int inventory_size) const {
  const std::string where = "alignment of " + utterance_id + ": ";
  if (segments.empty()) throw DimensionError(where + "no segments");
  int64_t expected_start = 0;
  for (const Segment& seg : segments) {
    if (seg.Length() <= 0) throw DimensionError(where + "empty segment");
    if (seg.start_frame != expected_start) {
      throw DimensionError(where + (seg.start_frame < expected_start
                                        ? "overlapping segments"
                                        : "gap between segments"));
    }
    if (seg.phone < 0 || seg.phone >= inventory_size) {
      throw DimensionError(where + "phone index out of range");
    }
    expected_start = seg.end_frame;
  }
  if (expected_start != num_frames) {
    throw DimensionError(where + "covers " + std::to_string(expected_start) +
                         " frames, utterance has " +
                         std::to_string(num_frames));
  }
}

int64_t TrialList::NumTarget() const {
  return std::count_if(trials.begin(), trials.end(),
                       [](const Trial& t) { return t.target; });
}

int64_t TrialList::NumNontarget() const {
  return static_cast<int64_t>(trials.size()) - NumTarget();
}

// --- CorpusConfig / Corpus --------------------------------------------------

void CorpusConfig::Validate(int inventory_size) const {
  if (n_speakers < 1) throw ConfigError("n_speakers must be >= 1");
  if (utts_per_speaker < 1) throw ConfigError("utts_per_speaker must be >= 1");
  if (feature_dim < 1) throw ConfigError("feature_dim must be >= 1");
  if (min_segment_frames < 1 || max_segment_frames < min_segment_frames) {
    throw ConfigError("invalid segment length range");
  }
  if (min_phones_per_utt < 1 || max_phones_per_utt < min_phones_per_utt) {
    throw ConfigError("invalid phones-per-utterance range");
  }
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
    throw ConfigError("noise_std must be finite and >= 0");
  }
  if (!(phone_scale >= 0.0) || !(speaker_scale >= 0.0) ||
      !(speaker_phone_scale >= 0.0)) {
    throw ConfigError("signature scales must be >= 0");
  }
  if (!phone_weights.empty()) {
    if (static_cast<int>(phone_weights.size()) != inventory_size) {
      throw ConfigError("phone_weights must have one entry per phone");
    }
    double total = 0.0;
    for (double w : phone_weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw ConfigError("phone_weights must be finite and >= 0");
      }
      total += w;
    }
    if (total <= 0.0) throw ConfigError("phone_weights sum to zero");
  }
}

void Corpus::RebuildIndex() {
  index_.clear();
  for (size_t i = 0; i < utterances.size(); ++i) {
    if (!index_.emplace(utterances[i].utterance_id, i).second) {
      throw ConfigError("duplicate utterance id " +
                        utterances[i].utterance_id);
    }
  }
}

size_t Corpus::IndexOf(const std::string& utterance_id) const {
  auto it = index_.find(utterance_id);
  if (it == index_.end()) throw Error("unknown utterance id " + utterance_id);
  return it->second;
}

bool Corpus::Contains(const std::string& utterance_id) const {
  return index_.count(utterance_id) > 0;
}

std::vector<std::string> Corpus::SpeakerIds() const {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const auto& utt : utterances) {
    if (seen.insert(utt.speaker_id).second) ids.push_back(utt.speaker_id);
  }
  return ids;
}

std::map<std::string, std::vector<size_t>> Corpus::UtterancesBySpeaker()
    const {
  std::map<std::string, std::vector<size_t>> by_speaker;
  for (size_t i = 0; i < utterances.size(); ++i) {
    by_speaker[utterances[i].speaker_id].push_back(i);
  }
  return by_speaker;
}

Corpus Corpus::SelectSpeakers(
    const std::vector<std::string>& speaker_ids) const {
  std::set<std::string> keep(speaker_ids.begin(), speaker_ids.end());
  Corpus out;
  out.inventory = inventory;
  for (size_t i = 0; i < utterances.size(); ++i) {
    if (keep.count(utterances[i].speaker_id)) {
      out.utterances.push_back(utterances[i]);
      out.alignments.push_back(alignments[i]);
    }
  }
  for (const auto& p : profiles) {
    if (keep.count(p.speaker_id)) out.profiles.push_back(p);
  }
  out.RebuildIndex();
  return out;
}

CorpusSplit Corpus::SplitPerSpeaker(int n_first) const {
  if (n_first < 1) throw ConfigError("split needs n_first >= 1");
  std::map<std::string, int> seen;
  CorpusSplit split;
  split.first.inventory = inventory;
  split.second.inventory = inventory;
  for (size_t i = 0; i < utterances.size(); ++i) {
    Corpus& dst =
        seen[utterances[i].speaker_id]++ < n_first ? split.first : split.second;
    dst.utterances.push_back(utterances[i]);
    dst.alignments.push_back(alignments[i]);
  }
  split.first.profiles = profiles;
  split.second.profiles = profiles;
  split.first.RebuildIndex();
  split.second.RebuildIndex();
  return split;
}

void Corpus::Validate() const {
  if (alignments.size() != utterances.size()) {
    throw DimensionError("corpus has " + std::to_string(utterances.size()) +
                         " utterances but " +
                         std::to_string(alignments.size()) + " alignments");
  }
  for (size_t i = 0; i < utterances.size(); ++i) {
    const auto& utt = utterances[i];
    if (alignments[i].utterance_id != utt.utterance_id) {
      throw DimensionError("alignment order does not match utterance " +
                           utt.utterance_id);
    }
    if (utt.NumFrames() < 1 || utt.Dim() < 1) {
      throw DimensionError("utterance " + utt.utterance_id + " is empty");
    }
    if (!utt.features.allFinite()) {
      throw NumericError("non-finite feature in " + utt.utterance_id);
    }
    alignments[i].Validate(utt.NumFrames(), inventory.Size());
  }
}

// --- Generation -------------------------------------------------------------

Corpus GenerateCorpus(const CorpusConfig& config,
                      const PhoneInventory& inventory) {
  const int num_phones = inventory.Size();
  config.Validate(num_phones);
  const int dim = config.feature_dim;

  std::vector<double> cumulative(num_phones);
  {
    double acc = 0.0;
    for (int p = 0; p < num_phones; ++p) {
      acc += config.phone_weights.empty() ? 1.0 : config.phone_weights[p];
      cumulative[p] = acc;
    }
  }

  Rng base_rng(DeriveSeed(config.seed, kPhoneBaseStream));
  Matrix phone_base(num_phones, dim);
  for (int p = 0; p < num_phones; ++p) {
    phone_base.row(p) = GaussianVector(&base_rng, dim, config.phone_scale);
  }

  Corpus corpus;
  corpus.inventory = inventory;
  for (int s = 0; s < config.n_speakers; ++s) {
    Rng spk_rng(DeriveSeed(config.seed, kSpeakerStreamBase + s));
    SpeakerProfile profile;
    profile.speaker_id = SpeakerName(s);
    profile.noise_std = config.noise_std;
    const Vector speaker_base =
        GaussianVector(&spk_rng, dim, config.speaker_scale);
    profile.signatures.resize(num_phones, dim);
    for (int p = 0; p < num_phones; ++p) {
      profile.signatures.row(p) =
          phone_base.row(p) + speaker_base.transpose() +
          GaussianVector(&spk_rng, dim, config.speaker_phone_scale)
              .transpose();
    }

    for (int u = 0; u < config.utts_per_speaker; ++u) {
      const uint64_t stream = kUtteranceStreamBase +
                              static_cast<uint64_t>(s) * 65536 +
                              static_cast<uint64_t>(u);
      Rng rng(DeriveSeed(config.seed, stream));
      PhoneAlignment align;
      align.utterance_id = UtteranceName(s, u);
      const int n_segments = static_cast<int>(rng.IntInRange(
          config.min_phones_per_utt, config.max_phones_per_utt));
      int64_t t = 0;
      for (int k = 0; k < n_segments; ++k) {
        Segment seg;
        seg.phone = DrawWeighted(&rng, cumulative);
        seg.start_frame = t;
        seg.end_frame = t + rng.IntInRange(config.min_segment_frames,
                                           config.max_segment_frames);
        t = seg.end_frame;
        align.segments.push_back(seg);
      }
      UtteranceFeatures utt;
      utt.utterance_id = align.utterance_id;
      utt.speaker_id = profile.speaker_id;
      utt.features.resize(t, dim);
      for (const Segment& seg : align.segments) {
        for (int64_t f = seg.start_frame; f < seg.end_frame; ++f) {
          for (int d = 0; d < dim; ++d) {
            utt.features(f, d) = profile.signatures(seg.phone, d) +
                                 config.noise_std * rng.Normal();
          }
        }
      }
      corpus.utterances.push_back(std::move(utt));
      corpus.alignments.push_back(std::move(align));
    }
    corpus.profiles.push_back(std::move(profile));
  }
  corpus.RebuildIndex();
  return corpus;
}

// --- Trials -------------------------------------------------------------------

namespace {

struct SpeakerPools {
  std::vector<std::vector<size_t>> utts;  // per speaker, in corpus order
  std::vector<size_t> with_pairs;         // speakers having >= 2 utterances
};

SpeakerPools BuildPools(const Corpus& corpus) {
  SpeakerPools pools;
  for (const std::string& spk : corpus.SpeakerIds()) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < corpus.utterances.size(); ++i) {
      if (corpus.utterances[i].speaker_id == spk) idx.push_back(i);
    }
    if (idx.size() >= 2) pools.with_pairs.push_back(pools.utts.size());
    pools.utts.push_back(std::move(idx));
  }
  return pools;
}

}  // namespace

TrialList MakeTrials(const Corpus& corpus, int64_t n_target,
                     int64_t n_nontarget, uint64_t seed) {
  if (n_target < 0 || n_nontarget < 0) {
    throw ConfigError("trial counts must be >= 0");
  }
  const SpeakerPools pools = BuildPools(corpus);
  if (n_target > 0 && pools.with_pairs.empty()) {
    throw ConfigError("target trials need a speaker with >= 2 utterances");
  }
  if (n_nontarget > 0 && pools.utts.size() < 2) {
    throw ConfigError("non-target trials need >= 2 speakers");
  }
  Rng rng(seed);
  TrialList list;
  const auto& utts = corpus.utterances;
  for (int64_t n = 0; n < n_target; ++n) {
    const auto& pool =
        pools.utts[pools.with_pairs[rng.Index(pools.with_pairs.size())]];
    const size_t a = rng.Index(pool.size());
    size_t b = rng.Index(pool.size() - 1);
    if (b >= a) ++b;
    list.trials.push_back(
        {utts[pool[a]].utterance_id, utts[pool[b]].utterance_id, true});
  }
  for (int64_t n = 0; n < n_nontarget; ++n) {
    const size_t sa = rng.Index(pools.utts.size());
    size_t sb = rng.Index(pools.utts.size() - 1);
    if (sb >= sa) ++sb;
    const auto& pa = pools.utts[sa];
    const auto& pb = pools.utts[sb];
    list.trials.push_back({utts[pa[rng.Index(pa.size())]].utterance_id,
                           utts[pb[rng.Index(pb.size())]].utterance_id,
                           false});
  }
  // Fisher-Yates shuffle.
  for (size_t i = list.trials.size(); i > 1; --i) {
    std::swap(list.trials[i - 1], list.trials[rng.Index(i)]);
  }
  return list;
}

TrialList MakePerUtteranceTrials(const Corpus& corpus, uint64_t seed) {
  const SpeakerPools pools = BuildPools(corpus);
  if (pools.utts.size() < 2) {
    throw ConfigError("non-target trials need >= 2 speakers");
  }
  std::vector<size_t> speaker_of(corpus.utterances.size());
  for (size_t s = 0; s < pools.utts.size(); ++s) {
    if (pools.utts[s].size() < 2) {
      throw ConfigError("every speaker needs >= 2 utterances");
    }
    for (size_t i : pools.utts[s]) speaker_of[i] = s;
  }
  Rng rng(seed);
  TrialList list;
  const auto& utts = corpus.utterances;
  for (size_t i = 0; i < utts.size(); ++i) {
    const auto& own = pools.utts[speaker_of[i]];
    size_t j;
    do {
      j = own[rng.Index(own.size())];
    } while (j == i);
    list.trials.push_back({utts[i].utterance_id, utts[j].utterance_id, true});
    size_t other = rng.Index(pools.utts.size() - 1);
    if (other >= speaker_of[i]) ++other;
    const auto& pool = pools.utts[other];
    list.trials.push_back({utts[i].utterance_id,
                           utts[pool[rng.Index(pool.size())]].utterance_id,
                           false});
  }
  return list;
}

void ValidateTrials(const TrialList& trials, const Corpus& corpus) {
  for (const Trial& t : trials.trials) {
    if (!corpus.Contains(t.enroll_id)) {
      throw ConfigError("trial references unknown utterance " + t.enroll_id);
    }
    if (!corpus.Contains(t.test_id)) {
      throw ConfigError("trial references unknown utterance " + t.test_id);
    }
    if (t.enroll_id == t.test_id) {
      throw ConfigError("trial pairs " + t.enroll_id + " with itself");
    }
  }
}

// --- File IO ------------------------------------------------------------------

void SaveInventory(const std::string& path, const PhoneInventory& inventory) {
  std::string out;
  for (const auto& label : inventory.labels()) out += label + "\n";
  WriteFileAtomic(path, out);
}

PhoneInventory LoadInventory(const std::string& path) {
  std::vector<std::string> labels;
  const auto lines = ReadLines(path);
  for (size_t n = 0; n < lines.size(); ++n) {
    auto fields = SplitFields(lines[n]);
    if (fields.empty()) continue;
    if (fields.size() != 1) {
      throw ParseError(path, n + 1, "expected one label per line");
    }
    labels.emplace_back(fields[0]);
  }
  try {
    return PhoneInventory(std::move(labels));
  } catch (const ConfigError& e) {
    throw ParseError(path, static_cast<int64_t>(lines.size()), e.what());
  }
}

void SaveAlignments(const std::string& path,
                    const std::vector<PhoneAlignment>& alignments,
                    const PhoneInventory& inventory) {
  std::ostringstream out;
  for (const auto& align : alignments) {
    for (const Segment& seg : align.segments) {
      out << align.utterance_id << '\t' << seg.start_frame << '\t'
          << seg.end_frame << '\t' << inventory.Label(seg.phone) << '\n';
    }
  }
  WriteFileAtomic(path, out.str());
}

std::vector<PhoneAlignment> LoadAlignments(const std::string& path,
                                           const PhoneInventory& inventory) {
  std::vector<PhoneAlignment> result;
  std::set<std::string> finished;
  const auto lines = ReadLines(path);
  for (size_t n = 0; n < lines.size(); ++n) {
    const int64_t line_no = static_cast<int64_t>(n) + 1;
    if (lines[n].empty()) continue;
    auto fields = SplitTabs(lines[n]);
    if (fields.size() != 4) {
      throw ParseError(path, line_no, "expected 4 tab-separated fields");
    }
    const std::string utt(fields[0]);
    auto start = ParseInt(fields[1]);
    auto end = ParseInt(fields[2]);
    if (utt.empty() || !start || !end) {
      throw ParseError(path, line_no, "malformed alignment row");
    }
    auto phone = inventory.IndexOf(std::string(fields[3]));
    if (!phone) {
      throw ParseError(path, line_no,
                       "unknown phone label '" + std::string(fields[3]) + "'");
    }
    if (*end <= *start) throw ParseError(path, line_no, "empty segment");
    if (result.empty() || result.back().utterance_id != utt) {
      if (!result.empty()) finished.insert(result.back().utterance_id);
      if (finished.count(utt)) {
        throw ParseError(path, line_no,
                         "segments of " + utt + " are not contiguous");
      }
      if (*start != 0) {
        throw ParseError(path, line_no, "first segment must start at frame 0");
      }
      result.push_back(PhoneAlignment{utt, {}});
    } else {
      const int64_t prev_end = result.back().segments.back().end_frame;
      if (*start < prev_end) {
        throw ParseError(path, line_no, "overlapping segments");
      }
      if (*start > prev_end) {
        throw ParseError(path, line_no, "gap between segments");
      }
    }
    result.back().segments.push_back(Segment{*start, *end, *phone});
  }
  return result;
}

void SaveTrials(const std::string& path, const TrialList& trials) {
  std::string out;
  for (const Trial& t : trials.trials) {
    out += (t.target ? "1\t" : "0\t") + t.enroll_id + '\t' + t.test_id + '\n';
  }
  WriteFileAtomic(path, out);
}

TrialList LoadTrials(const std::string& path) {
  TrialList list;
  const auto lines = ReadLines(path);
  for (size_t n = 0; n < lines.size(); ++n) {
    const int64_t line_no = static_cast<int64_t>(n) + 1;
    if (lines[n].empty()) continue;
    auto fields = SplitTabs(lines[n]);
    if (fields.size() != 3 || fields[1].empty() || fields[2].empty()) {
      throw ParseError(path, line_no, "expected label<TAB>enroll<TAB>test");
    }
    if (fields[0] != "1" && fields[0] != "0") {
      throw ParseError(path, line_no, "label must be 1 or 0");
    }
    if (fields[1] == fields[2]) {
      throw ParseError(path, line_no, "trial pairs an utterance with itself");
    }
    list.trials.push_back(
        {std::string(fields[1]), std::string(fields[2]), fields[0] == "1"});
  }
  return list;
}

void SaveFeatures(const std::string& path,
                  const std::vector<UtteranceFeatures>& utterances) {
  std::string out;
  for (const auto& utt : utterances) {
    out += utt.utterance_id + ' ' + utt.speaker_id + ' ' +
           std::to_string(utt.NumFrames()) + ' ' +
           std::to_string(utt.Dim()) + '\n';
    for (int64_t t = 0; t < utt.NumFrames(); ++t) {
      for (int64_t d = 0; d < utt.Dim(); ++d) {
        if (d) out += ' ';
        out += FormatDouble(utt.features(t, d));
      }
      out += '\n';
    }
  }
  WriteFileAtomic(path, out);
}

std::vector<UtteranceFeatures> LoadFeatures(const std::string& path) {
  std::vector<UtteranceFeatures> result;
  const auto lines = ReadLines(path);
  size_t n = 0;
  while (n < lines.size()) {
    auto header = SplitFields(lines[n]);
    if (header.empty()) {
      ++n;
      continue;
    }
    const int64_t header_line = static_cast<int64_t>(n) + 1;
    if (header.size() != 4) {
      throw ParseError(path, header_line, "expected 'utt_id speaker_id T F'");
    }
    auto frames = ParseInt(header[2]);
    auto dim = ParseInt(header[3]);
    if (!frames || !dim || *frames < 1 || *dim < 1) {
      throw ParseError(path, header_line, "T and F must be positive integers");
    }
    UtteranceFeatures utt;
    utt.utterance_id = std::string(header[0]);
    utt.speaker_id = std::string(header[1]);
    utt.features.resize(*frames, *dim);
    ++n;
    for (int64_t t = 0; t < *frames; ++t, ++n) {
      if (n >= lines.size()) {
        throw ParseError(path, static_cast<int64_t>(n) + 1,
                         "unexpected end of file in " + utt.utterance_id);
      }
      auto row = SplitFields(lines[n]);
      if (static_cast<int64_t>(row.size()) != *dim) {
        throw ParseError(path, static_cast<int64_t>(n) + 1,
                         "expected " + std::to_string(*dim) + " values");
      }
      for (int64_t d = 0; d < *dim; ++d) {
        auto v = ParseDouble(row[d]);
        if (!v || !std::isfinite(*v)) {
          throw ParseError(path, static_cast<int64_t>(n) + 1,
                           "malformed or non-finite value");
        }
        utt.features(t, d) = *v;
      }
    }
    result.push_back(std::move(utt));
  }
  return result;
}

Corpus AssembleCorpus(const PhoneInventory& inventory,
                      std::vector<UtteranceFeatures> utterances,
                      const std::vector<PhoneAlignment>& alignments) {
  std::unordered_map<std::string, const PhoneAlignment*> by_id;
  for (const auto& a : alignments) by_id[a.utterance_id] = &a;
  Corpus corpus;
  corpus.inventory = inventory;
  for (auto& utt : utterances) {
    auto it = by_id.find(utt.utterance_id);
    if (it == by_id.end()) {
      throw DimensionError("no alignment for utterance " + utt.utterance_id);
    }
    corpus.alignments.push_back(*it->second);
    corpus.utterances.push_back(std::move(utt));
  }
  corpus.RebuildIndex();
  corpus.Validate();
  return corpus;
}

}  // namespace expo
