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

// Trait layers: frame embeddings -> per-phone traits -> trait filter ->
// statistics pooling -> linear projection to the speaker embedding.

#ifndef EXPO_TRAIT_LAYER_H_
#define EXPO_TRAIT_LAYER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "expo/common.h"
#include "expo/corpus.h"
#include "expo/encoder.h"

namespace expo {

// Standard deviation is sqrt(var + kPoolEpsilon).
inline constexpr double kPoolEpsilon = 1e-9;

// One trait per phone of the inventory. Absent phones hold the zero row.
struct PhoneticTraitSet {
  std::string utterance_id;
  Matrix traits;              // I x D1
  std::vector<bool> present;  // length I
  std::vector<int64_t> frame_counts;  // frames aligned to each phone

  int NumPhones() const { return static_cast<int>(present.size()); }
  int NumPresent() const;
  // present[i] <=> row i is not the zero vector.
  bool MaskConsistent() const;
};

struct FilteredTraits {
  Matrix rows;             // N x D1, ascending phone index
  std::vector<int> kept;   // phone index of each row
};

struct ProjectionParams {
  Matrix weight;  // D2 x (2 * D1)
  Vector bias;    // D2

  int InputDim() const { return static_cast<int>(weight.cols()); }
  int OutputDim() const { return static_cast<int>(weight.rows()); }
};

struct SpeakerEmbedding {
  std::string utterance_id;
  Vector vector;
};

ProjectionParams InitProjectionParams(int trait_dim, int embedding_dim,
                                      uint64_t seed);

// Duration-weighted mean of the frame embeddings of each phone.
PhoneticTraitSet ExtractTraits(const FrameEmbeddingSequence& frames,
                               const PhoneAlignment& align, int num_phones);

// Drops absent rows. Throws EmptyUtteranceError when nothing is present.
FilteredTraits FilterTraits(const PhoneticTraitSet& traits);

// concat(mean, sqrt(population variance + eps)) over the rows.
Vector PoolStatistics(const Matrix& rows);

SpeakerEmbedding PoolAndProject(const FilteredTraits& filtered,
                                const ProjectionParams& proj,
                                const std::string& utterance_id = "");

// Everything computed for one utterance, kept for the backward pass.
struct UtteranceForward {
  SpeakerEmbedding embedding;
  PhoneticTraitSet traits;
  FilteredTraits filtered;
  Vector stats;
  EncoderTrace encoder;
};

UtteranceForward ForwardUtterance(const EncoderParams& encoder,
                                  const ProjectionParams& proj,
                                  const UtteranceFeatures& feats,
                                  const PhoneAlignment& align, int num_phones);

struct TraitLayerGradients {
  ProjectionParams proj;  // gradients shaped like the projection
  Matrix traits;          // I x D1, total gradient reaching each trait
  Matrix frames;          // T x D1
};

// Back-propagates an embedding gradient (length D2) and a direct trait
// gradient (I x D1, may be empty) back to the frames. Absent traits receive
// no gradient.
TraitLayerGradients TraitLayerBackward(const UtteranceForward& fwd,
                                       const PhoneAlignment& align,
                                       const ProjectionParams& proj,
                                       const Vector& grad_embedding,
                                       const Matrix& grad_traits);

}  // namespace expo

#endif  // EXPO_TRAIT_LAYER_H_
