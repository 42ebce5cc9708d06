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

#include "expo/trait_layer.h"

#include <cmath>

#include "expo/rng.h"

namespace expo {

int PhoneticTraitSet::NumPresent() const {
  int n = 0;
  for (bool p : present) n += p ? 1 : 0;
  return n;
}

bool PhoneticTraitSet::MaskConsistent() const {
  if (traits.rows() != static_cast<Eigen::Index>(present.size())) return false;
  for (size_t i = 0; i < present.size(); ++i) {
    const bool nonzero = (traits.row(i).array() != 0.0).any();
    if (nonzero != present[i]) return false;
  }
  return true;
}

ProjectionParams InitProjectionParams(int trait_dim, int embedding_dim,
                                      uint64_t seed) {
  if (trait_dim < 1 || embedding_dim < 1) {
    throw ConfigError("projection dims must be >= 1");
  }
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(2.0 * trait_dim);
  ProjectionParams proj;
  proj.weight.resize(embedding_dim, 2 * trait_dim);
  for (Eigen::Index i = 0; i < proj.weight.size(); ++i) {
    proj.weight.data()[i] = rng.Uniform(-scale, scale);
  }
  proj.bias = Vector::Zero(embedding_dim);
  return proj;
}

PhoneticTraitSet ExtractTraits(const FrameEmbeddingSequence& frames,
                               const PhoneAlignment& align, int num_phones) {
  const Matrix& emb = frames.embeddings;
  align.Validate(emb.rows(), num_phones);
  PhoneticTraitSet ts;
  ts.utterance_id = frames.utterance_id;
  ts.traits = Matrix::Zero(num_phones, emb.cols());
  ts.present.assign(num_phones, false);
  ts.frame_counts.assign(num_phones, 0);
  for (const Segment& seg : align.segments) {
    ts.traits.row(seg.phone) +=
        emb.middleRows(seg.start_frame, seg.Length()).colwise().sum();
    ts.frame_counts[seg.phone] += seg.Length();
  }
  for (int i = 0; i < num_phones; ++i) {
    if (ts.frame_counts[i] > 0) {
      ts.present[i] = true;
      ts.traits.row(i) /= static_cast<double>(ts.frame_counts[i]);
    }
  }
  return ts;
}

FilteredTraits FilterTraits(const PhoneticTraitSet& traits) {
  FilteredTraits out;
  for (int i = 0; i < traits.NumPhones(); ++i) {
    if (traits.present[i]) out.kept.push_back(i);
  }
  if (out.kept.empty()) {
    throw EmptyUtteranceError("utterance " + traits.utterance_id +
                              " has no present phonetic trait");
  }
  out.rows.resize(static_cast<Eigen::Index>(out.kept.size()),
                  traits.traits.cols());
  for (size_t n = 0; n < out.kept.size(); ++n) {
    out.rows.row(n) = traits.traits.row(out.kept[n]);
  }
  return out;
}

Vector PoolStatistics(const Matrix& rows) {
  if (rows.rows() < 1) throw EmptyUtteranceError("pooling over zero traits");
  const Eigen::Index dim = rows.cols();
  const double n = static_cast<double>(rows.rows());
  const Vector mean = rows.colwise().mean().transpose();
  const Matrix centered = rows.rowwise() - mean.transpose();
  const Vector var = centered.array().square().colwise().sum().transpose() / n;
  Vector stats(2 * dim);
  stats.head(dim) = mean;
  stats.tail(dim) = (var.array() + kPoolEpsilon).sqrt().matrix();
  return stats;
}

SpeakerEmbedding PoolAndProject(const FilteredTraits& filtered,
                                const ProjectionParams& proj,
                                const std::string& utterance_id) {
  const Vector stats = PoolStatistics(filtered.rows);
  if (proj.InputDim() != stats.size() || proj.bias.size() != proj.OutputDim()) {
    throw DimensionError("projection expects input dim " +
                         std::to_string(proj.InputDim()) + ", got " +
                         std::to_string(stats.size()));
  }
  return {utterance_id, proj.weight * stats + proj.bias};
}

UtteranceForward ForwardUtterance(const EncoderParams& encoder,
                                  const ProjectionParams& proj,
                                  const UtteranceFeatures& feats,
                                  const PhoneAlignment& align, int num_phones) {
  UtteranceForward fwd;
  fwd.encoder = EncodeWithTrace(encoder, feats.features);
  fwd.traits = ExtractTraits({feats.utterance_id, fwd.encoder.output}, align,
                             num_phones);
  fwd.filtered = FilterTraits(fwd.traits);
  fwd.stats = PoolStatistics(fwd.filtered.rows);
  if (proj.InputDim() != fwd.stats.size()) {
    throw DimensionError("projection input dim does not match 2 * D1");
  }
  fwd.embedding = {feats.utterance_id, proj.weight * fwd.stats + proj.bias};
  return fwd;
}

TraitLayerGradients TraitLayerBackward(const UtteranceForward& fwd,
                                       const PhoneAlignment& align,
                                       const ProjectionParams& proj,
                                       const Vector& grad_embedding,
                                       const Matrix& grad_traits) {
  const Matrix& rows = fwd.filtered.rows;
  const Eigen::Index n_rows = rows.rows();
  const Eigen::Index dim = rows.cols();
  const int num_phones = fwd.traits.NumPhones();
  if (grad_embedding.size() != proj.OutputDim()) {
    throw DimensionError("embedding gradient has wrong length");
  }
  const bool has_direct = grad_traits.size() > 0;
  if (has_direct &&
      (grad_traits.rows() != num_phones || grad_traits.cols() != dim)) {
    throw DimensionError("trait gradient must be I x D1");
  }

  TraitLayerGradients grads;
  grads.proj.weight = grad_embedding * fwd.stats.transpose();
  grads.proj.bias = grad_embedding;

  // d stats, then through mean and std to the filtered rows.
  const Vector grad_stats = proj.weight.transpose() * grad_embedding;
  const Vector mean = fwd.stats.head(dim);
  const Vector std = fwd.stats.tail(dim);
  const double n = static_cast<double>(n_rows);
  Matrix grad_rows(n_rows, dim);
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    for (Eigen::Index d = 0; d < dim; ++d) {
      grad_rows(r, d) = grad_stats(d) / n +
                        grad_stats(dim + d) * (rows(r, d) - mean(d)) / (n * std(d));
    }
  }

  grads.traits = Matrix::Zero(num_phones, dim);
  for (size_t k = 0; k < fwd.filtered.kept.size(); ++k) {
    const int phone = fwd.filtered.kept[k];
    grads.traits.row(phone) = grad_rows.row(static_cast<Eigen::Index>(k));
    if (has_direct) grads.traits.row(phone) += grad_traits.row(phone);
  }

  grads.frames = Matrix::Zero(fwd.encoder.output.rows(), dim);
  for (const Segment& seg : align.segments) {
    const double count = static_cast<double>(fwd.traits.frame_counts[seg.phone]);
    const auto row = grads.traits.row(seg.phone) / count;
    for (int64_t t = seg.start_frame; t < seg.end_frame; ++t) {
      grads.frames.row(t) = row;
    }
  }
  return grads;
}

}  // namespace expo
