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

// Frame-level encoder: a stack of TDNN-style context-window affine layers.
// Layer l maps frame t to
//   act(W_l * [x(t + o_1); ...; x(t + o_C)] + b_l)
// where out-of-range frames are clamped to the first / last frame.

#ifndef EXPO_ENCODER_H_
#define EXPO_ENCODER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "expo/common.h"
#include "expo/corpus.h"

namespace expo {

enum class Nonlinearity { kIdentity, kRelu };

const char* NonlinearityName(Nonlinearity n);
Nonlinearity ParseNonlinearity(const std::string& name);

struct LayerSpec {
  std::vector<int> context = {0};
  int output_dim = 1;
  Nonlinearity nonlinearity = Nonlinearity::kIdentity;

  bool operator==(const LayerSpec&) const = default;
};

struct EncoderConfig {
  int input_dim = 1;
  std::vector<LayerSpec> layers;

  int OutputDim() const { return layers.empty() ? 0 : layers.back().output_dim; }
  int FanIn(size_t layer) const;
  void Validate() const;

  // Desk-scale default: one ReLU context layer then a linear frame layer.
  static EncoderConfig Default(int input_dim, int output_dim = 16);

  // Compact text form, e.g. "-1,0,1:32:relu|0:16:identity".
  std::string LayersToString() const;
  static std::vector<LayerSpec> ParseLayers(const std::string& text);

  bool operator==(const EncoderConfig&) const = default;
};

struct AffineParams {
  Matrix weight;  // output_dim x (context * input_dim)
  Vector bias;    // output_dim
};

struct EncoderParams {
  EncoderConfig config;
  std::vector<AffineParams> layers;

  void CheckShapes() const;
};

struct FrameEmbeddingSequence {
  std::string utterance_id;
  Matrix embeddings;  // T x D1
};

// Scaled uniform init: weights in [-1/sqrt(fan_in), 1/sqrt(fan_in)], zero
// biases. Deterministic per seed.
EncoderParams InitEncoderParams(const EncoderConfig& config, uint64_t seed);

// Intermediate values kept for the backward pass.
struct EncoderTrace {
  std::vector<Matrix> spliced;  // per layer: T x (C * in)
  std::vector<Matrix> pre;      // per layer: T x out, before nonlinearity
  Matrix output;                // T x D1
};

EncoderTrace EncodeWithTrace(const EncoderParams& params,
                             const Matrix& features);

FrameEmbeddingSequence EncodeFrames(const EncoderParams& params,
                                    const UtteranceFeatures& feats);

struct EncoderGradients {
  std::vector<AffineParams> layers;
  Matrix input;  // T x F

  // Zero gradients shaped like params (input left empty).
  static EncoderGradients ZerosLike(const EncoderParams& params);
  void Accumulate(const EncoderGradients& other);
};

// Gradients of sum(output .* upstream) w.r.t. parameters and input.
EncoderGradients EncodeBackward(const EncoderParams& params,
                                const EncoderTrace& trace,
                                const Matrix& upstream);
EncoderGradients EncodeBackward(const EncoderParams& params,
                                const UtteranceFeatures& feats,
                                const Matrix& upstream);

}  // namespace expo

#endif  // EXPO_ENCODER_H_
