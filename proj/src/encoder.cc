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

#include "expo/encoder.h"

#include <algorithm>
#include <cmath>

#include "expo/rng.h"
#include "expo/text_io.h"

namespace expo {

const char* NonlinearityName(Nonlinearity n) {
  return n == Nonlinearity::kRelu ? "relu" : "identity";
}

Nonlinearity ParseNonlinearity(const std::string& name) {
  if (name == "relu") return Nonlinearity::kRelu;
  if (name == "identity") return Nonlinearity::kIdentity;
  throw ConfigError("unknown nonlinearity '" + name + "'");
}

int EncoderConfig::FanIn(size_t layer) const {
  const int in = layer == 0 ? input_dim : layers[layer - 1].output_dim;
  return static_cast<int>(layers[layer].context.size()) * in;
}

void EncoderConfig::Validate() const {
  if (input_dim < 1) throw ConfigError("encoder input_dim must be >= 1");
  if (layers.empty()) throw ConfigError("encoder needs at least one layer");
  for (const auto& spec : layers) {
    if (spec.output_dim < 1) throw ConfigError("layer output_dim must be >= 1");
    if (spec.context.empty()) throw ConfigError("layer context is empty");
    if (!std::is_sorted(spec.context.begin(), spec.context.end()) ||
        std::adjacent_find(spec.context.begin(), spec.context.end()) !=
            spec.context.end()) {
      throw ConfigError("layer context offsets must be strictly increasing");
    }
  }
}

EncoderConfig EncoderConfig::Default(int input_dim, int output_dim) {
  EncoderConfig config;
  config.input_dim = input_dim;
  config.layers = {{{-1, 0, 1}, 32, Nonlinearity::kRelu},
                   {{0}, output_dim, Nonlinearity::kIdentity}};
  return config;
}

std::string EncoderConfig::LayersToString() const {
  std::string out;
  for (size_t l = 0; l < layers.size(); ++l) {
    if (l) out += '|';
    for (size_t c = 0; c < layers[l].context.size(); ++c) {
      if (c) out += ',';
      out += std::to_string(layers[l].context[c]);
    }
    out += ':' + std::to_string(layers[l].output_dim) + ':' +
           NonlinearityName(layers[l].nonlinearity);
  }
  return out;
}

std::vector<LayerSpec> EncoderConfig::ParseLayers(const std::string& text) {
  std::vector<LayerSpec> specs;
  for (auto layer : SplitFields(text, "|")) {
    auto parts = SplitFields(layer, ":");
    if (parts.size() != 3) {
      throw ConfigError("layer spec '" + std::string(layer) +
                        "' must be offsets:dim:nonlinearity");
    }
    LayerSpec spec;
    spec.context.clear();
    for (auto off : SplitFields(parts[0], ",")) {
      auto v = ParseInt(off);
      if (!v) throw ConfigError("bad context offset '" + std::string(off) + "'");
      spec.context.push_back(static_cast<int>(*v));
    }
    auto dim = ParseInt(parts[1]);
    if (!dim) throw ConfigError("bad layer dim '" + std::string(parts[1]) + "'");
    spec.output_dim = static_cast<int>(*dim);
    spec.nonlinearity = ParseNonlinearity(std::string(parts[2]));
    specs.push_back(std::move(spec));
  }
  EncoderConfig{1, specs}.Validate();
  return specs;
}

void EncoderParams::CheckShapes() const {
  config.Validate();
  if (layers.size() != config.layers.size()) {
    throw DimensionError("encoder layer count does not match config");
  }
  for (size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].weight.rows() != config.layers[l].output_dim ||
        layers[l].weight.cols() != config.FanIn(l) ||
        layers[l].bias.size() != config.layers[l].output_dim) {
      throw DimensionError("encoder layer " + std::to_string(l) +
                           " has wrong shape");
    }
  }
}

EncoderParams InitEncoderParams(const EncoderConfig& config, uint64_t seed) {
  config.Validate();
  Rng rng(seed);
  EncoderParams params;
  params.config = config;
  for (size_t l = 0; l < config.layers.size(); ++l) {
    const int fan_in = config.FanIn(l);
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    AffineParams layer;
    layer.weight.resize(config.layers[l].output_dim, fan_in);
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
      layer.weight.data()[i] = rng.Uniform(-scale, scale);
    }
    layer.bias = Vector::Zero(config.layers[l].output_dim);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

namespace {

int64_t Clamp(int64_t t, int64_t num_frames) {
  return std::clamp<int64_t>(t, 0, num_frames - 1);
}

Matrix Splice(const Matrix& input, const std::vector<int>& context) {
  const int64_t frames = input.rows();
  const int64_t dim = input.cols();
  Matrix out(frames, dim * static_cast<int64_t>(context.size()));
  for (int64_t t = 0; t < frames; ++t) {
    for (size_t c = 0; c < context.size(); ++c) {
      out.row(t).segment(c * dim, dim) = input.row(Clamp(t + context[c], frames));
    }
  }
  return out;
}

}  // namespace

EncoderTrace EncodeWithTrace(const EncoderParams& params,
                             const Matrix& features) {
  params.CheckShapes();
  if (features.cols() != params.config.input_dim) {
    throw DimensionError("features have dim " +
                         std::to_string(features.cols()) + ", encoder expects " +
                         std::to_string(params.config.input_dim));
  }
  if (features.rows() < 1) throw DimensionError("utterance has no frames");
  EncoderTrace trace;
  Matrix current = features;
  for (size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    trace.spliced.push_back(Splice(current, params.config.layers[l].context));
    Matrix pre = trace.spliced.back() * layer.weight.transpose();
    pre.rowwise() += layer.bias.transpose();
    trace.pre.push_back(pre);
    if (params.config.layers[l].nonlinearity == Nonlinearity::kRelu) {
      current = pre.cwiseMax(0.0);
    } else {
      current = std::move(pre);
    }
  }
  trace.output = std::move(current);
  return trace;
}

FrameEmbeddingSequence EncodeFrames(const EncoderParams& params,
                                    const UtteranceFeatures& feats) {
  return {feats.utterance_id, EncodeWithTrace(params, feats.features).output};
}

EncoderGradients EncoderGradients::ZerosLike(const EncoderParams& params) {
  EncoderGradients grads;
  for (const auto& layer : params.layers) {
    grads.layers.push_back({Matrix::Zero(layer.weight.rows(),
                                         layer.weight.cols()),
                            Vector::Zero(layer.bias.size())});
  }
  return grads;
}

void EncoderGradients::Accumulate(const EncoderGradients& other) {
  for (size_t l = 0; l < layers.size(); ++l) {
    layers[l].weight += other.layers[l].weight;
    layers[l].bias += other.layers[l].bias;
  }
}

EncoderGradients EncodeBackward(const EncoderParams& params,
                                const EncoderTrace& trace,
                                const Matrix& upstream) {
  if (upstream.rows() != trace.output.rows() ||
      upstream.cols() != trace.output.cols()) {
    throw DimensionError("upstream gradient shape does not match encoder output");
  }
  const size_t num_layers = params.layers.size();
  EncoderGradients grads;
  grads.layers.resize(num_layers);
  Matrix grad = upstream;
  for (size_t l = num_layers; l-- > 0;) {
    const auto& spec = params.config.layers[l];
    if (spec.nonlinearity == Nonlinearity::kRelu) {
      grad = grad.cwiseProduct(
          (trace.pre[l].array() > 0.0).cast<double>().matrix());
    }
    grads.layers[l].weight = grad.transpose() * trace.spliced[l];
    grads.layers[l].bias = grad.colwise().sum().transpose();
    const Matrix grad_spliced = grad * params.layers[l].weight;
    const int64_t frames = grad.rows();
    const int64_t in_dim = l == 0 ? params.config.input_dim
                                  : params.config.layers[l - 1].output_dim;
    Matrix grad_in = Matrix::Zero(frames, in_dim);
    for (int64_t t = 0; t < frames; ++t) {
      for (size_t c = 0; c < spec.context.size(); ++c) {
        grad_in.row(Clamp(t + spec.context[c], frames)) +=
            grad_spliced.row(t).segment(c * in_dim, in_dim);
      }
    }
    grad = std::move(grad_in);
  }
  grads.input = std::move(grad);
  return grads;
}

EncoderGradients EncodeBackward(const EncoderParams& params,
                                const UtteranceFeatures& feats,
                                const Matrix& upstream) {
  return EncodeBackward(params, EncodeWithTrace(params, feats.features),
                        upstream);
}

}  // namespace expo
