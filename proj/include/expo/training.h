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

#ifndef EXPO_TRAINING_H_
#define EXPO_TRAINING_H_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "expo/common.h"
#include "expo/corpus.h"
#include "expo/encoder.h"
#include "expo/losses.h"
#include "expo/rng.h"
#include "expo/trait_layer.h"

namespace expo {

struct ModelState {
  EncoderParams encoder;
  ProjectionParams projection;
  Matrix class_weights;                     // n_classes x D2
  std::vector<std::string> class_speakers;  // speaker id of each class row
  int num_phones = 0;                       // I
  int64_t step = 0;

  void CheckShapes() const;
  bool AllFinite() const;
  int ClassOf(const std::string& speaker_id) const;
};

ModelState InitModel(const EncoderConfig& encoder, int embedding_dim,
                     int num_phones, std::vector<std::string> class_speakers,
                     uint64_t seed);

// Versioned text checkpoint with the architecture echoed in its header.
// Values are written in shortest round-trip form, so loading reproduces the
// parameters bit for bit.
void SaveCheckpoint(const std::string& path, const ModelState& model);
ModelState LoadCheckpoint(const std::string& path);
// Same, but throws ConfigError when the stored architecture differs.
ModelState LoadCheckpoint(const std::string& path,
                          const EncoderConfig& expected_encoder,
                          int expected_embedding_dim);

struct TrainConfig {
  int speakers_per_batch = 8;  // K; 32 in the full-scale setup
  int epochs = 30;
  double learning_rate = 0.05;
  double momentum = 0.9;
  uint64_t seed = 1;
  LossWeights loss;
  AamConfig aam;
  std::vector<LayerSpec> encoder_layers =
      EncoderConfig::Default(1).layers;  // last output_dim is D1
  int embedding_dim = 8;                 // D2

  void Validate() const;
  EncoderConfig Encoder(int input_dim) const {
    return EncoderConfig{input_dim, encoder_layers};
  }
};

// Utterance indices of a pair batch: speaker k enrolls with enroll[k] and is
// tested with test[k].
struct PairSelection {
  std::vector<std::string> speakers;
  std::vector<size_t> enroll;
  std::vector<size_t> test;
};

// K distinct speakers, two distinct utterances each.
PairSelection SamplePairBatch(const Corpus& corpus, int K, Rng* rng);

struct ModelGradients {
  EncoderGradients encoder;
  ProjectionParams projection;
  Matrix class_weights;

  static ModelGradients ZerosLike(const ModelState& model);
};

struct BatchEvaluation {
  PairBatch batch;
  LossBreakdown losses;
  ModelGradients grads;
};

// Forward + backward of L_all (or one of its terms) for one pair batch.
BatchEvaluation EvaluateBatch(const ModelState& model, const Corpus& corpus,
                              const PairSelection& selection,
                              const LossWeights& weights, const AamConfig& aam,
                              LossTerm term = LossTerm::kAll);

struct StepLog {
  int64_t step = 0;
  int epoch = 0;
  LossBreakdown losses;
};

std::string FormatStepLog(const StepLog& log);

struct TrainResult {
  ModelState model;
  std::vector<StepLog> history;

  // Mean L_all over the steps of one (1-based) epoch.
  double EpochMeanLoss(int epoch) const;
};

int StepsPerEpoch(const Corpus& corpus, int K);

// SGD with momentum (v = mu*v + g; w -= lr*v) on L_all. Throws
// DivergenceError on a non-finite loss. on_epoch, if set, runs after every
// epoch with the 1-based epoch number.
TrainResult Train(
    const Corpus& corpus, const TrainConfig& config,
    const std::function<void(int, const ModelState&)>& on_epoch = {});

// Same loop starting from an existing model.
TrainResult TrainFrom(
    ModelState model, const Corpus& corpus, const TrainConfig& config,
    const std::function<void(int, const ModelState&)>& on_epoch = {});

// --- Gradient checking --------------------------------------------------------

struct GroupCheck {
  std::string name;
  int64_t size = 0;
  double max_rel_error = 0.0;
  int64_t worst_index = -1;
  bool passed = true;
};

struct GradCheckReport {
  std::vector<GroupCheck> groups;
  double tolerance = 0.0;
  bool passed = true;

  std::string ToString() const;
};

// Named views over every parameter tensor, in a fixed order.
struct ParamView {
  std::string name;
  double* data;
  int64_t size;
};
std::vector<ParamView> ParameterViews(ModelState* model);
std::vector<ParamView> GradientViews(ModelGradients* grads);

// Relative error |a - n| / max(|a|, |n|, 1e-6) for central differences with
// the given step, per parameter group. corrupt, when set, edits the analytic
// gradients before comparison (fault injection).
GradCheckReport GradCheck(
    const ModelState& model, const Corpus& corpus,
    const PairSelection& selection, const LossWeights& weights,
    const AamConfig& aam, double step_size, double tolerance,
    LossTerm term = LossTerm::kAll,
    const std::function<void(ModelGradients*)>& corrupt = {});

}  // namespace expo

#endif  // EXPO_TRAINING_H_
