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

#include "expo/training.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "expo/text_io.h"

namespace expo {

namespace {

constexpr char kCheckpointMagic[] = "expo-checkpoint";
constexpr int kCheckpointVersion = 1;

// Seed streams derived from TrainConfig::seed.
constexpr uint64_t kInitStream = 1;
constexpr uint64_t kSamplerStream = 2;

}  // namespace

// --- ModelState ---------------------------------------------------------------

void ModelState::CheckShapes() const {
  encoder.CheckShapes();
  const int d1 = encoder.config.OutputDim();
  if (projection.weight.cols() != 2 * d1 ||
      projection.bias.size() != projection.weight.rows()) {
    throw DimensionError("projection shape does not match encoder output");
  }
  if (class_weights.cols() != projection.weight.rows() ||
      class_weights.rows() != static_cast<Eigen::Index>(class_speakers.size())) {
    throw DimensionError("class weights shape does not match embedding dim");
  }
  if (num_phones < 2) throw DimensionError("model needs an inventory of >= 2");
}

bool ModelState::AllFinite() const {
  for (const auto& layer : encoder.layers) {
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) return false;
  }
  return projection.weight.allFinite() && projection.bias.allFinite() &&
         class_weights.allFinite();
}

int ModelState::ClassOf(const std::string& speaker_id) const {
  auto it = std::find(class_speakers.begin(), class_speakers.end(), speaker_id);
  if (it == class_speakers.end()) {
    throw ConfigError("speaker " + speaker_id + " is not a training class");
  }
  return static_cast<int>(it - class_speakers.begin());
}

ModelState InitModel(const EncoderConfig& encoder, int embedding_dim,
                     int num_phones, std::vector<std::string> class_speakers,
                     uint64_t seed) {
  if (class_speakers.empty()) throw ConfigError("model needs >= 1 class");
  ModelState model;
  model.encoder = InitEncoderParams(encoder, DeriveSeed(seed, 0));
  model.projection = InitProjectionParams(encoder.OutputDim(), embedding_dim,
                                          DeriveSeed(seed, 1));
  Rng rng(DeriveSeed(seed, 2));
  const double scale = 1.0 / std::sqrt(static_cast<double>(embedding_dim));
  model.class_weights.resize(static_cast<Eigen::Index>(class_speakers.size()),
                             embedding_dim);
  for (Eigen::Index i = 0; i < model.class_weights.size(); ++i) {
    model.class_weights.data()[i] = rng.Uniform(-scale, scale);
  }
  model.class_speakers = std::move(class_speakers);
  model.num_phones = num_phones;
  model.CheckShapes();
  return model;
}

// --- Parameter views ------------------------------------------------------------

namespace {

template <typename Params>
std::vector<ParamView> Views(std::vector<AffineParams>& enc, Params& proj,
                             Matrix& classes) {
  std::vector<ParamView> views;
  for (size_t l = 0; l < enc.size(); ++l) {
    const std::string prefix = "encoder." + std::to_string(l);
    views.push_back({prefix + ".weight", enc[l].weight.data(),
                     static_cast<int64_t>(enc[l].weight.size())});
    views.push_back({prefix + ".bias", enc[l].bias.data(),
                     static_cast<int64_t>(enc[l].bias.size())});
  }
  views.push_back({"projection.weight", proj.weight.data(),
                   static_cast<int64_t>(proj.weight.size())});
  views.push_back({"projection.bias", proj.bias.data(),
                   static_cast<int64_t>(proj.bias.size())});
  views.push_back({"aam.class_weights", classes.data(),
                   static_cast<int64_t>(classes.size())});
  return views;
}

}  // namespace

std::vector<ParamView> ParameterViews(ModelState* model) {
  return Views(model->encoder.layers, model->projection, model->class_weights);
}

std::vector<ParamView> GradientViews(ModelGradients* grads) {
  return Views(grads->encoder.layers, grads->projection, grads->class_weights);
}

// --- Checkpoints ----------------------------------------------------------------

void SaveCheckpoint(const std::string& path, const ModelState& model) {
  model.CheckShapes();
  std::ostringstream out;
  out << kCheckpointMagic << " v" << kCheckpointVersion << '\n';
  out << "input_dim " << model.encoder.config.input_dim << '\n';
  out << "layers " << model.encoder.config.LayersToString() << '\n';
  out << "embedding_dim " << model.projection.OutputDim() << '\n';
  out << "num_phones " << model.num_phones << '\n';
  out << "step " << model.step << '\n';
  out << "classes " << model.class_speakers.size();
  for (const auto& spk : model.class_speakers) out << ' ' << spk;
  out << '\n';
  auto write_tensor = [&out](const std::string& name, const double* data,
                             Eigen::Index rows, Eigen::Index cols) {
    out << "tensor " << name << ' ' << rows << ' ' << cols << '\n';
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        if (c) out << ' ';
        out << FormatDouble(data[r * cols + c]);
      }
      out << '\n';
    }
  };
  for (size_t l = 0; l < model.encoder.layers.size(); ++l) {
    const auto& layer = model.encoder.layers[l];
    const std::string prefix = "encoder." + std::to_string(l);
    write_tensor(prefix + ".weight", layer.weight.data(), layer.weight.rows(),
                 layer.weight.cols());
    write_tensor(prefix + ".bias", layer.bias.data(), 1, layer.bias.size());
  }
  write_tensor("projection.weight", model.projection.weight.data(),
               model.projection.weight.rows(), model.projection.weight.cols());
  write_tensor("projection.bias", model.projection.bias.data(), 1,
               model.projection.bias.size());
  write_tensor("aam.class_weights", model.class_weights.data(),
               model.class_weights.rows(), model.class_weights.cols());
  WriteFileAtomic(path, out.str());
}

ModelState LoadCheckpoint(const std::string& path) {
  const auto lines = ReadLines(path);
  size_t n = 0;
  auto fail = [&path, &n](const std::string& what) -> ParseError {
    return ParseError(path, static_cast<int64_t>(n) + 1, what);
  };
  auto next = [&]() -> std::vector<std::string_view> {
    if (n >= lines.size()) throw fail("unexpected end of checkpoint");
    return SplitFields(lines[n]);
  };
  auto keyed_int = [&](const char* key) -> int64_t {
    auto f = next();
    if (f.size() != 2 || f[0] != key) throw fail(std::string("expected ") + key);
    auto v = ParseInt(f[1]);
    if (!v) throw fail(std::string("bad value for ") + key);
    ++n;
    return *v;
  };

  auto magic = next();
  if (magic.size() != 2 || magic[0] != kCheckpointMagic ||
      magic[1] != "v" + std::to_string(kCheckpointVersion)) {
    throw fail("not a version " + std::to_string(kCheckpointVersion) +
               " checkpoint");
  }
  ++n;
  ModelState model;
  EncoderConfig config;
  config.input_dim = static_cast<int>(keyed_int("input_dim"));
  {
    auto f = next();
    if (f.size() != 2 || f[0] != "layers") throw fail("expected layers");
    try {
      config.layers = EncoderConfig::ParseLayers(std::string(f[1]));
      config.Validate();
    } catch (const ConfigError& e) {
      throw fail(e.what());
    }
    ++n;
  }
  const int64_t embedding_dim = keyed_int("embedding_dim");
  model.num_phones = static_cast<int>(keyed_int("num_phones"));
  model.step = keyed_int("step");
  {
    auto f = next();
    if (f.size() < 2 || f[0] != "classes") throw fail("expected classes");
    auto count = ParseInt(f[1]);
    if (!count || static_cast<int64_t>(f.size()) != *count + 2) {
      throw fail("class count does not match the listed speakers");
    }
    for (size_t i = 2; i < f.size(); ++i) model.class_speakers.emplace_back(f[i]);
    ++n;
  }

  auto read_tensor = [&](const std::string& name, Eigen::Index rows,
                         Eigen::Index cols, double* data) {
    auto f = next();
    if (f.size() != 4 || f[0] != "tensor" || f[1] != name) {
      throw fail("expected tensor " + name);
    }
    auto r = ParseInt(f[2]);
    auto c = ParseInt(f[3]);
    if (!r || !c || *r != rows || *c != cols) {
      throw fail("tensor " + name + " has shape inconsistent with header");
    }
    ++n;
    for (Eigen::Index i = 0; i < rows; ++i) {
      auto vals = next();
      if (static_cast<Eigen::Index>(vals.size()) != cols) {
        throw fail("tensor " + name + ": wrong number of values");
      }
      for (Eigen::Index j = 0; j < cols; ++j) {
        auto v = ParseDouble(vals[j]);
        if (!v) throw fail("tensor " + name + ": malformed value");
        data[i * cols + j] = *v;
      }
      ++n;
    }
  };

  model.encoder.config = config;
  for (size_t l = 0; l < config.layers.size(); ++l) {
    AffineParams layer;
    layer.weight.resize(config.layers[l].output_dim, config.FanIn(l));
    layer.bias.resize(config.layers[l].output_dim);
    const std::string prefix = "encoder." + std::to_string(l);
    read_tensor(prefix + ".weight", layer.weight.rows(), layer.weight.cols(),
                layer.weight.data());
    read_tensor(prefix + ".bias", 1, layer.bias.size(), layer.bias.data());
    model.encoder.layers.push_back(std::move(layer));
  }
  const int d1 = config.OutputDim();
  model.projection.weight.resize(embedding_dim, 2 * d1);
  model.projection.bias.resize(embedding_dim);
  read_tensor("projection.weight", embedding_dim, 2 * d1,
              model.projection.weight.data());
  read_tensor("projection.bias", 1, embedding_dim, model.projection.bias.data());
  const auto num_classes = static_cast<Eigen::Index>(model.class_speakers.size());
  model.class_weights.resize(num_classes, embedding_dim);
  read_tensor("aam.class_weights", num_classes, embedding_dim,
              model.class_weights.data());
  model.CheckShapes();
  return model;
}

ModelState LoadCheckpoint(const std::string& path,
                          const EncoderConfig& expected_encoder,
                          int expected_embedding_dim) {
  ModelState model = LoadCheckpoint(path);
  if (!(model.encoder.config == expected_encoder)) {
    throw ConfigError("checkpoint " + path + " encoder '" +
                      model.encoder.config.LayersToString() + "' (input " +
                      std::to_string(model.encoder.config.input_dim) +
                      ") does not match the configured encoder '" +
                      expected_encoder.LayersToString() + "'");
  }
  if (model.projection.OutputDim() != expected_embedding_dim) {
    throw ConfigError("checkpoint " + path + " has embedding_dim " +
                      std::to_string(model.projection.OutputDim()));
  }
  return model;
}

// --- Config -----------------------------------------------------------------------

void TrainConfig::Validate() const {
  if (speakers_per_batch < 2) throw ConfigError("speakers_per_batch must be >= 2");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be finite and >= 0");
  }
  if (!(momentum >= 0.0) || !(momentum < 1.0)) {
    throw ConfigError("momentum must be in [0, 1)");
  }
  if (embedding_dim < 1) throw ConfigError("embedding_dim must be >= 1");
  loss.Validate();
  aam.Validate();
  EncoderConfig{1, encoder_layers}.Validate();
}

// --- Sampling ---------------------------------------------------------------------

PairSelection SamplePairBatch(const Corpus& corpus, int K, Rng* rng) {
  if (K < 2) throw ConfigError("pair batch needs K >= 2");
  std::vector<std::pair<std::string, std::vector<size_t>>> eligible;
  for (auto& [spk, utts] : corpus.UtterancesBySpeaker()) {
    if (utts.size() >= 2) eligible.emplace_back(spk, utts);
  }
  if (static_cast<int>(eligible.size()) < K) {
    throw ConfigError("pair batch needs " + std::to_string(K) +
                      " speakers with >= 2 utterances, corpus has " +
                      std::to_string(eligible.size()));
  }
  // Partial Fisher-Yates over speakers.
  std::vector<size_t> order(eligible.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  PairSelection sel;
  for (int k = 0; k < K; ++k) {
    const size_t j = k + rng->Index(order.size() - k);
    std::swap(order[k], order[j]);
    const auto& [spk, utts] = eligible[order[k]];
    const size_t a = rng->Index(utts.size());
    size_t b = rng->Index(utts.size() - 1);
    if (b >= a) ++b;
    sel.speakers.push_back(spk);
    sel.enroll.push_back(utts[a]);
    sel.test.push_back(utts[b]);
  }
  return sel;
}

// --- Forward / backward -------------------------------------------------------------

ModelGradients ModelGradients::ZerosLike(const ModelState& model) {
  ModelGradients g;
  g.encoder = EncoderGradients::ZerosLike(model.encoder);
  g.projection.weight = Matrix::Zero(model.projection.weight.rows(),
                                     model.projection.weight.cols());
  g.projection.bias = Vector::Zero(model.projection.bias.size());
  g.class_weights =
      Matrix::Zero(model.class_weights.rows(), model.class_weights.cols());
  return g;
}

BatchEvaluation EvaluateBatch(const ModelState& model, const Corpus& corpus,
                              const PairSelection& selection,
                              const LossWeights& weights, const AamConfig& aam,
                              LossTerm term) {
  const int K = static_cast<int>(selection.speakers.size());
  const int num_phones = model.num_phones;
  std::vector<UtteranceForward> enroll_fwd;
  std::vector<UtteranceForward> test_fwd;
  BatchEvaluation eval;
  PairBatch& batch = eval.batch;
  const Eigen::Index d2 = model.projection.OutputDim();
  batch.enroll_embeddings.resize(K, d2);
  batch.test_embeddings.resize(K, d2);
  for (int k = 0; k < K; ++k) {
    const size_t e = selection.enroll[k];
    const size_t t = selection.test[k];
    enroll_fwd.push_back(ForwardUtterance(model.encoder, model.projection,
                                          corpus.utterances[e],
                                          corpus.alignments[e], num_phones));
    test_fwd.push_back(ForwardUtterance(model.encoder, model.projection,
                                        corpus.utterances[t],
                                        corpus.alignments[t], num_phones));
    batch.speaker_ids.push_back(selection.speakers[k]);
    batch.labels.push_back(model.ClassOf(selection.speakers[k]));
    batch.enroll_traits.push_back(enroll_fwd.back().traits);
    batch.test_traits.push_back(test_fwd.back().traits);
    batch.enroll_embeddings.row(k) = enroll_fwd.back().embedding.vector;
    batch.test_embeddings.row(k) = test_fwd.back().embedding.vector;
  }

  BatchLossResult loss =
      TotalLoss(batch, weights, aam, model.class_weights, term);
  eval.losses = loss.values;
  eval.grads = ModelGradients::ZerosLike(model);
  eval.grads.class_weights = loss.grad_class_weights;

  // Fixed accumulation order: enrollment then test, speaker by speaker.
  auto backprop = [&](const UtteranceForward& fwd, size_t utt,
                      const Vector& grad_emb, const Matrix& grad_traits) {
    TraitLayerGradients tg = TraitLayerBackward(
        fwd, corpus.alignments[utt], model.projection, grad_emb, grad_traits);
    eval.grads.projection.weight += tg.proj.weight;
    eval.grads.projection.bias += tg.proj.bias;
    eval.grads.encoder.Accumulate(
        EncodeBackward(model.encoder, fwd.encoder, tg.frames));
  };
  for (int k = 0; k < K; ++k) {
    backprop(enroll_fwd[k], selection.enroll[k],
             loss.grad_enroll_embeddings.row(k).transpose(),
             loss.grad_enroll_traits[k]);
    backprop(test_fwd[k], selection.test[k],
             loss.grad_test_embeddings.row(k).transpose(),
             loss.grad_test_traits[k]);
  }
  return eval;
}

// --- Training loop ------------------------------------------------------------------

std::string FormatStepLog(const StepLog& log) {
  return std::to_string(log.step) + ", " + FormatDouble(log.losses.total) +
         ", " + FormatDouble(log.losses.aam) + ", " +
         FormatDouble(log.losses.veri) + ", " + FormatDouble(log.losses.center);
}

double TrainResult::EpochMeanLoss(int epoch) const {
  double sum = 0.0;
  int count = 0;
  for (const auto& log : history) {
    if (log.epoch == epoch) {
      sum += log.losses.total;
      ++count;
    }
  }
  if (count == 0) throw ConfigError("no steps logged for epoch " +
                                    std::to_string(epoch));
  return sum / count;
}

int StepsPerEpoch(const Corpus& corpus, int K) {
  const size_t per_step = 2 * static_cast<size_t>(K);
  return std::max<int>(1, static_cast<int>(corpus.utterances.size() / per_step));
}

TrainResult Train(const Corpus& corpus, const TrainConfig& config,
                  const std::function<void(int, const ModelState&)>& on_epoch) {
  config.Validate();
  if (corpus.utterances.empty()) throw ConfigError("training corpus is empty");
  ModelState model = InitModel(
      config.Encoder(static_cast<int>(corpus.utterances[0].Dim())),
      config.embedding_dim, corpus.inventory.Size(), corpus.SpeakerIds(),
      DeriveSeed(config.seed, kInitStream));
  return TrainFrom(std::move(model), corpus, config, on_epoch);
}

TrainResult TrainFrom(ModelState model, const Corpus& corpus,
                      const TrainConfig& config,
                      const std::function<void(int, const ModelState&)>& on_epoch) {
  config.Validate();
  model.CheckShapes();
  if (corpus.inventory.Size() != model.num_phones) {
    throw DimensionError("corpus inventory size does not match the model");
  }
  if (!model.AllFinite()) {
    throw DivergenceError("initial model has a non-finite parameter");
  }
  TrainResult result;
  Rng rng(DeriveSeed(config.seed, kSamplerStream));
  ModelGradients velocity = ModelGradients::ZerosLike(model);
  const int steps = StepsPerEpoch(corpus, config.speakers_per_batch);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (int s = 0; s < steps; ++s) {
      const PairSelection sel =
          SamplePairBatch(corpus, config.speakers_per_batch, &rng);
      BatchEvaluation eval =
          EvaluateBatch(model, corpus, sel, config.loss, config.aam);
      if (!std::isfinite(eval.losses.total)) {
        throw DivergenceError(
            "non-finite loss at step " + std::to_string(model.step + 1) +
            " (epoch " + std::to_string(epoch) +
            "): L_aam=" + FormatDouble(eval.losses.aam) +
            " L_veri=" + FormatDouble(eval.losses.veri) +
            " L_center=" + FormatDouble(eval.losses.center));
      }
      auto params = ParameterViews(&model);
      auto grads = GradientViews(&eval.grads);
      auto vel = GradientViews(&velocity);
      for (size_t g = 0; g < params.size(); ++g) {
        for (int64_t i = 0; i < params[g].size; ++i) {
          vel[g].data[i] = config.momentum * vel[g].data[i] + grads[g].data[i];
          params[g].data[i] -= config.learning_rate * vel[g].data[i];
        }
      }
      ++model.step;
      if (!model.AllFinite()) {
        throw DivergenceError("non-finite parameter after step " +
                              std::to_string(model.step));
      }
      result.history.push_back({model.step, epoch, eval.losses});
    }
    if (on_epoch) on_epoch(epoch, model);
  }
  result.model = std::move(model);
  return result;
}

// --- Gradient check -------------------------------------------------------------------

namespace {

double TermValue(const LossBreakdown& b, LossTerm term) {
  switch (term) {
    case LossTerm::kAam:
      return b.aam;
    case LossTerm::kVeri:
      return b.veri;
    case LossTerm::kCenter:
      return b.center;
    case LossTerm::kAll:
      break;
  }
  return b.total;
}

}  // namespace

std::string GradCheckReport::ToString() const {
  std::ostringstream out;
  for (const auto& g : groups) {
    out << g.name << " size=" << g.size
        << " max_rel_error=" << FormatDouble(g.max_rel_error)
        << " worst_index=" << g.worst_index
        << (g.passed ? " PASS" : " FAIL") << '\n';
  }
  out << "tolerance=" << FormatDouble(tolerance) << ' '
      << (passed ? "PASS" : "FAIL") << '\n';
  return out.str();
}

GradCheckReport GradCheck(const ModelState& model, const Corpus& corpus,
                          const PairSelection& selection,
                          const LossWeights& weights, const AamConfig& aam,
                          double step_size, double tolerance, LossTerm term,
                          const std::function<void(ModelGradients*)>& corrupt) {
  BatchEvaluation base =
      EvaluateBatch(model, corpus, selection, weights, aam, term);
  if (corrupt) corrupt(&base.grads);
  auto analytic = GradientViews(&base.grads);

  ModelState probe = model;
  auto params = ParameterViews(&probe);
  GradCheckReport report;
  report.tolerance = tolerance;
  for (size_t g = 0; g < params.size(); ++g) {
    GroupCheck check;
    check.name = params[g].name;
    check.size = params[g].size;
    for (int64_t i = 0; i < params[g].size; ++i) {
      double& w = params[g].data[i];
      const double saved = w;
      w = saved + step_size;
      const double plus = TermValue(
          EvaluateBatch(probe, corpus, selection, weights, aam, term).losses,
          term);
      w = saved - step_size;
      const double minus = TermValue(
          EvaluateBatch(probe, corpus, selection, weights, aam, term).losses,
          term);
      w = saved;
      const double numeric = (plus - minus) / (2.0 * step_size);
      const double a = analytic[g].data[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
      const double err = std::abs(a - numeric) / denom;
      if (err > check.max_rel_error || check.worst_index < 0) {
        check.max_rel_error = std::max(check.max_rel_error, err);
        if (err >= check.max_rel_error) check.worst_index = i;
      }
    }
    check.passed = check.max_rel_error <= tolerance;
    report.passed = report.passed && check.passed;
    report.groups.push_back(std::move(check));
  }
  return report;
}

}  // namespace expo
