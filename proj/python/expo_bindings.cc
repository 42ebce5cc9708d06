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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "expo/analysis.h"
#include "expo/corpus.h"
#include "expo/scoring.h"
#include "expo/training.h"

namespace py = pybind11;

namespace expo {
namespace {

std::vector<LabeledScore> Labeled(const std::vector<double>& scores,
                                  const std::vector<bool>& targets) {
  if (scores.size() != targets.size()) {
    throw DimensionError("scores and targets differ in length");
  }
  std::vector<LabeledScore> out;
  out.reserve(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) out.push_back({scores[i], targets[i]});
  return out;
}

void RegisterErrors(py::module_& m) {
  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<IoError>(m, "IoError", base);
  py::register_exception<DimensionError>(m, "DimensionError", base);
  py::register_exception<EmptyUtteranceError>(m, "EmptyUtteranceError", base);
  py::register_exception<UndefinedEvidenceError>(m, "UndefinedEvidenceError", base);
  auto numeric = py::register_exception<NumericError>(m, "NumericError", base);
  py::register_exception<DivergenceError>(m, "DivergenceError", numeric);
}

}  // namespace
}  // namespace expo

PYBIND11_MODULE(_expo, m) {
  using namespace expo;
  m.doc() = "Phonetic-trait speaker verification core";
  RegisterErrors(m);

  py::class_<PhoneInventory>(m, "PhoneInventory")
      .def(py::init<std::vector<std::string>>())
      .def_static("default", &PhoneInventory::Default)
      .def("__len__", &PhoneInventory::Size)
      .def_property_readonly("labels", &PhoneInventory::labels)
      .def("index_of", &PhoneInventory::IndexOf);

  py::class_<CorpusConfig>(m, "CorpusConfig")
      .def(py::init<>())
      .def_readwrite("n_speakers", &CorpusConfig::n_speakers)
      .def_readwrite("utts_per_speaker", &CorpusConfig::utts_per_speaker)
      .def_readwrite("feature_dim", &CorpusConfig::feature_dim)
      .def_readwrite("min_segment_frames", &CorpusConfig::min_segment_frames)
      .def_readwrite("max_segment_frames", &CorpusConfig::max_segment_frames)
      .def_readwrite("min_phones_per_utt", &CorpusConfig::min_phones_per_utt)
      .def_readwrite("max_phones_per_utt", &CorpusConfig::max_phones_per_utt)
      .def_readwrite("noise_std", &CorpusConfig::noise_std)
      .def_readwrite("phone_scale", &CorpusConfig::phone_scale)
      .def_readwrite("speaker_scale", &CorpusConfig::speaker_scale)
      .def_readwrite("speaker_phone_scale", &CorpusConfig::speaker_phone_scale)
      .def_readwrite("phone_weights", &CorpusConfig::phone_weights)
      .def_readwrite("seed", &CorpusConfig::seed);

  py::class_<Corpus>(m, "Corpus")
      .def_readonly("inventory", &Corpus::inventory)
      .def("__len__", [](const Corpus& c) { return c.utterances.size(); })
      .def("speaker_ids", &Corpus::SpeakerIds)
      .def("utterance_ids",
           [](const Corpus& c) {
             std::vector<std::string> ids;
             for (const auto& u : c.utterances) ids.push_back(u.utterance_id);
             return ids;
           })
      .def("split_per_speaker", [](const Corpus& c, int n_first) {
        CorpusSplit s = c.SplitPerSpeaker(n_first);
        return py::make_tuple(std::move(s.first), std::move(s.second));
      });

  m.def("generate_corpus", &GenerateCorpus, py::arg("config"),
        py::arg("inventory") = PhoneInventory::Default());

  py::class_<Trial>(m, "Trial")
      .def(py::init<std::string, std::string, bool>(), py::arg("enroll_id"),
           py::arg("test_id"), py::arg("target"))
      .def_readonly("enroll_id", &Trial::enroll_id)
      .def_readonly("test_id", &Trial::test_id)
      .def_readonly("target", &Trial::target);

  py::class_<TrialList>(m, "TrialList")
      .def(py::init<>())
      .def_readwrite("trials", &TrialList::trials)
      .def("__len__", [](const TrialList& t) { return t.trials.size(); })
      .def("n_target", &TrialList::NumTarget)
      .def("n_nontarget", &TrialList::NumNontarget);

  m.def("make_trials", &MakeTrials, py::arg("corpus"), py::arg("n_target"),
        py::arg("n_nontarget"), py::arg("seed"));

  py::class_<LossWeights>(m, "LossWeights")
      .def(py::init<>())
      .def(py::init<double, double, double>(), py::arg("alpha"), py::arg("beta"),
           py::arg("gamma"))
      .def_readwrite("alpha", &LossWeights::alpha)
      .def_readwrite("beta", &LossWeights::beta)
      .def_readwrite("gamma", &LossWeights::gamma);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("speakers_per_batch", &TrainConfig::speakers_per_batch)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("momentum", &TrainConfig::momentum)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("loss", &TrainConfig::loss)
      .def_readwrite("embedding_dim", &TrainConfig::embedding_dim)
      .def_property(
          "encoder_layers",
          [](const TrainConfig& c) { return EncoderConfig{1, c.encoder_layers}.LayersToString(); },
          [](TrainConfig& c, const std::string& text) {
            c.encoder_layers = EncoderConfig::ParseLayers(text);
          });

  py::class_<ModelState>(m, "Model")
      .def_readonly("num_phones", &ModelState::num_phones)
      .def_readonly("step", &ModelState::step)
      .def_readonly("class_speakers", &ModelState::class_speakers)
      .def_property_readonly("embedding_dim",
                             [](const ModelState& s) { return s.projection.OutputDim(); });

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("model", &TrainResult::model)
      .def("epoch_mean_loss", &TrainResult::EpochMeanLoss)
      .def_property_readonly("step_losses", [](const TrainResult& r) {
        std::vector<double> out;
        for (const auto& s : r.history) out.push_back(s.losses.total);
        return out;
      });

  m.def("train", [](const Corpus& c, const TrainConfig& t) { return Train(c, t); },
        py::arg("corpus"), py::arg("config") = TrainConfig{},
        py::call_guard<py::gil_scoped_release>());
  m.def("save_checkpoint", &SaveCheckpoint, py::arg("path"), py::arg("model"));
  m.def("load_checkpoint", py::overload_cast<const std::string&>(&LoadCheckpoint),
        py::arg("path"));

  py::class_<ScoreRecord>(m, "ScoreRecord")
      .def_readonly("enroll_id", &ScoreRecord::enroll_id)
      .def_readonly("test_id", &ScoreRecord::test_id)
      .def_readonly("target", &ScoreRecord::target)
      .def_readonly("final_score", &ScoreRecord::final_score)
      .def_readonly("evidence_score", &ScoreRecord::evidence_score)
      .def_property_readonly(
          "similarity", [](const ScoreRecord& r) { return r.similarity.values; })
      .def("__eq__", &ScoreRecord::operator==);

  m.def("score_trials", &ScoreTrials, py::arg("model"), py::arg("corpus"),
        py::arg("trials"), py::arg("use_cache") = true);
  m.def("save_scores", &SaveScores, py::arg("path"), py::arg("records"));
  m.def("load_scores", &LoadScores, py::arg("path"));

  m.def(
      "evidence_score",
      [](const std::vector<std::optional<double>>& s) {
        return EvidenceScore(TraitSimilarityVector{s});
      },
      py::arg("similarity"));

  m.def(
      "compute_eer",
      [](const std::vector<double>& scores, const std::vector<bool>& targets) {
        const EerResult r = ComputeEer(Labeled(scores, targets));
        return py::make_tuple(r.eer, r.threshold);
      },
      py::arg("scores"), py::arg("targets"));
  m.def(
      "compute_min_dcf",
      [](const std::vector<double>& scores, const std::vector<bool>& targets,
         double p_target, double c_miss, double c_fa) {
        return ComputeMinDcf(Labeled(scores, targets), {p_target, c_miss, c_fa});
      },
      py::arg("scores"), py::arg("targets"), py::arg("p_target") = 0.01,
      py::arg("c_miss") = 1.0, py::arg("c_fa") = 1.0);
  m.def("explainability_correlation", &ExplainabilityCorrelation,
        py::arg("records"));

  py::class_<FRatioRow>(m, "FRatioRow")
      .def_readonly("phone", &FRatioRow::phone)
      .def_readonly("within_mean", &FRatioRow::within_mean)
      .def_readonly("between_mean", &FRatioRow::between_mean)
      .def_readonly("ratio", &FRatioRow::ratio)
      .def_readonly("n_available", &FRatioRow::n_available)
      .def_readonly("included", &FRatioRow::included);

  py::class_<FRatioReport>(m, "FRatioReport")
      .def_readonly("rows", &FRatioReport::rows)
      .def("to_csv", &FRatioReport::ToCsv);

  m.def("f_ratio", &ComputeFRatio, py::arg("records"), py::arg("inventory"),
        py::arg("n_samples") = 500, py::arg("seed") = 1);
  m.def("export_explanation", &ExportExplanation, py::arg("record"),
        py::arg("inventory"));
}
