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

#include "cli.h"

#include <charconv>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "expo/analysis.h"
#include "expo/rng.h"
#include "expo/scoring.h"
#include "expo/text_io.h"
#include "expo/training.h"

namespace expo {
namespace cli {

namespace fs = std::filesystem;

namespace {

constexpr uint64_t kTrialStream = 101;
constexpr uint64_t kFRatioStream = 102;
constexpr uint64_t kGradCheckBatchStream = 103;

struct OptionSpec {
  std::string key;
  std::string def;
  std::string help;
};

struct CommandSpec {
  std::string name;
  std::string about;
  std::vector<OptionSpec> options;
};

std::vector<OptionSpec> LossOptions() {
  const LossWeights w;
  const AamConfig a;
  return {
      {"alpha", FormatDouble(w.alpha),
       "weight of the matched-pair trait distance"},
      {"beta", FormatDouble(w.beta),
       "weight of the nearest unmatched-pair trait distance"},
      {"gamma", FormatDouble(w.gamma),
       "weight of the trait-center spread"},
      {"aam_margin", FormatDouble(a.margin), "AAM-softmax angular margin"},
      {"aam_scale", FormatDouble(a.scale), "AAM-softmax logit scale"},
  };
}

std::vector<CommandSpec> Commands() {
  const CorpusConfig c;
  const TrainConfig t;
  const DcfParams d;
  std::vector<CommandSpec> cmds;

  cmds.push_back({"gen-corpus",
                  "Generate a synthetic corpus with train and eval parts",
                  {
                      {"n_speakers", std::to_string(c.n_speakers), "number of speakers"},
                      {"utts_per_speaker", std::to_string(c.utts_per_speaker),
                       "training utterances per speaker"},
                      {"heldout_utts_per_speaker", "10",
                       "held-out evaluation utterances per speaker (0: no eval part)"},
                      {"feature_dim", std::to_string(c.feature_dim), "feature dimension F"},
                      {"min_segment_frames", std::to_string(c.min_segment_frames),
                       "shortest phone segment in frames"},
                      {"max_segment_frames", std::to_string(c.max_segment_frames),
                       "longest phone segment in frames"},
                      {"min_phones_per_utt", std::to_string(c.min_phones_per_utt),
                       "fewest segments per utterance"},
                      {"max_phones_per_utt", std::to_string(c.max_phones_per_utt),
                       "most segments per utterance"},
                      {"noise_std", FormatDouble(c.noise_std), "frame noise std"},
                      {"phone_scale", FormatDouble(c.phone_scale),
                       "std of the signature part shared by all speakers"},
                      {"speaker_scale", FormatDouble(c.speaker_scale),
                       "std of the per-speaker signature offset"},
                      {"speaker_phone_scale", FormatDouble(c.speaker_phone_scale),
                       "std of the per-speaker, per-phone signature offset"},
                      {"phone_weights", "ZH=0.02",
                       "relative phone draw weights as LABEL=W,... (others 1)"},
                      {"n_target_trials", "250", "target trials in the trial list"},
                      {"n_nontarget_trials", "250", "non-target trials in the trial list"},
                  }});

  std::vector<OptionSpec> train = {
      {"corpus", "", "training corpus directory (required)"},
      {"speakers_per_batch", std::to_string(t.speakers_per_batch),
       "speakers per minibatch K (32 at full scale)"},
      {"epochs", std::to_string(t.epochs), "training epochs"},
      {"learning_rate", FormatDouble(t.learning_rate), "SGD learning rate"},
      {"momentum", FormatDouble(t.momentum), "SGD momentum"},
      {"encoder_layers", EncoderConfig{1, t.encoder_layers}.LayersToString(),
       "frame encoder as context:dim:nonlinearity|..."},
      {"embedding_dim", std::to_string(t.embedding_dim), "speaker embedding dim D2"},
  };
  for (auto& o : LossOptions()) train.push_back(o);
  cmds.push_back({"train", "Train a model; writes ckpt_epochN and loss_log.txt", train});

  cmds.push_back({"score",
                  "Score a trial list; writes scores.txt",
                  {
                      {"corpus", "", "evaluation corpus directory (required)"},
                      {"checkpoint", "", "model checkpoint (required)"},
                      {"trials", "", "trial list (default: <corpus>/trials.txt)"},
                  }});

  cmds.push_back({"eval",
                  "EER, minDCF and final/evidence correlation of a score file",
                  {
                      {"scores", "", "score file (required)"},
                      {"p_target", FormatDouble(d.p_target), "minDCF target prior"},
                      {"c_miss", FormatDouble(d.c_miss), "minDCF miss cost"},
                      {"c_fa", FormatDouble(d.c_fa), "minDCF false-alarm cost"},
                  }});

  cmds.push_back({"fratio",
                  "Per-phone within/between trait similarity ratio",
                  {
                      {"scores", "", "score file (required)"},
                      {"inventory", "", "phone inventory file (default: built-in)"},
                      {"n_samples", "500", "draws per pool; smaller pools are excluded"},
                  }});

  cmds.push_back({"explain",
                  "Export the per-phone evidence of one scored trial",
                  {
                      {"scores", "", "score file (required)"},
                      {"inventory", "", "phone inventory file (default: built-in)"},
                      {"trial_index", "0", "0-based row of the score file"},
                      {"enroll", "", "select the trial by enrollment id (with --test)"},
                      {"test", "", "select the trial by test id (with --enroll)"},
                  }});

  std::vector<OptionSpec> gc = {
      {"corpus", "", "corpus directory (default: a small built-in corpus)"},
      {"checkpoint", "", "model checkpoint (default: random init)"},
      {"gc_speakers", "3", "speakers in the checked batch"},
      {"gc_encoder_layers", "-1,0,1:8:relu|0:8:identity",
       "encoder of the random model"},
      {"gc_embedding_dim", "4", "embedding dim of the random model"},
      {"gc_step", "1e-05", "central-difference step"},
      {"gc_tolerance", "0.0001", "maximum relative error"},
      {"gc_terms", "aam,veri,center,all", "loss terms to check"},
  };
  for (auto& o : LossOptions()) gc.push_back(o);
  cmds.push_back({"gradcheck", "Finite-difference check of every gradient", gc});
  return cmds;
}

std::string Dashed(std::string key) {
  for (char& ch : key) {
    if (ch == '_') ch = '-';
  }
  return key;
}

class Settings {
 public:
  Settings(std::string command, std::map<std::string, std::string> values)
      : command_(std::move(command)), values_(std::move(values)) {}

  const std::string& Str(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw Error("unregistered setting " + key);
    return it->second;
  }
  const std::string& Required(const std::string& key) const {
    const std::string& v = Str(key);
    if (v.empty()) {
      throw ConfigError(command_ + " needs --" + Dashed(key));
    }
    return v;
  }
  int64_t Int(const std::string& key) const {
    auto v = ParseInt(Str(key));
    if (!v) throw ConfigError("setting " + key + " must be an integer");
    return *v;
  }
  int Int32(const std::string& key) const {
    const int64_t v = Int(key);
    if (v < -(int64_t{1} << 31) || v >= (int64_t{1} << 31)) {
      throw ConfigError("setting " + key + " is out of range");
    }
    return static_cast<int>(v);
  }
  double Double(const std::string& key) const {
    auto v = ParseDouble(Str(key));
    if (!v) throw ConfigError("setting " + key + " must be a number");
    return *v;
  }
  uint64_t Seed() const {
    const std::string& s = Str("seed");
    uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ConfigError("seed must be a non-negative integer");
    }
    return v;
  }
  std::string Echo() const {
    std::string out = "command=" + command_ + '\n';
    for (const auto& [k, v] : values_) out += k + '=' + v + '\n';
    return out;
  }
  const std::string& command() const { return command_; }

 private:
  std::string command_;
  std::map<std::string, std::string> values_;
};

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::map<std::string, std::string> ReadConfigFile(
    const std::string& path, const std::set<std::string>& known) {
  std::map<std::string, std::string> values;
  const auto lines = ReadLines(path);
  for (size_t n = 0; n < lines.size(); ++n) {
    const std::string line = Trim(lines[n]);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path, static_cast<int64_t>(n) + 1, "expected key=value");
    }
    const std::string key = Trim(line.substr(0, eq));
    if (!known.count(key)) {
      throw ConfigError(path + ":" + std::to_string(n + 1) + ": unknown key '" +
                        key + "'");
    }
    values[key] = Trim(line.substr(eq + 1));
  }
  return values;
}

void RequireExists(const std::string& path) {
  if (!fs::exists(path)) throw IoError(path, "no such file or directory");
}

std::string Join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::vector<double> ParsePhoneWeights(const std::string& text,
                                      const PhoneInventory& inventory) {
  if (text.empty()) return {};
  std::vector<double> w(inventory.Size(), 1.0);
  for (auto item : SplitFields(text, ",")) {
    const auto eq = item.find('=');
    auto idx = eq == std::string_view::npos
                   ? std::nullopt
                   : inventory.IndexOf(std::string(item.substr(0, eq)));
    auto v = eq == std::string_view::npos ? std::nullopt
                                          : ParseDouble(item.substr(eq + 1));
    if (!idx || !v) {
      throw ConfigError("bad phone_weights entry '" + std::string(item) + "'");
    }
    w[*idx] = *v;
  }
  return w;
}

PhoneInventory InventoryFrom(const Settings& s) {
  const std::string& path = s.Str("inventory");
  if (path.empty()) return PhoneInventory::Default();
  RequireExists(path);
  return LoadInventory(path);
}

LossWeights LossFrom(const Settings& s) {
  LossWeights w;
  w.alpha = s.Double("alpha");
  w.beta = s.Double("beta");
  w.gamma = s.Double("gamma");
  w.Validate();
  return w;
}

AamConfig AamFrom(const Settings& s) {
  AamConfig a;
  a.margin = s.Double("aam_margin");
  a.scale = s.Double("aam_scale");
  a.Validate();
  return a;
}

// --- Commands ---------------------------------------------------------------------

void CmdGenCorpus(const Settings& s, const std::string& out_dir,
                  std::ostream& out) {
  const PhoneInventory inventory = PhoneInventory::Default();
  CorpusConfig cc;
  cc.n_speakers = s.Int32("n_speakers");
  const int n_train = s.Int32("utts_per_speaker");
  const int n_heldout = s.Int32("heldout_utts_per_speaker");
  if (n_train < 1 || n_heldout < 0) {
    throw ConfigError("utts_per_speaker must be >= 1, heldout >= 0");
  }
  cc.utts_per_speaker = n_train + n_heldout;
  cc.feature_dim = s.Int32("feature_dim");
  cc.min_segment_frames = s.Int32("min_segment_frames");
  cc.max_segment_frames = s.Int32("max_segment_frames");
  cc.min_phones_per_utt = s.Int32("min_phones_per_utt");
  cc.max_phones_per_utt = s.Int32("max_phones_per_utt");
  cc.noise_std = s.Double("noise_std");
  cc.phone_scale = s.Double("phone_scale");
  cc.speaker_scale = s.Double("speaker_scale");
  cc.speaker_phone_scale = s.Double("speaker_phone_scale");
  cc.phone_weights = ParsePhoneWeights(s.Str("phone_weights"), inventory);
  cc.seed = s.Seed();
  const int64_t n_target = s.Int("n_target_trials");
  const int64_t n_nontarget = s.Int("n_nontarget_trials");

  const Corpus corpus = GenerateCorpus(cc, inventory);
  const uint64_t trial_seed = DeriveSeed(cc.seed, kTrialStream);
  if (n_heldout == 0) {
    const TrialList trials = MakeTrials(corpus, n_target, n_nontarget, trial_seed);
    SaveCorpusDir(Join(out_dir, "train"), corpus, &trials);
    out << "train: " << corpus.utterances.size() << " utterances, "
        << trials.trials.size() << " trials\n";
    return;
  }
  const CorpusSplit split = corpus.SplitPerSpeaker(n_train);
  const TrialList trials =
      MakeTrials(split.second, n_target, n_nontarget, trial_seed);
  SaveCorpusDir(Join(out_dir, "train"), split.first, nullptr);
  SaveCorpusDir(Join(out_dir, "eval"), split.second, &trials);
  out << "train: " << split.first.utterances.size() << " utterances\n"
      << "eval: " << split.second.utterances.size() << " utterances, "
      << trials.trials.size() << " trials\n";
}

void CmdTrain(const Settings& s, const std::string& out_dir, std::ostream& out) {
  const std::string& corpus_dir = s.Required("corpus");
  RequireExists(corpus_dir);
  TrainConfig tc;
  tc.speakers_per_batch = s.Int32("speakers_per_batch");
  tc.epochs = s.Int32("epochs");
  tc.learning_rate = s.Double("learning_rate");
  tc.momentum = s.Double("momentum");
  tc.encoder_layers = EncoderConfig::ParseLayers(s.Str("encoder_layers"));
  tc.embedding_dim = s.Int32("embedding_dim");
  tc.loss = LossFrom(s);
  tc.aam = AamFrom(s);
  tc.seed = s.Seed();
  tc.Validate();
  const Corpus corpus = LoadCorpusDir(corpus_dir);

  TrainResult result = Train(corpus, tc, [&](int epoch, const ModelState& m) {
    SaveCheckpoint(Join(out_dir, "ckpt_epoch" + std::to_string(epoch)), m);
  });
  std::string log;
  for (const auto& step : result.history) log += FormatStepLog(step) + '\n';
  WriteFileAtomic(Join(out_dir, "loss_log.txt"), log);
  for (int e = 1; e <= tc.epochs; ++e) {
    out << "epoch " << e << " mean_loss " << FormatDouble(result.EpochMeanLoss(e))
        << '\n';
  }
}

void CmdScore(const Settings& s, const std::string& out_dir, std::ostream& out) {
  const std::string& corpus_dir = s.Required("corpus");
  const std::string& ckpt = s.Required("checkpoint");
  const std::string trials_path = s.Str("trials").empty()
                                      ? Join(corpus_dir, "trials.txt")
                                      : s.Str("trials");
  RequireExists(corpus_dir);
  RequireExists(ckpt);
  RequireExists(trials_path);
  const Corpus corpus = LoadCorpusDir(corpus_dir);
  const ModelState model = LoadCheckpoint(ckpt);
  const TrialList trials = LoadTrials(trials_path);
  const auto records = ScoreTrials(model, corpus, trials);
  SaveScores(Join(out_dir, "scores.txt"), records);
  out << "scored " << records.size() << " trials\n";
}

void CmdEval(const Settings& s, const std::string& out_dir, std::ostream& out) {
  const std::string& path = s.Required("scores");
  RequireExists(path);
  DcfParams dcf;
  dcf.p_target = s.Double("p_target");
  dcf.c_miss = s.Double("c_miss");
  dcf.c_fa = s.Double("c_fa");
  const auto records = LoadScores(path);
  MetricReport fin;
  MetricReport evd;
  double corr = 0.0;
  try {
    fin = EvaluateColumn(records, ScoreColumn::kFinal, dcf);
    evd = EvaluateColumn(records, ScoreColumn::kEvidence, dcf);
    corr = ExplainabilityCorrelation(records);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError(path + ": " + e.what());
  }
  const std::string report = FormatMetricReport(fin, evd, corr);
  WriteFileAtomic(Join(out_dir, "metrics.txt"), report);
  WriteFileAtomic(Join(out_dir, "metrics.csv"), FormatMetricCsv(fin, evd));
  out << report;
}

void CmdFRatio(const Settings& s, const std::string& out_dir, std::ostream& out) {
  const std::string& path = s.Required("scores");
  RequireExists(path);
  const PhoneInventory inventory = InventoryFrom(s);
  const auto records = LoadScores(path);
  const FRatioReport report =
      ComputeFRatio(records, inventory, s.Int("n_samples"),
                    DeriveSeed(s.Seed(), kFRatioStream));
  const std::string csv = report.ToCsv();
  WriteFileAtomic(Join(out_dir, "fratio.csv"), csv);
  out << csv;
}

void CmdExplain(const Settings& s, const std::string& out_dir,
                std::ostream& out) {
  const std::string& path = s.Required("scores");
  RequireExists(path);
  const PhoneInventory inventory = InventoryFrom(s);
  const auto records = LoadScores(path);
  const std::string& enroll = s.Str("enroll");
  const std::string& test = s.Str("test");
  const ScoreRecord* rec = nullptr;
  if (!enroll.empty() || !test.empty()) {
    for (const auto& r : records) {
      if (r.enroll_id == enroll && r.test_id == test) {
        rec = &r;
        break;
      }
    }
    if (!rec) {
      throw ConfigError(path + ": no trial " + enroll + " / " + test);
    }
  } else {
    const int64_t idx = s.Int("trial_index");
    if (idx < 0 || idx >= static_cast<int64_t>(records.size())) {
      throw ConfigError(path + ": trial_index " + std::to_string(idx) +
                        " out of range");
    }
    rec = &records[idx];
  }
  const std::string text = ExportExplanation(*rec, inventory);
  WriteFileAtomic(
      Join(out_dir, "explain_" + rec->enroll_id + "_" + rec->test_id + ".tsv"),
      text);
  out << text;
}

Corpus GradCheckCorpus(uint64_t seed, int n_speakers) {
  PhoneInventory inventory({"P0", "P1", "P2", "P3", "P4", "[N-V]"});
  CorpusConfig cc;
  cc.n_speakers = n_speakers;
  cc.utts_per_speaker = 2;
  cc.feature_dim = 5;
  cc.min_segment_frames = 2;
  cc.max_segment_frames = 2;
  cc.min_phones_per_utt = 9;
  cc.max_phones_per_utt = 11;
  cc.seed = seed;
  return GenerateCorpus(cc, inventory);
}

int CmdGradCheck(const Settings& s, const std::string& out_dir,
                 std::ostream& out) {
  const uint64_t seed = s.Seed();
  const LossWeights weights = LossFrom(s);
  const AamConfig aam = AamFrom(s);
  const int k = s.Int32("gc_speakers");
  Corpus corpus;
  if (s.Str("corpus").empty()) {
    corpus = GradCheckCorpus(seed, k);
  } else {
    RequireExists(s.Str("corpus"));
    corpus = LoadCorpusDir(s.Str("corpus"));
  }
  ModelState model;
  if (s.Str("checkpoint").empty()) {
    EncoderConfig enc{static_cast<int>(corpus.utterances.at(0).Dim()),
                      EncoderConfig::ParseLayers(s.Str("gc_encoder_layers"))};
    model = InitModel(enc, s.Int32("gc_embedding_dim"), corpus.inventory.Size(),
                      corpus.SpeakerIds(), seed);
  } else {
    RequireExists(s.Str("checkpoint"));
    model = LoadCheckpoint(s.Str("checkpoint"));
  }
  Rng rng(DeriveSeed(seed, kGradCheckBatchStream));
  const PairSelection sel = SamplePairBatch(corpus, k, &rng);

  std::string report;
  bool passed = true;
  for (auto name : SplitFields(s.Str("gc_terms"), ",")) {
    LossTerm term;
    if (name == "all") term = LossTerm::kAll;
    else if (name == "aam") term = LossTerm::kAam;
    else if (name == "veri") term = LossTerm::kVeri;
    else if (name == "center") term = LossTerm::kCenter;
    else throw ConfigError("unknown loss term '" + std::string(name) + "'");
    const GradCheckReport r =
        GradCheck(model, corpus, sel, weights, aam, s.Double("gc_step"),
                  s.Double("gc_tolerance"), term);
    report += "term=" + std::string(name) + '\n' + r.ToString();
    passed = passed && r.passed;
  }
  report += passed ? "result=PASS\n" : "result=FAIL\n";
  WriteFileAtomic(Join(out_dir, "gradcheck.txt"), report);
  out << report;
  return passed ? kExitOk : kExitGradCheckFailed;
}

std::string Quote(std::string msg) {
  for (char& ch : msg) {
    if (ch == '"') ch = '\'';
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return '"' + msg + '"';
}

int Report(std::ostream& err, const char* kind, int code, const std::string& msg,
           const std::string& path = "", int64_t line = -1) {
  err << "expo: error=" << kind << " exit=" << code;
  if (!path.empty()) err << " path=" << path;
  if (line >= 0) err << " line=" << line;
  err << " message=" << Quote(msg) << '\n';
  return code;
}

}  // namespace

void SaveCorpusDir(const std::string& dir, const Corpus& corpus,
                   const TrialList* trials) {
  SaveInventory(Join(dir, "inventory.txt"), corpus.inventory);
  SaveFeatures(Join(dir, "features.txt"), corpus.utterances);
  SaveAlignments(Join(dir, "alignments.txt"), corpus.alignments,
                 corpus.inventory);
  if (trials) SaveTrials(Join(dir, "trials.txt"), *trials);
}

Corpus LoadCorpusDir(const std::string& dir) {
  for (const char* name : {"inventory.txt", "features.txt", "alignments.txt"}) {
    RequireExists(Join(dir, name));
  }
  const PhoneInventory inventory = LoadInventory(Join(dir, "inventory.txt"));
  return AssembleCorpus(inventory, LoadFeatures(Join(dir, "features.txt")),
                        LoadAlignments(Join(dir, "alignments.txt"), inventory));
}

int Run(const std::vector<std::string>& argv, std::ostream& out,
        std::ostream& err) {
  const std::vector<CommandSpec> commands = Commands();
  CLI::App app{"Explainable speaker verification with phonetic traits", "expo"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::string seed = "1";
  std::string out_dir = "expo_out";
  CLI::Option* seed_opt =
      app.add_option("--seed", seed, "global seed")->default_str(seed);
  CLI::Option* out_opt =
      app.add_option("--out-dir", out_dir, "output directory")->default_str(out_dir);
  app.add_option("--config", config_path, "key=value config file (flags win)");

  std::set<std::string> known = {"seed", "out_dir"};
  std::map<std::string, std::map<std::string, std::string>> flag_values;
  std::map<std::string, std::map<std::string, CLI::Option*>> flag_opts;
  std::map<std::string, CLI::App*> subs;
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.about);
    subs[cmd.name] = sub;
    sub->footer(
        "Global flags:\n  --config PATH   key=value config file (flags win)\n"
        "  --seed INT [1]  global seed\n"
        "  --out-dir DIR [expo_out]  output directory");
    for (const auto& o : cmd.options) {
      known.insert(o.key);
      flag_opts[cmd.name][o.key] =
          sub->add_option("--" + Dashed(o.key), flag_values[cmd.name][o.key],
                          o.help)
              ->default_str(o.def);
    }
  }

  try {
    std::vector<std::string> args(argv.rbegin(), argv.rend());
    if (!args.empty()) args.pop_back();  // program name
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return Report(err, "usage", kExitUsage, e.what());
  }

  try {
    std::map<std::string, std::string> file_values;
    if (!config_path.empty()) {
      RequireExists(config_path);
      file_values = ReadConfigFile(config_path, known);
    }
    const CommandSpec* cmd = nullptr;
    for (const auto& c : commands) {
      if (subs[c.name]->parsed()) cmd = &c;
    }
    std::map<std::string, std::string> values;
    for (const auto& o : cmd->options) {
      if (flag_opts[cmd->name][o.key]->count() > 0) {
        values[o.key] = flag_values[cmd->name][o.key];
      } else if (file_values.count(o.key)) {
        values[o.key] = file_values[o.key];
      } else {
        values[o.key] = o.def;
      }
    }
    values["seed"] = seed_opt->count() > 0 || !file_values.count("seed")
                         ? seed
                         : file_values["seed"];
    if (out_opt->count() == 0 && file_values.count("out_dir")) {
      out_dir = file_values["out_dir"];
    }
    const Settings settings(cmd->name, values);
    settings.Seed();

    fs::create_directories(out_dir);
    WriteFileAtomic(Join(out_dir, cmd->name + ".config.txt"), settings.Echo());
    if (cmd->name == "gen-corpus") CmdGenCorpus(settings, out_dir, out);
    else if (cmd->name == "train") CmdTrain(settings, out_dir, out);
    else if (cmd->name == "score") CmdScore(settings, out_dir, out);
    else if (cmd->name == "eval") CmdEval(settings, out_dir, out);
    else if (cmd->name == "fratio") CmdFRatio(settings, out_dir, out);
    else if (cmd->name == "explain") CmdExplain(settings, out_dir, out);
    else if (cmd->name == "gradcheck") {
      const int code = CmdGradCheck(settings, out_dir, out);
      if (code != kExitOk) {
        return Report(err, "gradcheck_failed", code,
                      "gradient check failed; see gradcheck.txt",
                      Join(out_dir, "gradcheck.txt"));
      }
    }
    return kExitOk;
  } catch (const ParseError& e) {
    return Report(err, "parse", kExitParse, e.what(), e.path(), e.line());
  } catch (const IoError& e) {
    return Report(err, "io", kExitIo, e.what(), e.path());
  } catch (const fs::filesystem_error& e) {
    return Report(err, "io", kExitIo, e.what(), e.path1().string());
  } catch (const ConfigError& e) {
    return Report(err, "config", kExitConfig, e.what());
  } catch (const DimensionError& e) {
    return Report(err, "data", kExitData, e.what());
  } catch (const EmptyUtteranceError& e) {
    return Report(err, "data", kExitData, e.what());
  } catch (const UndefinedEvidenceError& e) {
    return Report(err, "data", kExitData, e.what());
  } catch (const NumericError& e) {
    return Report(err, "numeric", kExitNumeric, e.what());
  } catch (const std::exception& e) {
    return Report(err, "internal", kExitInternal, e.what());
  }
}

}  // namespace cli
}  // namespace expo
