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

// Evaluation: EER / minDCF, final-vs-evidence correlation, per-phone F-ratio
// and per-trial explanation export.

#ifndef EXPO_ANALYSIS_H_
#define EXPO_ANALYSIS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "expo/corpus.h"
#include "expo/scoring.h"

namespace expo {

struct LabeledScore {
  double score = 0.0;
  bool target = false;
};

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

// Operating points are "accept iff score >= threshold" for every distinct
// score plus +inf; equal scores are therefore accepted together. The EER is
// read off the FAR/FRR crossing with linear interpolation between the two
// operating points that bracket it. Throws ConfigError on single-class input.
EerResult ComputeEer(std::span<const LabeledScore> scores);

struct DcfParams {
  double p_target = 0.01;
  double c_miss = 1.0;
  double c_fa = 1.0;
};

// min over the same operating points of
//   (c_miss * p * P_miss + c_fa * (1 - p) * P_fa) / min(c_miss * p, c_fa * (1 - p)).
double ComputeMinDcf(std::span<const LabeledScore> scores,
                     const DcfParams& params = {});

enum class ScoreColumn { kFinal, kEvidence };

struct MetricReport {
  double eer = 0.0;
  double min_dcf = 0.0;
  double threshold_at_eer = 0.0;
  int64_t n_target = 0;
  int64_t n_nontarget = 0;
};

// Labeled scores of one column; unlabeled records and, for the evidence
// column, records without evidence are skipped.
std::vector<LabeledScore> ExtractColumn(const std::vector<ScoreRecord>& records,
                                        ScoreColumn column);

MetricReport EvaluateColumn(const std::vector<ScoreRecord>& records,
                            ScoreColumn column, const DcfParams& dcf = {});

// Pearson correlation of (final, evidence) over records with evidence.
// Throws ConfigError with fewer than 2 such records, NumericError on zero
// variance.
double ExplainabilityCorrelation(const std::vector<ScoreRecord>& records);

double PearsonCorrelation(std::span<const double> x, std::span<const double> y);

struct FRatioRow {
  std::string phone;
  double within_mean = 0.0;
  double between_mean = 0.0;
  double ratio = 0.0;
  int64_t n_within = 0;   // defined s(i) among target trials
  int64_t n_between = 0;  // defined s(i) among non-target trials
  int64_t n_available = 0;  // min of the two
  bool included = false;
};

struct FRatioReport {
  std::vector<FRatioRow> rows;  // one per phone, inventory order
  int64_t n_samples = 0;

  // phone,within,between,ratio,included
  std::string ToCsv() const;
};

// For each phone, averages n_samples draws (with replacement) of s(i) from
// target trials and from non-target trials, and reports their ratio. Phones
// with fewer than n_samples defined values in either pool are excluded.
// Each phone draws from its own seed stream, so excluding one phone never
// changes another's row. Throws ConfigError when every pool is empty.
FRatioReport ComputeFRatio(const std::vector<ScoreRecord>& records,
                           const PhoneInventory& inventory, int64_t n_samples,
                           uint64_t seed);

// Tab-separated explanation of one trial: header rows (enroll, test, label,
// final, evidence) then one "phone<TAB>index<TAB>label<TAB>s(i)|NA" row per
// phone.
std::string ExportExplanation(const ScoreRecord& record,
                              const PhoneInventory& inventory);
ScoreRecord ParseExplanation(const std::string& text,
                             const PhoneInventory& inventory,
                             const std::string& source = "<explanation>");

// key=value lines for both score columns plus the correlation.
std::string FormatMetricReport(const MetricReport& final_report,
                               const MetricReport& evidence_report,
                               double correlation);
// column,eer,min_dcf,threshold_at_eer,n_target,n_nontarget
std::string FormatMetricCsv(const MetricReport& final_report,
                            const MetricReport& evidence_report);

}  // namespace expo

#endif  // EXPO_ANALYSIS_H_
