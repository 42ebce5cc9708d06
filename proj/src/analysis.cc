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

#include "expo/analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "expo/rng.h"
#include "expo/text_io.h"

namespace expo {

namespace {

// One "accept iff score >= threshold" operating point.
struct OperatingPoint {
  double threshold;
  double frr;
  double far;
};

// Operating points in increasing threshold order, from accept-all to
// reject-all (threshold +inf).
std::vector<OperatingPoint> SweepOperatingPoints(
    std::span<const LabeledScore> scores) {
  int64_t n_target = 0;
  for (const auto& s : scores) n_target += s.target ? 1 : 0;
  const int64_t n_nontarget = static_cast<int64_t>(scores.size()) - n_target;
  if (n_target == 0 || n_nontarget == 0) {
    throw ConfigError("scores need both target and non-target trials");
  }
  std::vector<LabeledScore> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const LabeledScore& a, const LabeledScore& b) {
              return a.score < b.score;
            });
  std::vector<OperatingPoint> points;
  int64_t misses = 0;  // targets below the threshold
  int64_t false_accepts = n_nontarget;
  size_t i = 0;
  while (i < sorted.size()) {
    const double threshold = sorted[i].score;
    points.push_back({threshold, static_cast<double>(misses) / n_target,
                      static_cast<double>(false_accepts) / n_nontarget});
    while (i < sorted.size() && sorted[i].score == threshold) {
      if (sorted[i].target) {
        ++misses;
      } else {
        --false_accepts;
      }
      ++i;
    }
  }
  points.push_back({std::numeric_limits<double>::infinity(), 1.0, 0.0});
  return points;
}

}  // namespace

EerResult ComputeEer(std::span<const LabeledScore> scores) {
  for (const auto& s : scores) {
    if (!std::isfinite(s.score)) throw NumericError("non-finite score");
  }
  const auto points = SweepOperatingPoints(scores);
  // far - frr falls from 1 to -1; find where it first reaches 0.
  size_t j = 0;
  while (points[j].far - points[j].frr > 0.0) ++j;
  const OperatingPoint& b = points[j];
  if (b.far - b.frr == 0.0) return {b.frr, b.threshold};
  const OperatingPoint& a = points[j - 1];
  const double da = a.far - a.frr;
  const double db = b.far - b.frr;
  const double lambda = da / (da - db);
  EerResult res;
  res.eer = a.frr + lambda * (b.frr - a.frr);
  res.threshold = std::isfinite(b.threshold)
                      ? a.threshold + lambda * (b.threshold - a.threshold)
                      : a.threshold;
  return res;
}

double ComputeMinDcf(std::span<const LabeledScore> scores,
                     const DcfParams& params) {
  if (!(params.p_target > 0.0 && params.p_target < 1.0) ||
      !(params.c_miss > 0.0) || !(params.c_fa > 0.0)) {
    throw ConfigError("DCF needs 0 < p_target < 1 and positive costs");
  }
  const auto points = SweepOperatingPoints(scores);
  const double w_miss = params.c_miss * params.p_target;
  const double w_fa = params.c_fa * (1.0 - params.p_target);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    best = std::min(best, w_miss * p.frr + w_fa * p.far);
  }
  return best / std::min(w_miss, w_fa);
}

std::vector<LabeledScore> ExtractColumn(const std::vector<ScoreRecord>& records,
                                        ScoreColumn column) {
  std::vector<LabeledScore> out;
  for (const auto& r : records) {
    if (!r.target) continue;
    if (column == ScoreColumn::kFinal) {
      out.push_back({r.final_score, *r.target});
    } else if (r.evidence_score) {
      out.push_back({*r.evidence_score, *r.target});
    }
  }
  return out;
}

MetricReport EvaluateColumn(const std::vector<ScoreRecord>& records,
                            ScoreColumn column, const DcfParams& dcf) {
  const auto scores = ExtractColumn(records, column);
  MetricReport report;
  for (const auto& s : scores) (s.target ? report.n_target : report.n_nontarget)++;
  const EerResult eer = ComputeEer(scores);
  report.eer = eer.eer;
  report.threshold_at_eer = eer.threshold;
  report.min_dcf = ComputeMinDcf(scores, dcf);
  return report;
}

double PearsonCorrelation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("correlation of unequal lengths");
  if (x.size() < 2) throw ConfigError("correlation needs at least 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    throw NumericError("correlation with zero variance");
  }
  return sxy / std::sqrt(sxx * syy);
}

double ExplainabilityCorrelation(const std::vector<ScoreRecord>& records) {
  std::vector<double> finals;
  std::vector<double> evidence;
  for (const auto& r : records) {
    if (!r.evidence_score) continue;
    finals.push_back(r.final_score);
    evidence.push_back(*r.evidence_score);
  }
  return PearsonCorrelation(finals, evidence);
}

// --- F-ratio ------------------------------------------------------------------------

std::string FRatioReport::ToCsv() const {
  std::string out = "phone,within,between,ratio,included\n";
  for (const auto& r : rows) {
    out += r.phone + ',';
    if (r.included) {
      out += FormatDouble(r.within_mean) + ',' + FormatDouble(r.between_mean) +
             ',' + FormatDouble(r.ratio) + ",1\n";
    } else {
      out += "NA,NA,NA,0\n";
    }
  }
  return out;
}

FRatioReport ComputeFRatio(const std::vector<ScoreRecord>& records,
                           const PhoneInventory& inventory, int64_t n_samples,
                           uint64_t seed) {
  if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
  const int num_phones = inventory.Size();
  std::vector<std::vector<double>> within(num_phones);
  std::vector<std::vector<double>> between(num_phones);
  for (const auto& r : records) {
    if (!r.target) continue;
    if (r.similarity.Size() != num_phones) {
      throw DimensionError("score record has " +
                           std::to_string(r.similarity.Size()) +
                           " similarities, inventory has " +
                           std::to_string(num_phones));
    }
    auto& pools = *r.target ? within : between;
    for (int i = 0; i < num_phones; ++i) {
      if (r.similarity.values[i]) pools[i].push_back(*r.similarity.values[i]);
    }
  }
  bool any = false;
  for (int i = 0; i < num_phones; ++i) {
    any = any || !within[i].empty() || !between[i].empty();
  }
  if (!any) throw ConfigError("no defined trait similarity in any phone pool");

  FRatioReport report;
  report.n_samples = n_samples;
  for (int i = 0; i < num_phones; ++i) {
    FRatioRow row;
    row.phone = inventory.Label(i);
    row.n_within = static_cast<int64_t>(within[i].size());
    row.n_between = static_cast<int64_t>(between[i].size());
    row.n_available = std::min(row.n_within, row.n_between);
    row.included = row.n_available >= n_samples;
    if (row.included) {
      Rng rng(DeriveSeed(seed, static_cast<uint64_t>(i)));
      auto draw_mean = [&rng, n_samples](const std::vector<double>& pool) {
        double sum = 0.0;
        for (int64_t s = 0; s < n_samples; ++s) sum += pool[rng.Index(pool.size())];
        return sum / static_cast<double>(n_samples);
      };
      row.within_mean = draw_mean(within[i]);
      row.between_mean = draw_mean(between[i]);
      row.ratio = row.within_mean / row.between_mean;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

// --- Explanation export ---------------------------------------------------------------

std::string ExportExplanation(const ScoreRecord& record,
                              const PhoneInventory& inventory) {
  if (record.similarity.Size() != inventory.Size()) {
    throw DimensionError("similarity vector does not match the inventory");
  }
  std::string out;
  out += "enroll\t" + record.enroll_id + '\n';
  out += "test\t" + record.test_id + '\n';
  out += std::string("label\t") +
         (record.target ? (*record.target ? "1" : "0") : "NA") + '\n';
  out += "final\t" + FormatDouble(record.final_score) + '\n';
  out += "evidence\t" +
         (record.evidence_score ? FormatDouble(*record.evidence_score)
                                : std::string("NA")) +
         '\n';
  for (int i = 0; i < inventory.Size(); ++i) {
    const auto& v = record.similarity.values[i];
    out += "phone\t" + std::to_string(i) + '\t' + inventory.Label(i) + '\t' +
           (v ? FormatDouble(*v) : std::string("NA")) + '\n';
  }
  return out;
}

ScoreRecord ParseExplanation(const std::string& text,
                             const PhoneInventory& inventory,
                             const std::string& source) {
  ScoreRecord rec;
  rec.similarity.values.resize(inventory.Size());
  std::vector<bool> seen(inventory.Size(), false);
  bool has_final = false;
  std::istringstream in(text);
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = SplitTabs(line);
    auto fail = [&](const std::string& what) {
      return ParseError(source, line_no, what);
    };
    if (f[0] == "phone") {
      if (f.size() != 4) throw fail("phone row needs 4 fields");
      auto idx = ParseInt(f[1]);
      if (!idx || *idx < 0 || *idx >= inventory.Size() ||
          inventory.Label(static_cast<int>(*idx)) != f[2]) {
        throw fail("phone row does not match the inventory");
      }
      seen[*idx] = true;
      if (f[3] != "NA") {
        auto v = ParseDouble(f[3]);
        if (!v) throw fail("malformed similarity");
        rec.similarity.values[*idx] = *v;
      }
      continue;
    }
    if (f.size() != 2) throw fail("header row needs 2 fields");
    if (f[0] == "enroll") {
      rec.enroll_id = std::string(f[1]);
    } else if (f[0] == "test") {
      rec.test_id = std::string(f[1]);
    } else if (f[0] == "label") {
      if (f[1] == "1") rec.target = true;
      else if (f[1] == "0") rec.target = false;
      else if (f[1] != "NA") throw fail("label must be 1, 0 or NA");
    } else if (f[0] == "final") {
      auto v = ParseDouble(f[1]);
      if (!v) throw fail("malformed final score");
      rec.final_score = *v;
      has_final = true;
    } else if (f[0] == "evidence") {
      if (f[1] != "NA") {
        auto v = ParseDouble(f[1]);
        if (!v) throw fail("malformed evidence score");
        rec.evidence_score = *v;
      }
    } else {
      throw fail("unknown key '" + std::string(f[0]) + "'");
    }
  }
  if (!has_final) throw ParseError(source, line_no, "missing final score");
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw ParseError(source, line_no, "missing phone rows");
  }
  return rec;
}

std::string FormatMetricReport(const MetricReport& fin,
                               const MetricReport& evd, double correlation) {
  std::string out;
  auto add = [&out](const std::string& key, const std::string& value) {
    out += key + '=' + value + '\n';
  };
  for (const auto& [name, r] : {std::pair{"final", &fin}, {"evidence", &evd}}) {
    const std::string p = name;
    add(p + ".eer", FormatDouble(r->eer));
    add(p + ".min_dcf", FormatDouble(r->min_dcf));
    add(p + ".threshold_at_eer", FormatDouble(r->threshold_at_eer));
    add(p + ".n_target", std::to_string(r->n_target));
    add(p + ".n_nontarget", std::to_string(r->n_nontarget));
  }
  add("correlation.final_evidence", FormatDouble(correlation));
  return out;
}

std::string FormatMetricCsv(const MetricReport& fin, const MetricReport& evd) {
  std::string out = "column,eer,min_dcf,threshold_at_eer,n_target,n_nontarget\n";
  for (const auto& [name, r] : {std::pair{"final", &fin}, {"evidence", &evd}}) {
    out += std::string(name) + ',' + FormatDouble(r->eer) + ',' +
           FormatDouble(r->min_dcf) + ',' + FormatDouble(r->threshold_at_eer) +
           ',' + std::to_string(r->n_target) + ',' +
           std::to_string(r->n_nontarget) + '\n';
  }
  return out;
}

}  // namespace expo
