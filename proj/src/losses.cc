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

#include "expo/losses.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace expo {

void LossWeights::Validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0) || !(gamma >= 0.0)) {
    throw ConfigError("loss weights must be >= 0");
  }
}

void AamConfig::Validate() const {
  if (!(margin >= 0.0) || !(margin < std::numbers::pi / 2)) {
    throw ConfigError("AAM margin must be in [0, pi/2)");
  }
  if (!(scale > 0.0)) throw ConfigError("AAM scale must be > 0");
}

void PairBatch::Validate() const {
  const int k = K();
  if (k < 2) throw ConfigError("pair batch needs K >= 2 speakers");
  if (static_cast<int>(test_traits.size()) != k ||
      static_cast<int>(labels.size()) != k ||
      enroll_embeddings.rows() != k || test_embeddings.rows() != k) {
    throw DimensionError("pair batch members disagree on K");
  }
}

namespace {

void CheckTraitSets(std::span<const PhoneticTraitSet> enroll,
                    std::span<const PhoneticTraitSet> test) {
  if (enroll.size() != test.size()) {
    throw DimensionError("enrollment and test sides differ in size");
  }
  if (enroll.empty()) return;
  const auto rows = enroll[0].traits.rows();
  const auto cols = enroll[0].traits.cols();
  for (size_t k = 0; k < enroll.size(); ++k) {
    for (const PhoneticTraitSet* ts : {&enroll[k], &test[k]}) {
      if (ts->traits.rows() != rows || ts->traits.cols() != cols ||
          static_cast<Eigen::Index>(ts->present.size()) != rows) {
        throw DimensionError("trait sets in a batch must share I and D1");
      }
    }
  }
}

std::vector<Matrix> ZeroGrads(std::span<const PhoneticTraitSet> sets) {
  std::vector<Matrix> grads;
  grads.reserve(sets.size());
  for (const auto& ts : sets) {
    grads.push_back(Matrix::Zero(ts.traits.rows(), ts.traits.cols()));
  }
  return grads;
}

}  // namespace

TraitLossResult TraitVerificationLoss(std::span<const PhoneticTraitSet> enroll,
                                      std::span<const PhoneticTraitSet> test,
                                      double alpha, double beta) {
  if (enroll.size() < 2) throw ConfigError("verification loss needs K >= 2");
  CheckTraitSets(enroll, test);
  const size_t K = enroll.size();
  const Eigen::Index num_phones = enroll[0].traits.rows();

  TraitLossResult res;
  res.grad_enroll = ZeroGrads(enroll);
  res.grad_test = ZeroGrads(test);

  // Matched and nearest-unmatched pairs, recorded for the gradient pass.
  struct Pick {
    size_t k;
    Eigen::Index i;
    size_t h;
  };
  std::vector<Pick> matched;
  std::vector<Pick> unmatched;
  for (Eigen::Index i = 0; i < num_phones; ++i) {
    for (size_t k = 0; k < K; ++k) {
      if (!enroll[k].present[i]) continue;
      const auto e = enroll[k].traits.row(i);
      if (test[k].present[i]) {
        res.matched_sum += (e - test[k].traits.row(i)).squaredNorm();
        matched.push_back({k, i, k});
      }
      double best = std::numeric_limits<double>::infinity();
      size_t best_h = K;
      for (size_t h = 0; h < K; ++h) {
        if (h == k || !test[h].present[i]) continue;
        const double d = (e - test[h].traits.row(i)).squaredNorm();
        if (d < best) {
          best = d;
          best_h = h;
        }
      }
      if (best_h != K) {
        res.unmatched_sum += best;
        unmatched.push_back({k, i, best_h});
      }
    }
  }
  res.n_matched = static_cast<int64_t>(matched.size());
  res.n_unmatched = static_cast<int64_t>(unmatched.size());

  if (res.n_matched > 0) {
    const double c = alpha / static_cast<double>(res.n_matched);
    res.value += c * res.matched_sum;
    for (const Pick& p : matched) {
      const auto diff = enroll[p.k].traits.row(p.i) - test[p.h].traits.row(p.i);
      res.grad_enroll[p.k].row(p.i) += 2.0 * c * diff;
      res.grad_test[p.h].row(p.i) -= 2.0 * c * diff;
    }
  }
  if (res.n_unmatched > 0) {
    const double c = beta / static_cast<double>(res.n_unmatched);
    res.value -= c * res.unmatched_sum;
    for (const Pick& p : unmatched) {
      const auto diff = enroll[p.k].traits.row(p.i) - test[p.h].traits.row(p.i);
      res.grad_enroll[p.k].row(p.i) -= 2.0 * c * diff;
      res.grad_test[p.h].row(p.i) += 2.0 * c * diff;
    }
  }
  return res;
}

namespace {

// One side (enrollment or test) of the center loss.
double CenterSide(std::span<const PhoneticTraitSet> sets, double gamma,
                  std::vector<Matrix>* grads, int64_t* count) {
  int64_t total_present = 0;
  for (const auto& ts : sets) {
    const int n = ts.NumPresent();
    if (n == 0) {
      throw EmptyUtteranceError("utterance " + ts.utterance_id +
                                " has no present trait");
    }
    total_present += n;
  }
  *count += total_present;
  const double c = gamma / static_cast<double>(total_present);
  double spread = 0.0;
  for (size_t k = 0; k < sets.size(); ++k) {
    const auto& ts = sets[k];
    Eigen::RowVectorXd center = Eigen::RowVectorXd::Zero(ts.traits.cols());
    for (int i = 0; i < ts.NumPhones(); ++i) {
      if (ts.present[i]) center += ts.traits.row(i);
    }
    center /= static_cast<double>(ts.NumPresent());
    for (int i = 0; i < ts.NumPhones(); ++i) {
      if (!ts.present[i]) continue;
      const Eigen::RowVectorXd diff = ts.traits.row(i) - center;
      spread += diff.squaredNorm();
      // The center's own dependence cancels: sum_i (e_i - center) = 0.
      (*grads)[k].row(i) += 2.0 * c * diff;
    }
  }
  return c * spread;
}

}  // namespace

TraitLossResult TraitCenterLoss(std::span<const PhoneticTraitSet> enroll,
                                std::span<const PhoneticTraitSet> test,
                                double gamma) {
  CheckTraitSets(enroll, test);
  TraitLossResult res;
  res.grad_enroll = ZeroGrads(enroll);
  res.grad_test = ZeroGrads(test);
  if (enroll.empty()) return res;
  res.value = CenterSide(enroll, gamma, &res.grad_enroll, &res.n_matched) +
              CenterSide(test, gamma, &res.grad_test, &res.n_matched);
  return res;
}

AamResult AamSoftmaxLoss(const Matrix& embeddings, std::span<const int> labels,
                         const Matrix& class_weights, const AamConfig& cfg) {
  cfg.Validate();
  const Eigen::Index batch = embeddings.rows();
  const Eigen::Index num_classes = class_weights.rows();
  if (batch < 1) throw DimensionError("AAM loss over an empty batch");
  if (static_cast<Eigen::Index>(labels.size()) != batch) {
    throw DimensionError("AAM labels and embeddings differ in count");
  }
  if (class_weights.cols() != embeddings.cols()) {
    throw DimensionError("AAM class weights and embeddings differ in dim");
  }
  const double cos_m = std::cos(cfg.margin);
  const double sin_m = std::sin(cfg.margin);
  const double threshold = std::cos(std::numbers::pi - cfg.margin);
  const double fallback = std::sin(cfg.margin) * cfg.margin;

  const Vector w_norm = class_weights.rowwise().norm();
  for (Eigen::Index c = 0; c < num_classes; ++c) {
    if (!(w_norm(c) > 0.0)) {
      throw NumericError("AAM class weight row " + std::to_string(c) +
                         " has zero norm");
    }
  }

  AamResult res;
  res.grad_embeddings = Matrix::Zero(batch, embeddings.cols());
  res.grad_class_weights = Matrix::Zero(num_classes, class_weights.cols());
  const double inv_batch = 1.0 / static_cast<double>(batch);
  Vector logits(num_classes);
  Vector cosines(num_classes);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const int y = labels[b];
    if (y < 0 || y >= num_classes) {
      throw ConfigError("AAM label " + std::to_string(y) + " out of range");
    }
    const auto x = embeddings.row(b);
    const double x_norm = x.norm();
    if (!(x_norm > 0.0)) {
      throw NumericError("AAM embedding " + std::to_string(b) +
                         " has zero norm");
    }
    for (Eigen::Index c = 0; c < num_classes; ++c) {
      cosines(c) = std::clamp(
          class_weights.row(c).dot(x) / (w_norm(c) * x_norm), -1.0, 1.0);
      logits(c) = cfg.scale * cosines(c);
    }
    const double cy = cosines(y);
    double dphi = 1.0;
    if (cy > threshold) {
      const double sine = std::sqrt(std::max(1.0 - cy * cy, 1e-24));
      logits(y) = cfg.scale * (cy * cos_m - sine * sin_m);
      dphi = cos_m + cy * sin_m / sine;
    } else {
      logits(y) = cfg.scale * (cy - fallback);
    }
    const double max_logit = logits.maxCoeff();
    const Vector exps = (logits.array() - max_logit).exp().matrix();
    const double denom = exps.sum();
    res.value += inv_batch * (std::log(denom) - (logits(y) - max_logit));

    for (Eigen::Index c = 0; c < num_classes; ++c) {
      const double p = exps(c) / denom;
      double g = p - (c == y ? 1.0 : 0.0);
      g *= cfg.scale * (c == y ? dphi : 1.0) * inv_batch;
      if (g == 0.0) continue;
      const auto w = class_weights.row(c);
      // d cos / d x and d cos / d w for cos = w.x / (|w||x|).
      res.grad_embeddings.row(b) +=
          g * (w / (w_norm(c) * x_norm) - cosines(c) * x / (x_norm * x_norm));
      res.grad_class_weights.row(c) +=
          g * (x / (w_norm(c) * x_norm) -
               cosines(c) * w / (w_norm(c) * w_norm(c)));
    }
  }
  return res;
}

BatchLossResult TotalLoss(const PairBatch& batch, const LossWeights& weights,
                          const AamConfig& aam, const Matrix& class_weights,
                          LossTerm term) {
  batch.Validate();
  weights.Validate();
  const int K = batch.K();

  Matrix all_embeddings(2 * K, batch.enroll_embeddings.cols());
  all_embeddings.topRows(K) = batch.enroll_embeddings;
  all_embeddings.bottomRows(K) = batch.test_embeddings;
  std::vector<int> all_labels(batch.labels);
  all_labels.insert(all_labels.end(), batch.labels.begin(), batch.labels.end());
  AamResult aam_res = AamSoftmaxLoss(all_embeddings, all_labels, class_weights, aam);

  TraitLossResult veri = TraitVerificationLoss(
      batch.enroll_traits, batch.test_traits, weights.alpha, weights.beta);
  TraitLossResult center =
      TraitCenterLoss(batch.enroll_traits, batch.test_traits, weights.gamma);

  BatchLossResult res;
  res.values.aam = aam_res.value;
  res.values.veri = veri.value;
  res.values.center = center.value;
  res.values.total = aam_res.value + veri.value + center.value;

  const bool use_aam = term == LossTerm::kAll || term == LossTerm::kAam;
  const bool use_veri = term == LossTerm::kAll || term == LossTerm::kVeri;
  const bool use_center = term == LossTerm::kAll || term == LossTerm::kCenter;
  if (!use_aam) {
    aam_res.grad_embeddings.setZero();
    aam_res.grad_class_weights.setZero();
  }
  res.grad_enroll_embeddings = aam_res.grad_embeddings.topRows(K);
  res.grad_test_embeddings = aam_res.grad_embeddings.bottomRows(K);
  res.grad_class_weights = std::move(aam_res.grad_class_weights);
  res.grad_enroll_traits.resize(K);
  res.grad_test_traits.resize(K);
  for (int k = 0; k < K; ++k) {
    res.grad_enroll_traits[k] =
        Matrix::Zero(veri.grad_enroll[k].rows(), veri.grad_enroll[k].cols());
    res.grad_test_traits[k] = res.grad_enroll_traits[k];
    if (use_veri) {
      res.grad_enroll_traits[k] += veri.grad_enroll[k];
      res.grad_test_traits[k] += veri.grad_test[k];
    }
    if (use_center) {
      res.grad_enroll_traits[k] += center.grad_enroll[k];
      res.grad_test_traits[k] += center.grad_test[k];
    }
  }
  return res;
}

}  // namespace expo
