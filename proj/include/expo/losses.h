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

// Training objectives with analytic gradients:
//   L_all = L_aam + L_veri + L_center
// L_veri and L_center act on the (unfiltered) phonetic trait sets of a pair
// batch; L_aam acts on the speaker embeddings.

#ifndef EXPO_LOSSES_H_
#define EXPO_LOSSES_H_

#include <span>
#include <string>
#include <vector>

#include "expo/common.h"
#include "expo/trait_layer.h"

namespace expo {

struct LossWeights {
  double alpha = 7e-4;  // matched-pair trait distance
  double beta = 1e-5;   // nearest unmatched-pair trait distance (subtracted)
  double gamma = 1e-4;  // trait-center spread

  void Validate() const;
};

struct AamConfig {
  double margin = 0.2;
  double scale = 30.0;

  void Validate() const;
};

// K speakers, one enrollment and one test utterance each.
struct PairBatch {
  std::vector<std::string> speaker_ids;
  std::vector<int> labels;                    // class index per speaker
  std::vector<PhoneticTraitSet> enroll_traits;
  std::vector<PhoneticTraitSet> test_traits;
  Matrix enroll_embeddings;                   // K x D2
  Matrix test_embeddings;                     // K x D2

  int K() const { return static_cast<int>(enroll_traits.size()); }
  void Validate() const;
};

// Value plus gradients w.r.t. every trait row (I x D1 per utterance).
struct TraitLossResult {
  double value = 0.0;
  std::vector<Matrix> grad_enroll;
  std::vector<Matrix> grad_test;
  // Diagnostics.
  double matched_sum = 0.0;
  double unmatched_sum = 0.0;
  int64_t n_matched = 0;
  int64_t n_unmatched = 0;
};

// (alpha/N1) sum ||e_k^i - t_k^i||^2 over co-present matched pairs minus
// (beta/N2) sum_k,i min_{h != k} ||e_k^i - t_h^i||^2, where the minimum only
// ranges over h whose test trait i is present, and (i, k) terms without any
// such h are skipped. An empty sum drops its term.
TraitLossResult TraitVerificationLoss(std::span<const PhoneticTraitSet> enroll,
                                      std::span<const PhoneticTraitSet> test,
                                      double alpha, double beta);

// gamma * (sum ||e_k^i - center(e_k)||^2 / sum_k N_e,k) + same for test.
TraitLossResult TraitCenterLoss(std::span<const PhoneticTraitSet> enroll,
                                std::span<const PhoneticTraitSet> test,
                                double gamma);

struct AamResult {
  double value = 0.0;
  Matrix grad_embeddings;     // B x D2
  Matrix grad_class_weights;  // C x D2
};

// Additive angular margin softmax cross-entropy, averaged over the rows.
// The true-class logit is s*cos(theta + m) while theta + m < pi, and
// s*(cos(theta) - m*sin(m)) past that point.
AamResult AamSoftmaxLoss(const Matrix& embeddings, std::span<const int> labels,
                         const Matrix& class_weights, const AamConfig& cfg);

// Which part of L_all a gradient is taken of. The reported breakdown always
// holds every term.
enum class LossTerm { kAll, kAam, kVeri, kCenter };

struct LossBreakdown {
  double aam = 0.0;
  double veri = 0.0;
  double center = 0.0;
  double total = 0.0;
};

struct BatchLossResult {
  LossBreakdown values;
  std::vector<Matrix> grad_enroll_traits;  // K of I x D1
  std::vector<Matrix> grad_test_traits;
  Matrix grad_enroll_embeddings;  // K x D2
  Matrix grad_test_embeddings;
  Matrix grad_class_weights;
};

BatchLossResult TotalLoss(const PairBatch& batch, const LossWeights& weights,
                          const AamConfig& aam, const Matrix& class_weights,
                          LossTerm term = LossTerm::kAll);

}  // namespace expo

#endif  // EXPO_LOSSES_H_
