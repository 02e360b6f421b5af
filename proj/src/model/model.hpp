// Copyright 2026 The Sluice Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "diff/parameter.hpp"
#include "diff/rng.hpp"
#include "diff/tape.hpp"
#include "encoder/network.hpp"
#include "encoder/vocabulary.hpp"
#include "model/sharing.hpp"

namespace sluice::model {

enum class Preset {
  kLearnedSluice,
  kHardSharing,
  kLowSupervision,
  kCrossStitch,
  kGroupLasso,
  kFrustratinglyEasy,
  kSingleTask,
};

enum class AlphaMode { kLearned, kConstant };
enum class Mixing { kMixture, kSkip, kConcat };

struct Ablation {
  AlphaMode alpha = AlphaMode::kLearned;
  bool subspaces = true;
  Mixing mixing = Mixing::kMixture;
  bool operator==(const Ablation&) const = default;
};

struct ModelConfig {
  std::vector<std::string> task_names;
  std::vector<std::size_t> label_counts;  // one per task
  std::size_t main_task = 0;
  encoder::EmbeddingDims embedding;
  encoder::NetworkDims network;
  // Heads read the concatenation of all K layer outputs instead of a beta
  // mixture. Fixed at construction because it changes the head input size.
  bool concat_head = false;
  double gamma = 0.01;
  std::vector<double> lambdas;  // empty means 1.0 for every task
};

struct EncodedSentence {
  std::vector<std::uint32_t> words;
  std::vector<std::vector<std::uint32_t>> chars;
  std::size_t size() const { return words.size(); }
};

EncodedSentence encode_sentence(const encoder::Vocabulary& vocab,
                                std::span<const std::string> tokens);

class SluiceModel {
 public:
  SluiceModel(ModelConfig config, std::size_t vocab_words,
              std::size_t vocab_chars, diff::Rng& rng);

  SluiceModel(const SluiceModel&) = delete;
  SluiceModel& operator=(const SluiceModel&) = delete;

  const ModelConfig& config() const { return config_; }
  std::size_t tasks() const { return networks_.size(); }
  std::size_t layers() const { return config_.network.layers; }
  std::size_t subspaces() const { return config_.network.subspaces; }
  std::size_t main_task() const { return config_.main_task; }
  const std::string& task_name(std::size_t m) const {
    return config_.task_names[m];
  }

  encoder::EmbeddingTable& embedding() { return embedding_; }
  encoder::TaskNetwork& network(std::size_t m) { return networks_.at(m); }
  AlphaUnit& alpha(std::size_t k) { return alphas_.at(k - 1); }  // 1-based
  const AlphaUnit& alpha(std::size_t k) const { return alphas_.at(k - 1); }
  BetaMixer& beta(std::size_t m) { return betas_.at(m); }
  const BetaMixer& beta(std::size_t m) const { return betas_.at(m); }

  double gamma() const { return gamma_; }
  void set_gamma(double g);
  double lambda(std::size_t m) const { return lambdas_.at(m); }
  void set_lambda(std::size_t m, double value);

  Preset preset() const { return preset_; }
  void set_preset_tag(Preset p) { preset_ = p; }
  const Ablation& ablation() const { return ablation_; }
  void set_ablation_tag(const Ablation& a) { ablation_ = a; }

  // True once any update has been applied.
  bool trained() const { return trained_; }

  std::vector<diff::Parameter*> parameters();
  std::vector<diff::Parameter*> sharing_parameters();

  // Introspected sharing census: alpha entries (tied entries counted per
  // entry) and beta weights.
  ExtraParams extra_params() const;

  // Copies task 0's recurrent layers (and its head when label counts agree)
  // into every other task.
  void mirror_task_initialization();

  void sgd_step(double lr);

 private:
  ModelConfig config_;
  encoder::EmbeddingTable embedding_;
  std::vector<encoder::TaskNetwork> networks_;
  std::vector<AlphaUnit> alphas_;
  std::vector<BetaMixer> betas_;
  double gamma_;
  std::vector<double> lambdas_;
  Preset preset_ = Preset::kLearnedSluice;
  Ablation ablation_;
  bool trained_ = false;
};

struct ForwardResult {
  // [task][layer][position]: bidirectional layer outputs before alpha mixing.
  std::vector<std::vector<std::vector<diff::Var>>> raw;
  // [task][layer][position]: per-task concatenation of alpha-mixed subspaces;
  // layer k+1 reads mixed[.][k].
  std::vector<std::vector<std::vector<diff::Var>>> mixed;
  // [task][position]; empty for tasks whose head was not requested.
  std::vector<std::vector<diff::Var>> logits;
};

// `heads[m]` selects which task heads are evaluated; empty selects all.
ForwardResult forward_all_tasks(diff::Tape& tape, SluiceModel& model,
                                const EncodedSentence& sentence,
                                const std::vector<bool>& heads = {});

// sum over tasks, layers, directions and subspace pairs s < t of
// ||G_s^T G_t||_F^2, where G_s holds the input weights of subspace s's units
// (all four gates) as columns.
diff::Var orthogonality_penalty(diff::Tape& tape, SluiceModel& model);
double orthogonality_value(const SluiceModel& model);

// ||A^T B||_F^2 for column blocks A and B of equal height.
diff::Var subspace_overlap(diff::Var a, diff::Var b);

struct TaskExample {
  std::size_t task = 0;
  const EncodedSentence* sentence = nullptr;
  const std::vector<std::uint32_t>* tags = nullptr;
};

struct LossTerms {
  diff::Var total;
  std::vector<double> task_loss;  // NaN for tasks absent from the batch
  std::vector<std::size_t> task_tokens;
  double penalty = 0.0;
};

// sum_m lambda_m * L_m + gamma * L_c with L_m the mean token cross-entropy of
// task m over the batch. Examples sharing a sentence reuse one forward pass.
LossTerms total_loss(diff::Tape& tape, SluiceModel& model,
                     std::span<const TaskExample> batch);

}  // namespace sluice::model
