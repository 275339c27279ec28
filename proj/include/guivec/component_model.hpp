// Copyright 2026 The guivec Authors.
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

#include <cstdint>
#include <vector>

#include "guivec/checkpoint.hpp"
#include "guivec/corpus.hpp"
#include "guivec/nn.hpp"
#include "guivec/text_provider.hpp"

namespace guivec {

struct ComponentModelDims {
  int text_dim = kTextDim;
  int class_dim = 6;
  int embed_dim = 768;
  int categories = static_cast<int>(kNumCategories);
};

// class_table (categories x class_dim), combiner (text+class -> embed),
// text_head (embed -> text), class_head (embed -> class).
class ComponentModel {
 public:
  explicit ComponentModel(ComponentModelDims dims = {});

  const ComponentModelDims& dims() const { return dims_; }
  void init(std::uint64_t seed);

  // combiner(concat(text, class_table[category])).
  Eigen::RowVectorXd embed(const Eigen::RowVectorXd& text, std::size_t category) const;

  std::vector<nn::Parameter<double>*> parameters();
  void zero_grad();

  Checkpoint to_checkpoint() const;
  static ComponentModel from_checkpoint(const Checkpoint& ckpt);

  nn::EmbeddingTable<double> class_table;
  nn::DenseLayer<double> combiner;
  nn::DenseLayer<double> text_head;
  nn::DenseLayer<double> class_head;

 private:
  ComponentModelDims dims_;
};

// Missing text contributes the zero text vector.
Eigen::VectorXd embed_component(const GuiComponent& c, const TextProvider& provider,
                                const ComponentModel& model);

// One CBOW example. Text references are rows of a shared text matrix; -1 means
// the component has no text (context) or no vocabulary entry (target).
struct ComponentSample {
  std::vector<int> context_text;
  std::vector<int> context_class;
  int target_text = -1;
  int target_class = 0;
};

// Builds the sample for `target`. Throws EmptyContext when the screen has no
// other embeddable component.
ComponentSample make_component_sample(NodeId target, const GuiScreen& screen, std::size_t k,
                                      DistanceMetric metric, const Vocabulary& texts);

struct ComponentBatchLoss {
  double text = 0.0;   // mean text CE over samples that have a text target
  double cls = 0.0;    // mean class CE
  double total = 0.0;  // mean over samples of (text CE + class CE)
};

// Loss of a batch of samples. `texts` holds one embedding per row; the first
// `vocab_size` rows form the prediction vocabulary. With `accumulate`, the
// gradient of `total` is added into the parameter gradients.
ComponentBatchLoss component_batch_loss(ComponentModel& model,
                                        const std::vector<const ComponentSample*>& batch,
                                        const nn::Matrix<double>& texts, Eigen::Index vocab_size,
                                        bool accumulate);

// Text logits (batch x vocab_size) for ranking.
nn::Matrix<double> component_text_logits(const ComponentModel& model,
                                         const std::vector<const ComponentSample*>& batch,
                                         const nn::Matrix<double>& texts, Eigen::Index vocab_size);

// Loss of a single target: text CE against `vocab` (skipped when the target
// has no text in it) plus class CE. Context texts come from `provider`.
double component_cbow_loss(NodeId target, const GuiScreen& screen, const ComponentModel& model,
                           const Vocabulary& vocab, const TextProvider& provider,
                           std::size_t k = 16, DistanceMetric metric = DistanceMetric::kEuclidean);

struct ComponentTrainingConfig {
  std::size_t context_k = 16;
  DistanceMetric metric = DistanceMetric::kEuclidean;
  double learning_rate = 1e-3;
  int batch_size = 256;
  int epochs = 120;
  std::uint64_t seed = 0;
  double train_fraction = 0.9;
};

struct ComponentTrainingResult {
  ComponentModel model;
  ComponentTrainingConfig config;
  std::vector<double> epoch_loss;
  std::size_t vocab_size = 0;
  std::size_t train_screens = 0;
  std::size_t validation_screens = 0;
  std::size_t train_samples = 0;
  std::size_t validation_samples = 0;
  std::size_t skipped_targets = 0;  // targets without context
  nlohmann::json held_in;           // text-prediction ranks over training targets
  nlohmann::json validation;

  nlohmann::json report() const;
};

ComponentTrainingResult train_component_model(const Corpus& corpus,
                                              const ComponentTrainingConfig& config,
                                              const TextProvider& provider);

}  // namespace guivec
