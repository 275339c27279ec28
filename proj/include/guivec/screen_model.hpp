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
#include <string>
#include <vector>

#include "guivec/checkpoint.hpp"
#include "guivec/component_model.hpp"
#include "guivec/corpus.hpp"
#include "guivec/layout_model.hpp"
#include "guivec/nn.hpp"
#include "guivec/text_provider.hpp"

namespace guivec {

struct ScreenModelDims {
  int component_dim = 768;
  int hidden_dim = 768;
  int layout_dim = 64;
  int content_dim = 768;
};

// rnn over component embeddings, then content_combiner(concat(rnn, layout)).
class ScreenModel {
 public:
  explicit ScreenModel(ScreenModelDims dims = {});

  const ScreenModelDims& dims() const { return dims_; }
  // `combiner_gain` scales the content_combiner's Glorot bound.
  void init(std::uint64_t seed, double combiner_gain = 1.0);

  std::vector<nn::Parameter<double>*> parameters();
  void zero_grad();

  Checkpoint to_checkpoint() const;
  static ScreenModel from_checkpoint(const Checkpoint& ckpt);

  nn::RecurrentLayer<double> rnn;
  nn::DenseLayer<double> content_combiner;

 private:
  ScreenModelDims dims_;
};

// Frozen per-screen inputs: component embeddings in pre-order and the layout
// embedding.
struct ScreenInput {
  nn::Matrix<double> components;  // embeddable components x component_dim; may have no rows
  Eigen::RowVectorXd layout;
};

ScreenInput prepare_screen(const GuiScreen& screen, const TextProvider& provider,
                           const ComponentModel& components, const LayoutAutoencoder& autoencoder);
// Batched; layout encoding runs over all screens at once.
std::vector<ScreenInput> prepare_screens(const std::vector<GuiScreen>& screens,
                                         const TextProvider& provider,
                                         const ComponentModel& components,
                                         const LayoutAutoencoder& autoencoder);

// Final RNN hidden state over the screen's components; zero when the screen
// has no embeddable component.
Eigen::VectorXd combine_components(const GuiScreen& screen, const TextProvider& provider,
                                   const ComponentModel& components, const ScreenModel& model);

struct ScreenForward {
  nn::RnnCache<double> rnn;
  nn::Matrix<double> x;        // screens x (hidden + layout)
  nn::Matrix<double> content;  // screens x content_dim
};

ScreenForward screen_forward(const ScreenModel& model, const std::vector<const ScreenInput*>& screens);
void screen_backward(ScreenModel& model, const ScreenForward& forward,
                     const nn::Matrix<double>& grad_content);

// Content vectors of every input, evaluated in chunks.
nn::Matrix<double> screen_contents(const ScreenModel& model, const std::vector<ScreenInput>& inputs);

struct ScreenEmbedding {
  Eigen::VectorXd content;  // content_dim
  Eigen::VectorXd full;     // content followed by the description embedding
};

ScreenEmbedding embed_screen(const ScreenInput& input, const Eigen::VectorXd& description,
                             const ScreenModel& model);
ScreenEmbedding embed_screen(const GuiScreen& screen, const std::string& description,
                             const TextProvider& provider, const ComponentModel& components,
                             const LayoutAutoencoder& autoencoder, const ScreenModel& model);

// Union of `n` distinct uniform draws from the universe, the batch screens and
// the trace screens, all excluding `correct`; sorted and deduplicated.
// Indices refer to the universe [0, universe_size). Throws UniverseTooSmall.
std::vector<int> sample_negatives(int correct, const std::vector<int>& batch,
                                  const std::vector<int>& trace, int universe_size, int n,
                                  nn::Rng& rng);
std::vector<std::string> sample_negatives(const std::string& correct,
                                          const std::vector<std::string>& batch,
                                          const InteractionTrace& trace,
                                          const std::vector<std::string>& universe, int n,
                                          nn::Rng& rng);

// One prediction window; indices are rows of a content matrix.
struct ScreenWindow {
  std::vector<int> context;
  int correct = 0;
  std::vector<int> negatives;
};

// Mean CE over windows with logits mean(context) . content(candidate) over
// {correct} followed by the negatives. Writes d(mean loss)/d(contents) when
// `grad_contents` is given.
double window_loss(const nn::Matrix<double>& contents, const std::vector<ScreenWindow>& windows,
                   nn::Matrix<double>* grad_contents = nullptr);

// Context positions of `center` within a trace of `length` screens.
std::vector<int> window_context(int center, int length, int radius);

// Loss of predicting trace[center] from its window, scored against
// `negatives`. With `accumulate` the gradient flows into the model.
double screen_cbow_loss(ScreenModel& model, const std::vector<const ScreenInput*>& trace,
                        std::size_t center, const std::vector<const ScreenInput*>& negatives,
                        int radius = 2, bool accumulate = false);

struct ScreenTrainingConfig {
  int window = 2;
  int negatives = 128;
  double learning_rate = 1e-3;
  int batch_size = 256;
  int epochs = 100;
  std::uint64_t seed = 0;
  double train_fraction = 0.9;
  double combiner_gain = 1.0;
};

struct ScreenTrainingResult {
  ScreenModel model;
  ScreenTrainingConfig config;
  std::vector<double> epoch_loss;
  std::size_t train_traces = 0;
  std::size_t validation_traces = 0;
  std::size_t train_windows = 0;
  std::size_t validation_windows = 0;
  std::size_t universe = 0;
  nlohmann::json held_in;
  nlohmann::json validation;
  nlohmann::json untrained_held_in;
  nlohmann::json untrained_validation;

  nlohmann::json report() const;
};

// `inputs` is aligned with corpus.screens.
ScreenTrainingResult train_screen_model(const Corpus& corpus, const std::vector<ScreenInput>& inputs,
                                        const ScreenTrainingConfig& config, ScreenModelDims dims = {});
ScreenTrainingResult train_screen_model(const Corpus& corpus, const ScreenTrainingConfig& config,
                                        const TextProvider& provider, const ComponentModel& components,
                                        const LayoutAutoencoder& autoencoder);

}  // namespace guivec
