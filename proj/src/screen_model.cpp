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

#include "guivec/screen_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "guivec/error.hpp"
#include "guivec/metrics.hpp"
#include "guivec/util.hpp"

namespace guivec {

using Mat = nn::Matrix<double>;

ScreenModel::ScreenModel(ScreenModelDims dims)
    : rnn(dims.component_dim, dims.hidden_dim, "rnn"),
      content_combiner(dims.hidden_dim + dims.layout_dim, dims.content_dim, "content_combiner"),
      dims_(dims) {}

void ScreenModel::init(std::uint64_t seed, double combiner_gain) {
  nn::Rng rng(seed);
  rnn.init_glorot(rng);
  content_combiner.init_glorot(rng);
  content_combiner.weight.value *= combiner_gain;
}

std::vector<nn::Parameter<double>*> ScreenModel::parameters() {
  std::vector<nn::Parameter<double>*> out = rnn.parameters();
  for (auto* p : content_combiner.parameters()) out.push_back(p);
  return out;
}

void ScreenModel::zero_grad() { nn::zero_grads(parameters()); }

Checkpoint ScreenModel::to_checkpoint() const {
  Checkpoint ckpt;
  ckpt.header = {{"model", "screen_model"},
                 {"dims",
                  {{"component", dims_.component_dim},
                   {"hidden", dims_.hidden_dim},
                   {"layout", dims_.layout_dim},
                   {"content", dims_.content_dim}}},
                 {"rnn_activation", "tanh"}};
  add_parameters<double>(ckpt, const_cast<ScreenModel&>(*this).parameters());
  return ckpt;
}

ScreenModel ScreenModel::from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.header.value("model", "") != "screen_model") throw FormatError("checkpoint is not a screen model");
  const auto& d = ckpt.header.at("dims");
  ScreenModelDims dims;
  dims.component_dim = d.at("component");
  dims.hidden_dim = d.at("hidden");
  dims.layout_dim = d.at("layout");
  dims.content_dim = d.at("content");
  ScreenModel model(dims);
  load_parameters<double>(ckpt, model.parameters());
  return model;
}

namespace {

Mat component_matrix(const GuiScreen& screen, const TextProvider& provider, const ComponentModel& components) {
  Mat m(static_cast<Eigen::Index>(screen.embeddable.size()), components.dims().embed_dim);
  for (std::size_t i = 0; i < screen.embeddable.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) =
        embed_component(screen.node(screen.embeddable[i]), provider, components).transpose();
  }
  return m;
}

}  // namespace

ScreenInput prepare_screen(const GuiScreen& screen, const TextProvider& provider,
                           const ComponentModel& components, const LayoutAutoencoder& autoencoder) {
  ScreenInput in;
  in.components = component_matrix(screen, provider, components);
  in.layout = encode_layout(render_layout(screen), autoencoder).transpose();
  return in;
}

std::vector<ScreenInput> prepare_screens(const std::vector<GuiScreen>& screens, const TextProvider& provider,
                                         const ComponentModel& components,
                                         const LayoutAutoencoder& autoencoder) {
  std::vector<ScreenInput> out(screens.size());
  std::vector<LayoutBitmap> bitmaps;
  bitmaps.reserve(screens.size());
  for (std::size_t i = 0; i < screens.size(); ++i) {
    out[i].components = component_matrix(screens[i], provider, components);
    bitmaps.push_back(render_layout(screens[i]));
  }
  constexpr std::size_t kChunk = 64;
  for (std::size_t start = 0; start < bitmaps.size(); start += kChunk) {
    const std::size_t end = std::min(bitmaps.size(), start + kChunk);
    const std::vector<LayoutBitmap> chunk(bitmaps.begin() + static_cast<std::ptrdiff_t>(start),
                                          bitmaps.begin() + static_cast<std::ptrdiff_t>(end));
    const nn::Matrix<float> codes = autoencoder.encode(stack_bitmaps(chunk));
    for (std::size_t i = start; i < end; ++i) {
      out[i].layout = codes.row(static_cast<Eigen::Index>(i - start)).cast<double>();
    }
  }
  return out;
}

Eigen::VectorXd combine_components(const GuiScreen& screen, const TextProvider& provider,
                                   const ComponentModel& components, const ScreenModel& model) {
  const Mat seq = component_matrix(screen, provider, components);
  return model.rnn.forward_batch({&seq}).outputs.row(0).transpose();
}

ScreenForward screen_forward(const ScreenModel& model, const std::vector<const ScreenInput*>& screens) {
  const ScreenModelDims& d = model.dims();
  std::vector<const Mat*> seqs;
  seqs.reserve(screens.size());
  for (const ScreenInput* s : screens) {
    if (s->layout.size() != d.layout_dim) throw ShapeMismatch("layout embedding width does not match the model");
    seqs.push_back(&s->components);
  }
  ScreenForward f;
  f.rnn = model.rnn.forward_batch(seqs);
  f.x.resize(static_cast<Eigen::Index>(screens.size()), d.hidden_dim + d.layout_dim);
  f.x.leftCols(d.hidden_dim) = f.rnn.outputs;
  for (std::size_t i = 0; i < screens.size(); ++i) {
    f.x.row(static_cast<Eigen::Index>(i)).tail(d.layout_dim) = screens[i]->layout;
  }
  f.content = model.content_combiner.forward(f.x);
  return f;
}

void screen_backward(ScreenModel& model, const ScreenForward& forward, const Mat& grad_content) {
  const Mat g_x = model.content_combiner.backward(forward.x, grad_content);
  model.rnn.backward_batch(forward.rnn, g_x.leftCols(model.dims().hidden_dim), false);
}

Mat screen_contents(const ScreenModel& model, const std::vector<ScreenInput>& inputs) {
  Mat out(static_cast<Eigen::Index>(inputs.size()), model.dims().content_dim);
  constexpr std::size_t kChunk = 256;
  for (std::size_t start = 0; start < inputs.size(); start += kChunk) {
    std::vector<const ScreenInput*> chunk;
    for (std::size_t i = start; i < std::min(inputs.size(), start + kChunk); ++i) chunk.push_back(&inputs[i]);
    out.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(chunk.size())) =
        screen_forward(model, chunk).content;
  }
  return out;
}

ScreenEmbedding embed_screen(const ScreenInput& input, const Eigen::VectorXd& description,
                             const ScreenModel& model) {
  ScreenEmbedding e;
  e.content = screen_forward(model, {&input}).content.row(0).transpose();
  e.full.resize(e.content.size() + description.size());
  e.full << e.content, description;
  return e;
}

ScreenEmbedding embed_screen(const GuiScreen& screen, const std::string& description,
                             const TextProvider& provider, const ComponentModel& components,
                             const LayoutAutoencoder& autoencoder, const ScreenModel& model) {
  return embed_screen(prepare_screen(screen, provider, components, autoencoder),
                      provider.embed(description).values(), model);
}

std::vector<int> sample_negatives(int correct, const std::vector<int>& batch, const std::vector<int>& trace,
                                  int universe_size, int n, nn::Rng& rng) {
  if (universe_size < 2) throw UniverseTooSmall("negative sampling needs at least two screens");
  if (correct < 0 || correct >= universe_size) throw IndexOutOfRange("correct screen outside the universe");
  std::set<int> out;
  const int others = universe_size - 1;
  auto lift = [&](int x) { return x < correct ? x : x + 1; };
  if (n >= others) {
    for (int x = 0; x < others; ++x) out.insert(lift(x));
  } else if (n > 0) {
    // Floyd's algorithm: n distinct values from [0, others).
    std::set<int> picked;
    for (int j = others - n; j < others; ++j) {
      const auto t = static_cast<int>(nn::uniform_index(rng, static_cast<std::uint64_t>(j) + 1));
      picked.insert(picked.count(t) ? j : t);
    }
    for (int x : picked) out.insert(lift(x));
  }
  for (const std::vector<int>* extra : {&batch, &trace}) {
    for (int x : *extra) {
      if (x < 0 || x >= universe_size) throw IndexOutOfRange("screen outside the universe");
      if (x != correct) out.insert(x);
    }
  }
  return {out.begin(), out.end()};
}

std::vector<std::string> sample_negatives(const std::string& correct, const std::vector<std::string>& batch,
                                          const InteractionTrace& trace,
                                          const std::vector<std::string>& universe, int n, nn::Rng& rng) {
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < universe.size(); ++i) index.emplace(universe[i], static_cast<int>(i));
  auto lookup = [&](const std::string& id) {
    auto it = index.find(id);
    if (it == index.end()) throw UnknownScreenId("screen " + id + " is not in the universe");
    return it->second;
  };
  std::vector<int> b, t;
  for (const std::string& id : batch) b.push_back(lookup(id));
  for (const std::string& id : trace.screens) t.push_back(lookup(id));
  if (universe.size() < 2) throw UniverseTooSmall("negative sampling needs at least two screens");
  const std::vector<int> picked =
      sample_negatives(lookup(correct), b, t, static_cast<int>(universe.size()), n, rng);
  std::vector<std::string> out;
  for (int i : picked) out.push_back(universe[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<int> window_context(int center, int length, int radius) {
  std::vector<int> out;
  for (int j = std::max(0, center - radius); j <= std::min(length - 1, center + radius); ++j) {
    if (j != center) out.push_back(j);
  }
  return out;
}

double window_loss(const Mat& contents, const std::vector<ScreenWindow>& windows, Mat* grad_contents) {
  if (grad_contents) *grad_contents = Mat::Zero(contents.rows(), contents.cols());
  if (windows.empty()) return 0.0;
  const double inv_w = 1.0 / static_cast<double>(windows.size());
  double total = 0.0;
  for (const ScreenWindow& w : windows) {
    if (w.context.empty()) throw EmptyContext("screen window without context");
    Eigen::RowVectorXd p = Eigen::RowVectorXd::Zero(contents.cols());
    for (int c : w.context) p += contents.row(c);
    p /= static_cast<double>(w.context.size());
    std::vector<int> candidates{w.correct};
    candidates.insert(candidates.end(), w.negatives.begin(), w.negatives.end());
    Eigen::RowVectorXd logits(static_cast<Eigen::Index>(candidates.size()));
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      logits[static_cast<Eigen::Index>(k)] = p.dot(contents.row(candidates[k]));
    }
    const nn::CrossEntropyResult ce = nn::cross_entropy(logits, 0);
    total += ce.loss;
    if (!grad_contents) continue;
    Eigen::RowVectorXd g_p = Eigen::RowVectorXd::Zero(contents.cols());
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      const double g = ce.grad[static_cast<Eigen::Index>(k)] * inv_w;
      g_p += g * contents.row(candidates[k]);
      grad_contents->row(candidates[k]) += g * p;
    }
    g_p /= static_cast<double>(w.context.size());
    for (int c : w.context) grad_contents->row(c) += g_p;
  }
  return total * inv_w;
}

double screen_cbow_loss(ScreenModel& model, const std::vector<const ScreenInput*>& trace, std::size_t center,
                        const std::vector<const ScreenInput*>& negatives, int radius, bool accumulate) {
  if (trace.size() < 2) throw EmptyContext("screen prediction needs a trace of at least two screens");
  if (center >= trace.size()) throw IndexOutOfRange("window center outside the trace");
  std::vector<const ScreenInput*> needed = trace;
  ScreenWindow w;
  for (int j : window_context(static_cast<int>(center), static_cast<int>(trace.size()), radius)) {
    w.context.push_back(j);
  }
  w.correct = static_cast<int>(center);
  for (const ScreenInput* n : negatives) {
    w.negatives.push_back(static_cast<int>(needed.size()));
    needed.push_back(n);
  }
  const ScreenForward f = screen_forward(model, needed);
  if (!accumulate) return window_loss(f.content, {w});
  Mat grad;
  const double loss = window_loss(f.content, {w}, &grad);
  screen_backward(model, f, grad);
  return loss;
}

nlohmann::json ScreenTrainingResult::report() const {
  nlohmann::json j;
  j["model"] = "screen_model";
  j["config"] = {{"window", config.window},
                 {"negatives", config.negatives},
                 {"learning_rate", config.learning_rate},
                 {"batch_size", config.batch_size},
                 {"epochs", config.epochs},
                 {"seed", config.seed},
                 {"train_fraction", config.train_fraction}};
  j["scorer"] = "dot";
  j["universe"] = universe;
  j["train_traces"] = train_traces;
  j["validation_traces"] = validation_traces;
  j["train_windows"] = train_windows;
  j["validation_windows"] = validation_windows;
  j["epoch_loss"] = epoch_loss;
  j["held_in"] = held_in;
  j["validation"] = validation;
  j["untrained"] = {{"held_in", untrained_held_in}, {"validation", untrained_validation}};
  return j;
}

namespace {

struct IndexedWindow {
  std::size_t trace = 0;
  std::vector<int> context;
  int correct = 0;
};

// Ranks the whole universe by dot product with the mean context vector.
nlohmann::json window_metrics(const Mat& contents, const std::vector<IndexedWindow>& windows) {
  RankTally tally(static_cast<std::size_t>(contents.rows()));
  double squared = 0.0;
  double norms = 0.0;
  for (const IndexedWindow& w : windows) {
    Eigen::RowVectorXd p = Eigen::RowVectorXd::Zero(contents.cols());
    for (int c : w.context) p += contents.row(c);
    p /= static_cast<double>(w.context.size());
    const Eigen::VectorXd scores = contents * p.transpose();
    tally.add(rank_of(scores, w.correct));
    squared += (p - contents.row(w.correct)).squaredNorm();
    norms += contents.row(w.correct).norm();
  }
  nlohmann::json j = tally.to_json();
  if (windows.empty() || norms == 0.0) {
    j["normalized_rmse"] = nullptr;
  } else {
    const auto n = static_cast<double>(windows.size());
    j["normalized_rmse"] = std::sqrt(squared / n) / (norms / n);
  }
  return j;
}

}  // namespace

ScreenTrainingResult train_screen_model(const Corpus& corpus, const std::vector<ScreenInput>& inputs,
                                        const ScreenTrainingConfig& config, ScreenModelDims dims) {
  if (inputs.size() != corpus.screens.size()) throw ShapeMismatch("screen inputs do not match the corpus");
  if (config.window < 1 || config.negatives < 1 || config.batch_size < 1 || config.epochs < 0) {
    throw Error("invalid screen training config");
  }
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
    throw Error("train fraction must lie strictly between 0 and 1");
  }
  const std::map<std::string, std::size_t> index = corpus.index_by_id();
  std::vector<std::vector<int>> trace_rows;
  std::vector<IndexedWindow> train_windows, validation_windows;
  ScreenTrainingResult result{ScreenModel(dims)};
  result.config = config;
  for (const InteractionTrace& t : corpus.traces) {
    if (t.screens.size() < 2) continue;
    std::vector<int> rows;
    for (const std::string& id : t.screens) {
      auto it = index.find(id);
      if (it == index.end()) throw UnknownScreenId("trace " + t.trace_id + " references unknown screen " + id);
      rows.push_back(static_cast<int>(it->second));
    }
    const bool train = in_training_split(t.trace_id, config.train_fraction);
    (train ? result.train_traces : result.validation_traces)++;
    auto& target = train ? train_windows : validation_windows;
    const auto len = static_cast<int>(rows.size());
    for (int i = 0; i < len; ++i) {
      IndexedWindow w;
      w.trace = trace_rows.size();
      for (int j : window_context(i, len, config.window)) w.context.push_back(rows[static_cast<std::size_t>(j)]);
      w.correct = rows[static_cast<std::size_t>(i)];
      target.push_back(std::move(w));
    }
    trace_rows.push_back(std::move(rows));
  }
  if (train_windows.empty()) throw EmptyCorpus("screen training needs a training trace of length two or more");
  result.train_windows = train_windows.size();
  result.validation_windows = validation_windows.size();
  result.universe = inputs.size();
  const auto universe = static_cast<int>(inputs.size());

  ScreenModel& model = result.model;
  model.init(config.seed, config.combiner_gain);
  {
    const Mat contents = screen_contents(model, inputs);
    result.untrained_held_in = window_metrics(contents, train_windows);
    result.untrained_validation = window_metrics(contents, validation_windows);
  }

  nn::Rng rng(config.seed ^ 0x165667B19E3779F9ull);
  nn::Adam<double> adam({.learning_rate = config.learning_rate});
  const auto params = model.parameters();
  std::vector<std::size_t> order(train_windows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch_size = static_cast<std::size_t>(config.batch_size);
  std::vector<int> local(inputs.size(), -1);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    nn::shuffle(order.begin(), order.end(), rng);
    double sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t end = std::min(order.size(), start + batch_size);
      std::vector<int> batch_correct;
      for (std::size_t i = start; i < end; ++i) batch_correct.push_back(train_windows[order[i]].correct);

      std::vector<ScreenWindow> windows;
      std::vector<int> needed;
      for (std::size_t i = start; i < end; ++i) {
        const IndexedWindow& iw = train_windows[order[i]];
        ScreenWindow w;
        w.context = iw.context;
        w.correct = iw.correct;
        w.negatives = sample_negatives(iw.correct, batch_correct, trace_rows[iw.trace], universe,
                                       config.negatives, rng);
        needed.insert(needed.end(), w.context.begin(), w.context.end());
        needed.push_back(w.correct);
        needed.insert(needed.end(), w.negatives.begin(), w.negatives.end());
        windows.push_back(std::move(w));
      }
      std::sort(needed.begin(), needed.end());
      needed.erase(std::unique(needed.begin(), needed.end()), needed.end());
      std::vector<const ScreenInput*> ptrs;
      for (std::size_t k = 0; k < needed.size(); ++k) {
        local[static_cast<std::size_t>(needed[k])] = static_cast<int>(k);
        ptrs.push_back(&inputs[static_cast<std::size_t>(needed[k])]);
      }
      auto remap = [&](int& x) { x = local[static_cast<std::size_t>(x)]; };
      for (ScreenWindow& w : windows) {
        std::for_each(w.context.begin(), w.context.end(), remap);
        remap(w.correct);
        std::for_each(w.negatives.begin(), w.negatives.end(), remap);
      }

      const ScreenForward f = screen_forward(model, ptrs);
      Mat grad;
      sum += window_loss(f.content, windows, &grad) * static_cast<double>(windows.size());
      model.zero_grad();
      screen_backward(model, f, grad);
      adam.step(params);
    }
    result.epoch_loss.push_back(sum / static_cast<double>(order.size()));
  }

  const Mat contents = screen_contents(model, inputs);
  result.held_in = window_metrics(contents, train_windows);
  result.validation = window_metrics(contents, validation_windows);
  return result;
}

ScreenTrainingResult train_screen_model(const Corpus& corpus, const ScreenTrainingConfig& config,
                                        const TextProvider& provider, const ComponentModel& components,
                                        const LayoutAutoencoder& autoencoder) {
  if (corpus.screens.empty()) throw EmptyCorpus("screen training needs a corpus");
  ScreenModelDims dims;
  dims.component_dim = components.dims().embed_dim;
  dims.layout_dim = autoencoder.dims().code;
  return train_screen_model(corpus, prepare_screens(corpus.screens, provider, components, autoencoder), config,
                            dims);
}

}  // namespace guivec
