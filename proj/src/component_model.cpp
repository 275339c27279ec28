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

#include "guivec/component_model.hpp"

#include <algorithm>
#include <numeric>

#include "guivec/error.hpp"
#include "guivec/metrics.hpp"
#include "guivec/util.hpp"

namespace guivec {

using Mat = nn::Matrix<double>;

ComponentModel::ComponentModel(ComponentModelDims dims)
    : class_table(dims.categories, dims.class_dim, "class_table"),
      combiner(dims.text_dim + dims.class_dim, dims.embed_dim, "combiner"),
      text_head(dims.embed_dim, dims.text_dim, "text_head"),
      class_head(dims.embed_dim, dims.class_dim, "class_head"),
      dims_(dims) {}

void ComponentModel::init(std::uint64_t seed) {
  nn::Rng rng(seed);
  class_table.init_uniform(rng, 0.1);
  combiner.init_glorot(rng);
  text_head.init_glorot(rng);
  class_head.init_glorot(rng);
}

Eigen::RowVectorXd ComponentModel::embed(const Eigen::RowVectorXd& text, std::size_t category) const {
  if (text.size() != dims_.text_dim) throw ShapeMismatch("component text has the wrong width");
  Mat x(1, dims_.text_dim + dims_.class_dim);
  x.leftCols(dims_.text_dim) = text;
  x.rightCols(dims_.class_dim) = class_table.lookup(static_cast<Eigen::Index>(category));
  return combiner.forward(x).row(0);
}

std::vector<nn::Parameter<double>*> ComponentModel::parameters() {
  std::vector<nn::Parameter<double>*> out = class_table.parameters();
  for (auto* layer : {&combiner, &text_head, &class_head}) {
    for (auto* p : layer->parameters()) out.push_back(p);
  }
  return out;
}

void ComponentModel::zero_grad() { nn::zero_grads(parameters()); }

Checkpoint ComponentModel::to_checkpoint() const {
  Checkpoint ckpt;
  ckpt.header = {{"model", "component_model"},
                 {"dims",
                  {{"text", dims_.text_dim},
                   {"class", dims_.class_dim},
                   {"embed", dims_.embed_dim},
                   {"categories", dims_.categories}}}};
  add_parameters<double>(ckpt, const_cast<ComponentModel&>(*this).parameters());
  return ckpt;
}

ComponentModel ComponentModel::from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.header.value("model", "") != "component_model") {
    throw FormatError("checkpoint is not a component model");
  }
  const auto& d = ckpt.header.at("dims");
  ComponentModelDims dims;
  dims.text_dim = d.at("text");
  dims.class_dim = d.at("class");
  dims.embed_dim = d.at("embed");
  dims.categories = d.at("categories");
  ComponentModel model(dims);
  load_parameters<double>(ckpt, model.parameters());
  return model;
}

Eigen::VectorXd embed_component(const GuiComponent& c, const TextProvider& provider,
                                const ComponentModel& model) {
  Eigen::RowVectorXd text = Eigen::RowVectorXd::Zero(model.dims().text_dim);
  if (c.text) text = provider.embed(*c.text).values().transpose();
  return model.embed(text, category_index(c.category)).transpose();
}

ComponentSample make_component_sample(NodeId target, const GuiScreen& screen, std::size_t k,
                                      DistanceMetric metric, const Vocabulary& texts) {
  const std::vector<NodeId> context = context_of(target, screen, k, metric);
  if (context.empty()) {
    throw EmptyContext("node " + std::to_string(target) + " of " + screen.screen_id + " has no context");
  }
  auto text_row = [&](const GuiComponent& c) { return c.text ? texts.find(*c.text) : -1; };
  ComponentSample s;
  for (NodeId n : context) {
    const GuiComponent& c = screen.node(n);
    s.context_text.push_back(text_row(c));
    s.context_class.push_back(static_cast<int>(category_index(c.category)));
  }
  const GuiComponent& t = screen.node(target);
  s.target_text = text_row(t);
  s.target_class = static_cast<int>(category_index(t.category));
  return s;
}

namespace {

struct ForwardPass {
  Mat mix;  // batch x categories, class frequencies of the context
  Mat x;    // batch x (text + class): mean of the context inputs
  Mat h;    // combiner output = mean context embedding
  Mat t;    // text head output
  Mat c;    // class head output
};

// The combiner is affine, so the mean of the context embeddings equals the
// combiner applied to the mean of the context inputs.
ForwardPass forward(const ComponentModel& model, const std::vector<const ComponentSample*>& batch,
                    const Mat& texts, bool heads) {
  const ComponentModelDims& d = model.dims();
  const auto b = static_cast<Eigen::Index>(batch.size());
  if (texts.cols() != d.text_dim) throw ShapeMismatch("text matrix width does not match the model");
  ForwardPass f;
  f.mix = Mat::Zero(b, d.categories);
  f.x = Mat::Zero(b, d.text_dim + d.class_dim);
  for (Eigen::Index i = 0; i < b; ++i) {
    const ComponentSample& s = *batch[static_cast<std::size_t>(i)];
    if (s.context_text.empty() || s.context_text.size() != s.context_class.size()) {
      throw EmptyContext("component sample without context");
    }
    const double w = 1.0 / static_cast<double>(s.context_text.size());
    for (std::size_t j = 0; j < s.context_text.size(); ++j) {
      const int row = s.context_text[j];
      if (row >= texts.rows()) throw IndexOutOfRange("context text row outside the text matrix");
      if (row >= 0) f.x.row(i).head(d.text_dim) += w * texts.row(row);
      const int cls = s.context_class[j];
      if (cls < 0 || cls >= d.categories) throw IndexOutOfRange("context class outside the class table");
      f.mix(i, cls) += w;
    }
  }
  f.x.rightCols(d.class_dim) = f.mix * model.class_table.table.value;
  f.h = model.combiner.forward(f.x);
  if (heads) {
    f.t = model.text_head.forward(f.h);
    f.c = model.class_head.forward(f.h);
  }
  return f;
}

}  // namespace

Mat component_text_logits(const ComponentModel& model, const std::vector<const ComponentSample*>& batch,
                          const Mat& texts, Eigen::Index vocab_size) {
  if (vocab_size < 0 || vocab_size > texts.rows()) throw IndexOutOfRange("vocabulary larger than text matrix");
  const ForwardPass f = forward(model, batch, texts, true);
  return f.t * texts.topRows(vocab_size).transpose();
}

ComponentBatchLoss component_batch_loss(ComponentModel& model,
                                        const std::vector<const ComponentSample*>& batch,
                                        const Mat& texts, Eigen::Index vocab_size, bool accumulate) {
  if (batch.empty()) return {};
  if (vocab_size < 0 || vocab_size > texts.rows()) throw IndexOutOfRange("vocabulary larger than text matrix");
  const ForwardPass f = forward(model, batch, texts, true);
  const auto b = static_cast<Eigen::Index>(batch.size());
  const auto vocab = texts.topRows(vocab_size);
  const Mat& table = model.class_table.table.value;
  const Mat text_logits = f.t * vocab.transpose();
  const Mat class_logits = f.c * table.transpose();

  Mat g_text_logits = Mat::Zero(b, vocab_size);
  Mat g_class_logits(b, class_logits.cols());
  ComponentBatchLoss out;
  std::size_t with_text = 0;
  const double inv_b = 1.0 / static_cast<double>(b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const ComponentSample& s = *batch[static_cast<std::size_t>(i)];
    double sample_loss = 0.0;
    if (s.target_text >= 0 && s.target_text < vocab_size) {
      const nn::CrossEntropyResult ce = nn::cross_entropy(text_logits.row(i), s.target_text);
      out.text += ce.loss;
      sample_loss += ce.loss;
      g_text_logits.row(i) = ce.grad * inv_b;
      ++with_text;
    }
    const nn::CrossEntropyResult ce = nn::cross_entropy(class_logits.row(i), s.target_class);
    out.cls += ce.loss;
    sample_loss += ce.loss;
    g_class_logits.row(i) = ce.grad * inv_b;
    out.total += sample_loss;
  }
  out.text = with_text ? out.text / static_cast<double>(with_text) : 0.0;
  out.cls *= inv_b;
  out.total *= inv_b;
  if (!accumulate) return out;

  const Mat g_t = g_text_logits * vocab;
  const Mat g_c = g_class_logits * table;
  model.class_table.table.grad.noalias() += g_class_logits.transpose() * f.c;
  Mat g_h = model.text_head.backward(f.h, g_t);
  g_h += model.class_head.backward(f.h, g_c);
  const Mat g_x = model.combiner.backward(f.x, g_h);
  model.class_table.table.grad.noalias() += f.mix.transpose() * g_x.rightCols(model.dims().class_dim);
  return out;
}

double component_cbow_loss(NodeId target, const GuiScreen& screen, const ComponentModel& model,
                           const Vocabulary& vocab, const TextProvider& provider, std::size_t k,
                           DistanceMetric metric) {
  // Vocabulary rows first, then any context text the vocabulary lacks.
  Vocabulary texts = vocab;
  std::vector<Eigen::RowVectorXd> extra;
  for (NodeId n : screen.embeddable) {
    const auto& t = screen.node(n).text;
    if (!t) continue;
    std::string key = normalize_text(*t);
    if (key.empty() || texts.index_of.count(key)) continue;
    texts.index_of.emplace(key, static_cast<int>(texts.texts.size()));
    texts.texts.push_back(key);
    extra.push_back(provider.embed(key).values().transpose());
  }
  Mat matrix(static_cast<Eigen::Index>(texts.texts.size()), model.dims().text_dim);
  if (vocab.size() > 0) matrix.topRows(static_cast<Eigen::Index>(vocab.size())) = vocab.matrix;
  for (std::size_t i = 0; i < extra.size(); ++i) {
    matrix.row(static_cast<Eigen::Index>(vocab.size() + i)) = extra[i];
  }
  ComponentSample s = make_component_sample(target, screen, k, metric, texts);
  if (s.target_text >= static_cast<int>(vocab.size())) s.target_text = -1;
  ComponentModel& m = const_cast<ComponentModel&>(model);
  return component_batch_loss(m, {&s}, matrix, static_cast<Eigen::Index>(vocab.size()), false).total;
}

nlohmann::json ComponentTrainingResult::report() const {
  nlohmann::json j;
  j["model"] = "component_model";
  j["config"] = {{"context_k", config.context_k},
                 {"metric", metric_name(config.metric)},
                 {"learning_rate", config.learning_rate},
                 {"batch_size", config.batch_size},
                 {"epochs", config.epochs},
                 {"seed", config.seed},
                 {"train_fraction", config.train_fraction}};
  j["vocab_size"] = vocab_size;
  j["random_baseline_top1"] = vocab_size ? 1.0 / static_cast<double>(vocab_size) : 0.0;
  j["train_screens"] = train_screens;
  j["validation_screens"] = validation_screens;
  j["train_samples"] = train_samples;
  j["validation_samples"] = validation_samples;
  j["skipped_targets"] = skipped_targets;
  j["epoch_loss"] = epoch_loss;
  j["held_in"] = held_in;
  j["validation"] = validation;
  return j;
}

namespace {

nlohmann::json text_metrics(const ComponentModel& model, const std::vector<ComponentSample>& samples,
                            const Mat& texts, Eigen::Index vocab_size) {
  RankTally tally(static_cast<std::size_t>(vocab_size));
  constexpr std::size_t kChunk = 512;
  for (std::size_t start = 0; start < samples.size(); start += kChunk) {
    std::vector<const ComponentSample*> chunk;
    for (std::size_t i = start; i < std::min(samples.size(), start + kChunk); ++i) chunk.push_back(&samples[i]);
    const Mat logits = component_text_logits(model, chunk, texts, vocab_size);
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      const int target = chunk[i]->target_text;
      if (target < 0) continue;  // text-less targets are not text predictions
      tally.add(target < vocab_size ? rank_of(logits.row(static_cast<Eigen::Index>(i)), target) : 0);
    }
  }
  return tally.to_json();
}

}  // namespace

ComponentTrainingResult train_component_model(const Corpus& corpus, const ComponentTrainingConfig& config,
                                              const TextProvider& provider) {
  if (corpus.screens.empty()) throw EmptyCorpus("component training needs at least one screen");
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
    throw Error("train fraction must lie strictly between 0 and 1");
  }
  if (config.context_k < 1 || config.batch_size < 1 || config.epochs < 0) {
    throw Error("invalid component training config");
  }

  ComponentTrainingResult result{ComponentModel()};
  result.config = config;
  std::vector<const GuiScreen*> train, validation;
  for (const GuiScreen& s : corpus.screens) {
    (in_training_split(s.screen_id, config.train_fraction) ? train : validation).push_back(&s);
  }
  result.train_screens = train.size();
  result.validation_screens = validation.size();

  // Training texts first so that the vocabulary is a prefix of the text matrix.
  const Vocabulary vocab = build_vocabulary(train, provider);
  std::vector<const GuiScreen*> ordered = train;
  ordered.insert(ordered.end(), validation.begin(), validation.end());
  const Vocabulary texts = build_vocabulary(ordered, provider);
  const Mat text_matrix = texts.matrix;
  const auto vocab_size = static_cast<Eigen::Index>(vocab.size());
  result.vocab_size = vocab.size();

  auto collect = [&](const std::vector<const GuiScreen*>& screens) {
    std::vector<ComponentSample> out;
    for (const GuiScreen* s : screens) {
      for (NodeId n : s->embeddable) {
        try {
          out.push_back(make_component_sample(n, *s, config.context_k, config.metric, texts));
        } catch (const EmptyContext&) {
          ++result.skipped_targets;
        }
      }
    }
    return out;
  };
  std::vector<ComponentSample> train_samples = collect(train);
  std::vector<ComponentSample> validation_samples = collect(validation);
  for (ComponentSample& s : validation_samples) {
    if (s.target_text >= vocab_size) s.target_text = static_cast<int>(vocab_size);  // out of vocabulary
  }
  result.train_samples = train_samples.size();
  result.validation_samples = validation_samples.size();
  if (train_samples.empty()) throw EmptyCorpus("no training component has a context");

  ComponentModel& model = result.model;
  model.init(config.seed);
  nn::Rng order_rng(config.seed ^ 0xC2B2AE3D27D4EB4Full);
  nn::Adam<double> adam({.learning_rate = config.learning_rate});
  const auto params = model.parameters();
  std::vector<std::size_t> order(train_samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch_size = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    nn::shuffle(order.begin(), order.end(), order_rng);
    double sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      std::vector<const ComponentSample*> batch;
      for (std::size_t i = start; i < std::min(order.size(), start + batch_size); ++i) {
        batch.push_back(&train_samples[order[i]]);
      }
      model.zero_grad();
      sum += component_batch_loss(model, batch, text_matrix, vocab_size, true).total *
             static_cast<double>(batch.size());
      adam.step(params);
    }
    result.epoch_loss.push_back(sum / static_cast<double>(order.size()));
  }

  result.held_in = text_metrics(model, train_samples, text_matrix, vocab_size);
  result.validation = text_metrics(model, validation_samples, text_matrix, vocab_size);
  return result;
}

}  // namespace guivec
