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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "guivec/component_model.hpp"
#include "guivec/error.hpp"
#include "guivec/layout_model.hpp"
#include "guivec/metrics.hpp"
#include "guivec/nn.hpp"
#include "guivec/pipeline.hpp"
#include "guivec/screen_model.hpp"
#include "guivec/synthetic.hpp"
#include "guivec/text_provider.hpp"
#include "guivec/util.hpp"
#include "guivec/vector_store.hpp"
#include "oracles.hpp"

using namespace guivec;
using guivec::testing::check_gradients;
using guivec::testing::GradCheck;
using guivec::testing::random_matrix;
using Mat = nn::Matrix<double>;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Worst {
  double max_rel = 0.0;
  std::string where;
  void add(const GradCheck& g, const std::string& label) {
    if (g.max_rel > max_rel) {
      max_rel = g.max_rel;
      where = label + " " + g.worst;
    }
  }
};

char buf[512];

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- 1 ---------------------------------------------------------------------

GuiScreen gradient_screen() {
  using nlohmann::json;
  auto leaf = [](const char* cls, std::vector<int> b, const char* text, bool clickable = false) {
    json n = {{"class", cls}, {"bounds", b}, {"children", json::array()}, {"clickable", clickable}};
    if (text) n["text"] = text;
    return n;
  };
  json list = {{"class", "ListView"},
               {"bounds", {0, 400, 1440, 1400}},
               {"children",
                {leaf("TextView", {0, 400, 1440, 700}, "Pizza"), leaf("TextView", {0, 700, 1440, 1000}, "Sushi")}}};
  return parse_screen(
      {{"activity",
        {{"root",
          {{"class", "FrameLayout"},
           {"bounds", {0, 0, 1440, 2560}},
           {"children",
            {leaf("TextView", {0, 0, 1440, 200}, "Order food"), leaf("EditText", {0, 200, 1440, 380}, "Search"),
             list, leaf("Button", {0, 2300, 700, 2560}, "Checkout", true), leaf("ImageView", {800, 2300, 1440, 2560}, nullptr)}}}}}}});
}

Outcome criterion_gradients() {
  const auto t0 = Clock::now();
  Worst worst;
  std::size_t checks = 0;
  constexpr int kSeeds = 20;
  FallbackTextEmbedder provider;
  const GuiScreen screen = gradient_screen();
  const Vocabulary vocab = build_vocabulary(std::vector<GuiScreen>{screen}, provider);
  std::vector<ComponentSample> samples;
  for (NodeId t : screen.embeddable) {
    try {
      samples.push_back(make_component_sample(t, screen, 16, DistanceMetric::kEuclidean, vocab));
    } catch (const EmptyContext&) {
    }
  }
  std::vector<const ComponentSample*> sample_ptrs;
  for (const auto& s : samples) sample_ptrs.push_back(&s);

  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    nn::Rng rng(seed * 7919 + 1);

    {  // dense, with input gradient
      nn::DenseLayer<double> d(6, 4, "d");
      d.init_glorot(rng);
      nn::init_uniform(d.bias.value, 0.5, rng);
      nn::Parameter<double> x("x", 5, 6);
      x.value = random_matrix(5, 6, rng);
      const Mat r = random_matrix(5, 4, rng);
      auto loss = [&](bool acc) {
        const Mat y = d.forward(x.value);
        if (acc) x.grad += d.backward(x.value, r);
        return (y.array() * r.array()).sum();
      };
      const auto g = check_gradients({&d.weight, &d.bias, &x}, loss, 1000, rng);
      worst.add(g, "dense");
      checks += g.checked;
    }
    for (auto act : {nn::RecurrentActivation::kTanh, nn::RecurrentActivation::kRelu}) {  // rnn through time
      nn::RecurrentLayer<double> rnn(3, 5, "rnn", act);
      rnn.init_glorot(rng);
      nn::init_uniform(rnn.b.value, 0.2, rng);
      std::vector<nn::Parameter<double>> xs;
      for (int len : {5, 1, 0, 3}) {
        xs.emplace_back("x" + std::to_string(xs.size()), len, 3);
        xs.back().value = random_matrix(len, 3, rng);
      }
      const Mat r = random_matrix(4, 5, rng);
      auto loss = [&](bool acc) {
        std::vector<const Mat*> ptrs;
        for (auto& x : xs) ptrs.push_back(&x.value);
        const auto cache = rnn.forward_batch(ptrs);
        if (acc) {
          const auto gx = rnn.backward_batch(cache, r, true);
          for (std::size_t i = 0; i < xs.size(); ++i) xs[i].grad += gx[i];
        }
        return (cache.outputs.array() * r.array()).sum();
      };
      std::vector<nn::Parameter<double>*> params = rnn.parameters();
      for (auto& x : xs) params.push_back(&x);
      const auto g = check_gradients(params, loss, 1000, rng);
      worst.add(g, act == nn::RecurrentActivation::kTanh ? "rnn/tanh" : "rnn/relu");
      checks += g.checked;
    }
    {  // embedding table
      nn::EmbeddingTable<double> e(7, 4, "e");
      e.init_uniform(rng);
      const Eigen::RowVectorXd v = random_matrix(1, 4, rng);
      std::vector<Eigen::Index> idx;
      for (int i = 0; i < 6; ++i) idx.push_back(static_cast<Eigen::Index>(nn::uniform_index(rng, 7)));
      auto loss = [&](bool acc) {
        double l = 0.0;
        for (Eigen::Index i : idx) {
          const Eigen::RowVectorXd row = e.lookup(i);
          l += row.dot(v) + 0.5 * row.squaredNorm();
          if (acc) e.accumulate_grad(i, v + row);
        }
        return l;
      };
      const auto g = check_gradients(e.parameters(), loss, 1000, rng);
      worst.add(g, "embedding");
      checks += g.checked;
    }
    {  // component CBOW, small dims, every coordinate
      ComponentModel m({10, 3, 7, 26});
      m.init(seed);
      for (auto* p : m.parameters()) nn::init_uniform(p->value, 0.4, rng);
      const Mat texts = random_matrix(6, 10, rng);
      std::vector<ComponentSample> batch;
      for (int b = 0; b < 4; ++b) {
        ComponentSample s;
        for (int c = 0; c < 3; ++c) {
          s.context_text.push_back(static_cast<int>(nn::uniform_index(rng, 7)) - 1);
          s.context_class.push_back(static_cast<int>(nn::uniform_index(rng, 26)));
        }
        s.target_text = static_cast<int>(nn::uniform_index(rng, 7)) - 1;
        s.target_class = static_cast<int>(nn::uniform_index(rng, 26));
        batch.push_back(s);
      }
      std::vector<const ComponentSample*> ptrs;
      for (const auto& s : batch) ptrs.push_back(&s);
      const auto g = check_gradients(
          m.parameters(), [&](bool acc) { return component_batch_loss(m, ptrs, texts, 6, acc).total; }, 1000, rng);
      worst.add(g, "component-cbow");
      checks += g.checked;
    }
    {  // component CBOW, full dims on a parsed screen
      ComponentModel m;
      m.init(seed);
      const Mat& texts = vocab.matrix;
      const auto g = check_gradients(
          m.parameters(),
          [&](bool acc) {
            return component_batch_loss(m, sample_ptrs, texts, static_cast<Eigen::Index>(vocab.size()), acc).total;
          },
          8, rng);
      worst.add(g, "component-cbow/full");
      checks += g.checked;
    }
    {  // screen CBOW, small dims, every coordinate
      const ScreenModelDims dims{5, 4, 3, 6};
      ScreenModel m(dims);
      m.init(seed);
      nn::init_uniform(m.rnn.b.value, 0.2, rng);
      nn::init_uniform(m.content_combiner.bias.value, 0.2, rng);
      std::vector<ScreenInput> pool;
      for (int i = 0; i < 7; ++i) {
        pool.push_back({random_matrix(i % 4, dims.component_dim, rng), random_matrix(1, dims.layout_dim, rng)});
      }
      const std::vector<const ScreenInput*> trace = {&pool[0], &pool[1], &pool[2], &pool[3]};
      const std::vector<const ScreenInput*> neg = {&pool[4], &pool[5], &pool[6], &pool[1]};
      const auto center = static_cast<std::size_t>(seed % 4);
      const auto g = check_gradients(
          m.parameters(), [&](bool acc) { return screen_cbow_loss(m, trace, center, neg, 2, acc); }, 1000, rng);
      worst.add(g, "screen-cbow");
      checks += g.checked;
    }
    {  // screen CBOW, full dims
      ScreenModel m;
      m.init(seed);
      std::vector<ScreenInput> pool;
      for (int i = 0; i < 6; ++i) pool.push_back({random_matrix(1 + i % 3, 768, rng, 0.1), random_matrix(1, 64, rng)});
      const std::vector<const ScreenInput*> trace = {&pool[0], &pool[1], &pool[2]};
      const std::vector<const ScreenInput*> neg = {&pool[3], &pool[4], &pool[5]};
      const auto g = check_gradients(
          m.parameters(), [&](bool acc) { return screen_cbow_loss(m, trace, 1, neg, 2, acc); }, 8, rng);
      worst.add(g, "screen-cbow/full");
      checks += g.checked;
    }
  }
  const double t = seconds_since(t0);
  Outcome o;
  o.pass = worst.max_rel < 1e-4 && t < 120.0;
  o.detail = fmt("%d seeds, %zu coordinates, max rel err %.2e, %.1fs", kSeeds, checks, worst.max_rel, t);
  if (worst.max_rel >= 1e-4) o.detail += "; worst " + worst.where;
  return o;
}

// ---- 2 ---------------------------------------------------------------------

Outcome criterion_cross_entropy() {
  nn::Rng rng(2024);
  double max_err = 0.0, max_shift = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto n = static_cast<Eigen::Index>(1 + nn::uniform_index(rng, 50));
    const double scale = std::pow(10.0, nn::uniform(rng, -2.0, 1.5));
    const Eigen::RowVectorXd x = random_matrix(1, n, rng, scale);
    const auto cls = static_cast<Eigen::Index>(nn::uniform_index(rng, static_cast<std::uint64_t>(n)));
    const double got = nn::cross_entropy(x, cls).loss;
    max_err = std::max(max_err, std::abs(got - guivec::testing::direct_cross_entropy(x, cls)));
    const double c = nn::uniform(rng, -100.0, 100.0);
    const Eigen::RowVectorXd shifted = (x.array() + c).matrix();
    max_shift = std::max(max_shift, std::abs(nn::cross_entropy(shifted, cls).loss - got));
  }
  return {max_err <= 1e-9 && max_shift <= 1e-9,
          fmt("1000 cases, max |err| %.2e, max shift drift %.2e", max_err, max_shift)};
}

// ---- 3 ---------------------------------------------------------------------

Outcome criterion_classifier() {
  const auto cases = guivec::testing::table_cases();
  int ok = 0;
  std::string failures;
  for (const auto& c : cases) {
    const ClassCategory got = classify_component(c.class_name, c.editable, c.clickable, c.has_text, c.ancestors);
    if (got == c.expected) {
      ++ok;
    } else {
      failures += " [" + c.label + ": got " + std::string(category_name(got)) + "]";
    }
  }
  return {ok == static_cast<int>(cases.size()), fmt("%d/%zu table cases", ok, cases.size()) + failures};
}

// ---- 4 ---------------------------------------------------------------------

Outcome criterion_distances() {
  using guivec::testing::random_screen_document;
  Outcome o;
  // Fixed hierarchical examples: parent 1, sibling 2.
  const GuiScreen s = gradient_screen();
  const NodeId list = 3;  // root, title, search, list, ...
  const bool fixed = hierarchical_distance(list, list + 1, s) == 1.0 && hierarchical_distance(list + 1, list + 2, s) == 2.0 &&
                     hierarchical_distance(0, 1, s) == 1.0 && hierarchical_distance(1, 2, s) == 2.0;
  nn::Rng rng(44);
  int screens = 0;
  std::size_t contexts = 0;
  bool euclid_ok = true, tree_ok = true, ctx_ok = true;
  for (int i = 0; i < 500; ++i) {
    const GuiScreen g = parse_screen(random_screen_document(rng, 30));
    ++screens;
    for (std::size_t a = 0; a < g.nodes.size(); ++a) {
      for (std::size_t b = 0; b < g.nodes.size(); ++b) {
        const BoundingBox& ba = g.nodes[a].bounds;
        const BoundingBox& bb = g.nodes[b].bounds;
        const double d = euclidean_distance(ba, bb);
        const bool overlap = std::max(ba.left, bb.left) <= std::min(ba.right, bb.right) &&
                             std::max(ba.top, bb.top) <= std::min(ba.bottom, bb.bottom);
        euclid_ok &= d == euclidean_distance(bb, ba) && d >= 0.0 && (d == 0.0) == overlap &&
                     std::abs(d - guivec::testing::box_distance(ba, bb)) < 1e-9;
        const auto na = static_cast<NodeId>(a), nb = static_cast<NodeId>(b);
        tree_ok &= hierarchical_distance(na, nb, g) == guivec::testing::tree_distance(na, nb, g);
      }
    }
    for (NodeId t : g.embeddable) {
      for (DistanceMetric m : {DistanceMetric::kEuclidean, DistanceMetric::kHierarchical}) {
        const std::size_t k = 1 + static_cast<std::size_t>(nn::uniform_index(rng, 20));
        ctx_ok &= context_of(t, g, k, m) == guivec::testing::brute_force_context(t, g, k, m);
        ++contexts;
      }
    }
  }
  o.pass = fixed && euclid_ok && tree_ok && ctx_ok;
  o.detail = fmt("parent=1/sibling=2 %s; euclidean %s; hierarchical %s; context_of %s on %d screens (%zu queries)",
                 fixed ? "ok" : "WRONG", euclid_ok ? "ok" : "WRONG", tree_ok ? "ok" : "WRONG", ctx_ok ? "ok" : "WRONG",
                 screens, contexts);
  return o;
}

// ---- shared pipeline on the default synthetic corpus ---------------------------

constexpr std::uint64_t kSeed = 7;

struct PipelineConfig {
  int autoencoder_epochs = 20;
  int component_epochs = 50;
  int screen_epochs = 100;
};

struct PipelineRun {
  SyntheticCorpus synthetic;
  AutoencoderTrainingResult autoencoder;
  ComponentTrainingResult components;
  ScreenTrainingResult screen;
  ModelBundle bundle;
  EmbeddingStore store;
  double autoencoder_seconds = 0, component_seconds = 0, screen_seconds = 0;
};

PipelineRun run_pipeline(const PipelineConfig& pc, const TextProvider& provider) {
  PipelineRun r;
  r.synthetic = make_synthetic_corpus({20, kSeed});
  const Corpus& corpus = r.synthetic.corpus;

  auto t0 = Clock::now();
  std::vector<LayoutBitmap> bitmaps;
  for (const GuiScreen& s : corpus.screens) bitmaps.push_back(render_layout(s));
  AutoencoderTrainingConfig ae;
  ae.epochs = pc.autoencoder_epochs;
  ae.seed = kSeed;
  r.autoencoder = train_autoencoder(bitmaps, ae);
  r.autoencoder_seconds = seconds_since(t0);

  t0 = Clock::now();
  ComponentTrainingConfig cc;
  cc.epochs = pc.component_epochs;
  cc.seed = kSeed;
  r.components = train_component_model(corpus, cc, provider);
  r.component_seconds = seconds_since(t0);

  t0 = Clock::now();
  ScreenTrainingConfig sc;
  sc.epochs = pc.screen_epochs;
  sc.seed = kSeed;
  r.screen = train_screen_model(corpus, sc, provider, r.components.model, r.autoencoder.model);
  r.screen_seconds = seconds_since(t0);

  r.bundle = ModelBundle{LayoutGrid{}, r.autoencoder.model, r.components.model, r.screen.model};
  r.store = build_store(corpus, provider, r.bundle);
  return r;
}

// ---- 5 ---------------------------------------------------------------------

Outcome criterion_component(const PipelineRun& run) {
  const double top1 = run.components.held_in["top1"].get<double>();
  const double baseline = 1.0 / static_cast<double>(run.components.vocab_size);
  Outcome o;
  o.pass = top1 >= 10.0 * baseline && run.component_seconds < 300.0 && run.components.config.epochs <= 50;
  o.detail = fmt("%d epochs, |vocab| %zu, held-in top-1 %.3f vs 10x random %.4f (validation %.3f), %.1fs",
                 run.components.config.epochs, run.components.vocab_size, top1, 10.0 * baseline,
                 run.components.validation["top1"].get<double>(), run.component_seconds);
  return o;
}

// ---- 6 ---------------------------------------------------------------------

Outcome criterion_screen(const PipelineRun& run) {
  const auto& r = run.screen;
  const double top10 = r.held_in["top_10%"].get<double>();
  const double rmse = r.held_in["normalized_rmse"].get<double>();
  const double untrained = r.untrained_held_in["normalized_rmse"].get<double>();
  Outcome o;
  o.pass = top10 >= 0.8 && rmse <= 0.7 * untrained && run.screen_seconds < 600.0 && r.config.epochs <= 100;
  o.detail = fmt("%d epochs, universe %zu, held-in top-10%% %.3f, top-1%% %.3f, nRMSE %.3f vs untrained %.3f (%.0f%% lower), "
                 "%.1fs",
                 r.config.epochs, r.universe, top10, r.held_in["top_1%"].get<double>(), rmse, untrained,
                 100.0 * (1.0 - rmse / untrained), run.screen_seconds);
  return o;
}

// ---- 7 ---------------------------------------------------------------------

Outcome criterion_autoencoder() {
  const auto t0 = Clock::now();
  std::vector<LayoutBitmap> bitmaps;
  for (const GuiScreen& s : make_template_screens(4, 50, kSeed)) bitmaps.push_back(render_layout(s));
  AutoencoderTrainingConfig cfg;
  cfg.seed = kSeed;
  const auto fixture = train_autoencoder(bitmaps, cfg);
  const double first_epoch = fixture.epoch_mse.front();
  const double ratio = fixture.final_mse / fixture.initial_mse;
  const double ratio_first = fixture.final_mse / first_epoch;

  AutoencoderTrainingConfig single;
  single.seed = kSeed;
  single.batch_size = 1;
  single.epochs = 200;
  const auto one = train_autoencoder({bitmaps.front()}, single);
  const double one_ratio = one.final_mse / one.initial_mse;

  Outcome o;
  o.pass = ratio <= 0.2 && ratio_first <= 0.2 && one_ratio < 0.05;
  o.detail = fmt("fixture %zu layouts, %d epochs: final/initial %.4f, final/first-epoch %.4f; single sample %d epochs: "
                 "final/initial %.5f; %.1fs",
                 bitmaps.size(), cfg.epochs, ratio, ratio_first, single.epochs, one_ratio, seconds_since(t0));
  return o;
}

// ---- 8 ---------------------------------------------------------------------

Outcome criterion_nearest_neighbors() {
  const auto t0 = Clock::now();
  constexpr int kDim = 64;
  nn::Rng rng(88);
  EmbeddingStore store(kDim, kDim / 2, "acceptance");
  for (int i = 0; i < 10000; ++i) {
    Eigen::VectorXd v(kDim);
    for (int d = 0; d < kDim; ++d) v[d] = nn::uniform(rng, -1.0, 1.0);
    store.add({fmt("v%05d", i), "", {}, ""}, v);
  }
  int identical = 0;
  for (int q = 0; q < 100; ++q) {
    Eigen::VectorXd v(kDim);
    for (int d = 0; d < kDim; ++d) v[d] = nn::uniform(rng, -1.0, 1.0);
    const Similarity sim = q % 2 ? Similarity::kDot : Similarity::kCosine;
    const std::size_t k = 1 + static_cast<std::size_t>(nn::uniform_index(rng, 50));
    const QueryResult got = nearest_neighbors(v, k, store, {sim, Space::kFull});
    const QueryResult want = guivec::testing::brute_force_neighbors(v, k, store, sim);
    bool same = got.size() == want.size();
    for (std::size_t i = 0; same && i < got.size(); ++i) {
      same = got[i].id == want[i].id && std::abs(got[i].score - want[i].score) <= 1e-12;
    }
    identical += same;
  }
  int cancelled = 0;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t a = nn::uniform_index(rng, store.size());
    const std::size_t b = nn::uniform_index(rng, store.size());
    const Eigen::VectorXd q = compose({{1, store.vector(a)}, {1, store.vector(b)}, {-1, store.vector(b)}});
    const QueryResult top = nearest_neighbors(q, 1, store);
    worst = std::max(worst, std::abs(top.front().score - 1.0));
    cancelled += top.front().id == store.entries()[a].id && std::abs(top.front().score - 1.0) <= 1e-9;
  }
  return {identical == 100 && cancelled == 100,
          fmt("10000x%d store: %d/100 queries identical to brute force; A+B-B ranks A first %d/100, max |sim-1| %.1e; "
              "%.1fs",
              kDim, identical, cancelled, worst, seconds_since(t0))};
}

// ---- 9 ---------------------------------------------------------------------

Outcome criterion_tasks(const PipelineRun& run, const TextProvider& provider) {
  const auto& tasks = run.synthetic.tasks;
  std::vector<Eigen::VectorXd> a, b, text_a, text_b;
  std::map<std::string, const GuiScreen*> by_id;
  for (const GuiScreen& s : run.synthetic.corpus.screens) by_id[s.screen_id] = &s;
  auto text_task = [&](const std::vector<std::string>& ids) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(kTextDim);
    for (const std::string& id : ids) sum += text_only_embed(*by_id.at(id), provider);
    return Eigen::VectorXd(sum / static_cast<double>(ids.size()));
  };
  for (const SyntheticTask& t : tasks) {
    a.push_back(embed_task(t.variant_a, run.store));
    b.push_back(embed_task(t.variant_b, run.store));
    text_a.push_back(text_task(t.variant_a));
    text_b.push_back(text_task(t.variant_b));
  }
  const TaskMatchResult screen = match_task_pairs(a, b);
  const TaskMatchResult text = match_task_pairs(text_a, text_b);
  return {tasks.size() == 10 && screen.matched >= 16,
          fmt("%zu tasks x 2 variants: screen embeddings %d/%d, TextOnly %d/%d", tasks.size(), screen.matched,
              screen.total, text.matched, text.total)};
}

// ---- 10 --------------------------------------------------------------------

struct RunDigest {
  std::string corpus, autoencoder, components, screen, store, reports;
};

RunDigest digest(const PipelineRun& r) {
  RunDigest d;
  for (const auto& doc : r.synthetic.documents) d.corpus += doc.dump();
  d.autoencoder = r.autoencoder.model.to_checkpoint(LayoutGrid{}).to_bytes();
  d.components = r.components.model.to_checkpoint().to_bytes();
  d.screen = r.screen.model.to_checkpoint().to_bytes();
  d.store = r.store.to_bytes();
  std::vector<Prediction> preds;
  for (std::size_t i = 0; i + 1 < r.store.size(); i += 5) preds.push_back({r.store.vector(i + 1), r.store.entries()[i].id});
  nlohmann::json ae = {{"initial", r.autoencoder.initial_mse}, {"epochs", r.autoencoder.epoch_mse},
                       {"final", r.autoencoder.final_mse}};
  d.reports = ae.dump() + r.components.report().dump() + r.screen.report().dump() +
              evaluate_predictions(preds, r.store).dump();
  return d;
}

Outcome criterion_determinism(const TextProvider& provider) {
  const auto t0 = Clock::now();
  const PipelineConfig short_run{2, 3, 3};
  const RunDigest x = digest(run_pipeline(short_run, provider));
  const RunDigest y = digest(run_pipeline(short_run, provider));
  std::string diff;
  if (x.corpus != y.corpus) diff += " corpus";
  if (x.autoencoder != y.autoencoder) diff += " autoencoder";
  if (x.components != y.components) diff += " component";
  if (x.screen != y.screen) diff += " screen";
  if (x.store != y.store) diff += " store";
  if (x.reports != y.reports) diff += " reports";
  return {diff.empty(), fmt("two runs, %zu checkpoint bytes + %zu store bytes + %zu report bytes compared, %.1fs",
                            x.autoencoder.size() + x.components.size() + x.screen.size(), x.store.size(),
                            x.reports.size(), seconds_since(t0)) +
                            (diff.empty() ? "" : "; differ:" + diff)};
}

// ---- 11 --------------------------------------------------------------------

Outcome criterion_baselines(const PipelineRun& run, const TextProvider& provider) {
  int text_ok = 0, layout_ok = 0, n = 0;
  for (const GuiScreen& s : run.synthetic.corpus.screens) {
    ++n;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(kTextDim);
    int count = 0;
    for (const GuiComponent& c : s.nodes) {
      if (!c.text || normalize_text(*c.text).empty()) continue;
      sum += provider.embed(*c.text).values();
      ++count;
    }
    const Eigen::VectorXd want = count ? Eigen::VectorXd(sum / count) : sum;
    text_ok += text_only_embed(s, provider) == want;
    layout_ok += layout_only_embed(s, run.autoencoder.model) == encode_layout(render_layout(s), run.autoencoder.model);
  }
  return {text_ok == n && layout_ok == n,
          fmt("TextOnly exact on %d/%d screens, LayoutOnly exact on %d/%d screens", text_ok, n, layout_ok, n)};
}

}  // namespace

int main() {
  set_quiet(true);
  const auto t0 = Clock::now();
  FallbackTextEmbedder provider;
  std::map<int, std::pair<std::string, Outcome>> results;
  auto record = [&](int id, const char* name, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    results[id] = {name, o};
    std::fprintf(stderr, "[%6.1fs] criterion %d done\n", seconds_since(t0), id);
  };

  record(1, "gradient integrity", criterion_gradients);
  record(2, "cross-entropy formula", criterion_cross_entropy);
  record(3, "class category table", criterion_classifier);
  record(4, "distance contracts", criterion_distances);
  record(7, "layout autoencoder", criterion_autoencoder);
  record(8, "nearest-neighbour oracle", criterion_nearest_neighbors);

  std::optional<PipelineRun> run;
  try {
    run = run_pipeline({}, provider);
  } catch (const std::exception& e) {
    for (int id : {5, 6, 9, 11}) results[id] = {"pipeline", {false, std::string("pipeline failed: ") + e.what()}};
  }
  if (run) {
    record(5, "component model learning", [&] { return criterion_component(*run); });
    record(6, "screen model learning", [&] { return criterion_screen(*run); });
    record(9, "task embedding benchmark", [&] { return criterion_tasks(*run, provider); });
    record(11, "single-signal baselines", [&] { return criterion_baselines(*run, provider); });
  }
  record(10, "determinism", [&] { return criterion_determinism(provider); });

  int failed = 0;
  for (const auto& [id, entry] : results) {
    const auto& [name, o] = entry;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed in %.1fs\n", static_cast<int>(results.size()) - failed, results.size(),
              seconds_since(t0));
  return failed == 0 ? 0 : 1;
}
