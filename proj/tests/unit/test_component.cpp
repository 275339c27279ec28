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

#include "doctest.h"
#include "guivec/component_model.hpp"
#include "guivec/error.hpp"
#include "guivec/synthetic.hpp"
#include "oracles.hpp"

using namespace guivec;
using nlohmann::json;
using Mat = nn::Matrix<double>;

namespace {

json leaf(const char* cls, std::vector<int> b, const char* text = nullptr) {
  json n = {{"class", cls}, {"bounds", b}, {"children", json::array()}};
  if (text) n["text"] = text;
  return n;
}

GuiScreen toy_screen() {
  return parse_screen({{"activity",
                        {{"root",
                          {{"class", "FrameLayout"},
                           {"bounds", {0, 0, 100, 100}},
                           {"children",
                            {leaf("TextView", {0, 0, 50, 10}, "Sign in"), leaf("EditText", {0, 20, 50, 30}, "Email"),
                             leaf("ImageView", {60, 0, 90, 30})}}}}}}});
}

}  // namespace

TEST_CASE("component model dims") {
  ComponentModel m;
  CHECK(m.class_table.rows() == 26);
  CHECK(m.class_table.dim() == 6);
  CHECK(m.combiner.in_dim() == 774);
  CHECK(m.combiner.out_dim() == 768);
  CHECK(m.text_head.out_dim() == 768);
  CHECK(m.class_head.out_dim() == 6);
}

TEST_CASE("embed_component") {
  FallbackTextEmbedder provider;
  const GuiScreen s = toy_screen();
  ComponentModel m;
  m.init(1);

  SUBCASE("identity combiner returns the text embedding") {
    m.combiner.weight.value.setZero();
    m.combiner.weight.value.topRows(768) = Mat::Identity(768, 768);
    m.combiner.bias.value.setZero();
    const Eigen::VectorXd e = embed_component(s.nodes[1], provider, m);
    CHECK((e - provider.embed("Sign in").values()).norm() < 1e-15);
  }
  SUBCASE("missing text uses the zero text vector") {
    const Eigen::VectorXd e = embed_component(s.nodes[3], provider, m);
    Mat x = Mat::Zero(1, 774);
    x.rightCols(6) = m.class_table.lookup(static_cast<Eigen::Index>(category_index(s.nodes[3].category)));
    CHECK((e.transpose() - m.combiner.forward(x)).norm() < 1e-15);
  }
  SUBCASE("category changes the output") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      ComponentModel r;
      r.init(seed);
      GuiComponent a = s.nodes[1];
      GuiComponent b = a;
      b.category = ClassCategory::kInput;
      CHECK((embed_component(a, provider, r) - embed_component(b, provider, r)).norm() > 1e-6);
    }
  }
  SUBCASE("independent of other components") {
    GuiScreen other = toy_screen();
    other.nodes[2].text = "changed";
    CHECK(embed_component(s.nodes[1], provider, m) == embed_component(other.nodes[1], provider, m));
  }
}

TEST_CASE("component samples") {
  FallbackTextEmbedder provider;
  const GuiScreen s = toy_screen();
  const Vocabulary v = build_vocabulary(std::vector<GuiScreen>{s}, provider);
  const ComponentSample sample = make_component_sample(1, s, 16, DistanceMetric::kEuclidean, v);
  CHECK(sample.context_text == std::vector<int>{1, -1});
  CHECK(sample.target_text == 0);
  CHECK(sample.target_class == static_cast<int>(category_index(ClassCategory::kOthers)) );
  const GuiScreen lonely = parse_screen({{"activity", {{"root", {{"class", "FrameLayout"}, {"bounds", {0, 0, 9, 9}}, {"children", {leaf("ImageView", {0, 0, 1, 1})}}}}}}});
  CHECK_THROWS_AS(make_component_sample(1, lonely, 16, DistanceMetric::kEuclidean, v), EmptyContext);
}

TEST_CASE("component loss examples") {
  FallbackTextEmbedder provider;
  SUBCASE("single-entry vocabulary gives zero text loss") {
    nn::Rng rng(1);
    ComponentModel m({8, 3, 5, 26});
    m.init(2);
    const Mat texts = guivec::testing::random_matrix(1, 8, rng);
    ComponentSample s{{0, -1}, {4, 7}, 0, 3};
    const auto loss = component_batch_loss(m, {&s}, texts, 1, false);
    CHECK(loss.text == 0.0);
    CHECK(loss.total == doctest::Approx(loss.cls));
  }
  SUBCASE("initial text loss is near the uniform baseline") {
    std::vector<GuiScreen> screens;
    nn::Rng rng(5);
    json children = json::array();
    for (int i = 0; i < 100; ++i) {
      std::string t;
      for (int k = 0; k < 8; ++k) t += static_cast<char>('a' + nn::uniform_index(rng, 26));
      children.push_back(leaf("TextView", {i, i, i + 5, i + 5}, t.c_str()));
    }
    screens.push_back(parse_screen({{"activity", {{"root", {{"class", "FrameLayout"}, {"bounds", {0, 0, 200, 200}}, {"children", children}}}}}}));
    const Vocabulary v = build_vocabulary(screens, provider);
    REQUIRE(v.size() == 100);
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      ComponentModel m;
      m.init(seed);
      const auto target = static_cast<NodeId>(1 + nn::uniform_index(rng, 100));
      const ComponentSample s = make_component_sample(target, screens[0], 16, DistanceMetric::kEuclidean, v);
      const Mat texts = v.matrix;
      mean += component_batch_loss(m, {&s}, texts, 100, false).text / 50.0;
    }
    CHECK(std::abs(mean - std::log(100.0)) < 1.0);
  }
  SUBCASE("single-target loss agrees with the batch loss") {
    const GuiScreen s = toy_screen();
    const Vocabulary v = build_vocabulary(std::vector<GuiScreen>{s}, provider);
    ComponentModel m;
    m.init(3);
    const ComponentSample sample = make_component_sample(2, s, 16, DistanceMetric::kEuclidean, v);
    const Mat texts = v.matrix;
    CHECK(component_cbow_loss(2, s, m, v, provider) ==
          doctest::Approx(component_batch_loss(m, {&sample}, texts, static_cast<Eigen::Index>(v.size()), false).total)
              .epsilon(1e-12));
  }
}

TEST_CASE("component loss gradients on a toy screen") {
  FallbackTextEmbedder provider;
  const GuiScreen s = toy_screen();
  const Vocabulary v = build_vocabulary(std::vector<GuiScreen>{s}, provider);
  std::vector<ComponentSample> samples;
  for (NodeId t : s.embeddable) samples.push_back(make_component_sample(t, s, 16, DistanceMetric::kEuclidean, v));
  std::vector<const ComponentSample*> batch;
  for (const auto& x : samples) batch.push_back(&x);
  const Mat texts = v.matrix;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    ComponentModel m;
    m.init(seed);
    nn::Rng rng(seed);
    const auto g = guivec::testing::check_gradients(
        m.parameters(),
        [&](bool acc) { return component_batch_loss(m, batch, texts, static_cast<Eigen::Index>(v.size()), acc).total; },
        15, rng);
    CHECK_MESSAGE(g.max_rel < 1e-4, g.worst);
  }
}

TEST_CASE("component training on a small fixture") {
  const SyntheticCorpus syn = make_synthetic_corpus({1, 7});
  REQUIRE(syn.corpus.screens.size() == 10);
  FallbackTextEmbedder provider;
  ComponentTrainingConfig cfg;
  cfg.epochs = 100;
  cfg.batch_size = 100000;  // full batch
  cfg.seed = 4;
  const auto r = train_component_model(syn.corpus, cfg, provider);
  REQUIRE(r.epoch_loss.size() == 100);
  CHECK(r.epoch_loss.back() <= 0.5 * r.epoch_loss.front());
  const Mat& table = r.model.class_table.table.value;
  double min_dist = 1e9;
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < table.rows(); ++j) min_dist = std::min(min_dist, (table.row(i) - table.row(j)).norm());
  }
  CHECK(min_dist > 1e-3);

  ComponentTrainingConfig short_cfg = cfg;
  short_cfg.epochs = 3;
  const auto a = train_component_model(syn.corpus, short_cfg, provider);
  const auto b = train_component_model(syn.corpus, short_cfg, provider);
  CHECK(a.model.to_checkpoint().to_bytes() == b.model.to_checkpoint().to_bytes());
  CHECK(a.report().dump() == b.report().dump());

  CHECK_THROWS_AS(train_component_model(Corpus{}, short_cfg, provider), EmptyCorpus);
}

TEST_CASE("component checkpoint round trip") {
  ComponentModel m({10, 3, 4, 26});
  m.init(8);
  const ComponentModel back = ComponentModel::from_checkpoint(Checkpoint::from_bytes(m.to_checkpoint().to_bytes()));
  CHECK(back.dims().text_dim == 10);
  CHECK(back.to_checkpoint().to_bytes() == m.to_checkpoint().to_bytes());
  Checkpoint wrong = m.to_checkpoint();
  wrong.header["model"] = "screen_model";
  CHECK_THROWS_AS(ComponentModel::from_checkpoint(wrong), FormatError);
}
