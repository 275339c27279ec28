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

#include <filesystem>

#include "doctest.h"
#include "guivec/error.hpp"
#include "guivec/metrics.hpp"
#include "guivec/vector_store.hpp"
#include "oracles.hpp"

using namespace guivec;
using nlohmann::json;

namespace {

Eigen::VectorXd random_vector(nn::Rng& rng, int dim) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = nn::uniform(rng, -1.0, 1.0);
  return v;
}

// Vectors are rounded to float on insertion; tests compare against the stored
// values.
EmbeddingStore random_store(nn::Rng& rng, int n, int dim, int content_dim = 0) {
  EmbeddingStore s(dim, content_dim ? content_dim : dim, "fp");
  for (int i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "s%05d", i);
    s.add({id, "app" + std::to_string(i % 7), {"t" + std::to_string(i % 3)}, ""}, random_vector(rng, dim));
  }
  return s;
}

}  // namespace

TEST_CASE("store basics") {
  EmbeddingStore s(3, 2, "fp");
  s.add({"a", "x", {}, ""}, Eigen::Vector3d(1, 0, 0));
  s.add({"b", "y", {"t"}, ""}, Eigen::Vector3d(0, 1, 0));
  CHECK(s.size() == 2);
  CHECK(s.contains("a"));
  CHECK_FALSE(s.contains("c"));
  CHECK(s.index_of("b") == 1);
  CHECK(s.vector("b") == Eigen::Vector3d(0, 1, 0));
  CHECK_THROWS_AS(s.index_of("c"), UnknownScreenId);
  CHECK_THROWS_AS(s.add({"c", "", {}, ""}, Eigen::Vector2d(1, 1)), DimensionMismatch);
  CHECK_THROWS_AS(s.add({"a", "", {}, ""}, Eigen::Vector3d(1, 1, 1)), Error);
}

TEST_CASE("nearest neighbour examples") {
  nn::Rng rng(1);
  const EmbeddingStore s = random_store(rng, 50, 8);
  const auto self = nearest_neighbors(s.vector("s00007"), 3, s);
  CHECK(self.front().id == "s00007");
  CHECK(std::abs(self.front().score - 1.0) < 1e-9);
  const auto all = nearest_neighbors(s.vector(0), 500, s);
  CHECK(all.size() == 50);
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].score >= all[i].score);
  CHECK_THROWS_AS(nearest_neighbors(Eigen::VectorXd::Zero(3), 3, s), DimensionMismatch);
}

TEST_CASE("nearest neighbours equal the brute-force oracle") {
  nn::Rng rng(2);
  const EmbeddingStore s = random_store(rng, 1000, 16, 10);
  for (int q = 0; q < 50; ++q) {
    const Eigen::VectorXd query = random_vector(rng, 16);
    for (Similarity sim : {Similarity::kCosine, Similarity::kDot}) {
      const auto got = nearest_neighbors(query, 20, s, {sim, Space::kFull});
      const auto want = guivec::testing::brute_force_neighbors(query, 20, s, sim);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].id == want[i].id);
        CHECK(std::abs(got[i].score - want[i].score) < 1e-12);
      }
    }
  }
}

TEST_CASE("ties break by id and results ignore insertion order") {
  EmbeddingStore a(2, 2, ""), b(2, 2, "");
  const std::vector<std::string> ids = {"d", "b", "a", "c"};
  for (const auto& id : ids) a.add({id, "", {}, ""}, Eigen::Vector2d(1, 1));
  for (auto it = ids.rbegin(); it != ids.rend(); ++it) b.add({*it, "", {}, ""}, Eigen::Vector2d(1, 1));
  const auto ra = nearest_neighbors(Eigen::Vector2d(1, 1), 4, a);
  CHECK(ra == nearest_neighbors(Eigen::Vector2d(1, 1), 4, b));
  CHECK(ra[0].id == "a");
  CHECK(ra[3].id == "d");
}

TEST_CASE("content space uses the first content_dim values") {
  EmbeddingStore s(4, 2, "");
  s.add({"a", "", {}, ""}, Eigen::Vector4d(1, 0, 5, 5));
  s.add({"b", "", {}, ""}, Eigen::Vector4d(0, 1, 0, 0));
  const auto full = nearest_neighbors(Eigen::Vector4d(0, 1, 5, 5), 1, s);
  const auto content = nearest_neighbors(Eigen::Vector4d(0, 1, 5, 5), 1, s, {Similarity::kCosine, Space::kContent});
  CHECK(full[0].id == "a");
  CHECK(content[0].id == "b");
  CHECK(nearest_neighbors(Eigen::Vector2d(0, 1), 1, s, {Similarity::kCosine, Space::kContent})[0].id == "b");
}

TEST_CASE("compose") {
  nn::Rng rng(3);
  const EmbeddingStore s = random_store(rng, 100, 12);
  const Eigen::VectorXd a = s.vector("s00001"), b = s.vector("s00002");
  const Eigen::VectorXd r = compose({{1, a}, {1, b}, {-1, b}});
  CHECK((r - a).norm() < 1e-12);
  const auto top = nearest_neighbors(r, 1, s);
  CHECK(top[0].id == "s00001");
  CHECK(std::abs(top[0].score - 1.0) < 1e-9);
  CHECK(compose({{1, a}}) == a);
  CHECK_THROWS_AS(compose({}), Error);
  CHECK_THROWS_AS(compose({{1, a}, {1, Eigen::VectorXd::Zero(3)}}), DimensionMismatch);
  // Positive scaling keeps the cosine ranking.
  const auto base = nearest_neighbors(a, 10, s);
  const auto scaled = nearest_neighbors(compose({{1, a}, {1, a}, {1, a}}), 10, s);
  for (std::size_t i = 0; i < base.size(); ++i) CHECK(base[i].id == scaled[i].id);
}

TEST_CASE("embed_task") {
  EmbeddingStore s(2, 2, "");
  s.add({"a", "", {}, ""}, Eigen::Vector2d(1, 3));
  s.add({"b", "", {}, ""}, Eigen::Vector2d(3, 5));
  CHECK(embed_task({"a"}, s) == Eigen::Vector2d(1, 3));
  CHECK(embed_task({"a", "b"}, s) == Eigen::Vector2d(2, 4));
  CHECK(embed_task({"b", "a"}, s) == embed_task({"a", "b"}, s));
  CHECK_THROWS_AS(embed_task({"a", "zz"}, s), UnknownScreenId);
  CHECK_THROWS_AS(embed_task({}, s), Error);
}

TEST_CASE("single-signal baselines") {
  FallbackTextEmbedder provider;
  const auto doc = [](std::vector<const char*> texts) {
    json children = json::array();
    int y = 0;
    for (const char* t : texts) {
      json n = {{"class", "TextView"}, {"bounds", {0, y, 400, y + 100}}, {"children", json::array()}};
      if (t) n["text"] = t;
      children.push_back(n);
      y += 200;
    }
    return parse_screen({{"activity", {{"root", {{"class", "FrameLayout"}, {"bounds", {0, 0, 800, 1400}}, {"children", children}}}}}});
  };
  CHECK((text_only_embed(doc({"Sign in"}), provider) - provider.embed("Sign in").values()).norm() < 1e-15);
  CHECK(text_only_embed(doc({nullptr, "  "}), provider).isZero());
  const Eigen::VectorXd a = provider.embed("a b c").values(), b = provider.embed("Done").values();
  CHECK((text_only_embed(doc({"a b c", "a b c", "Done"}), provider) - (2 * a + b) / 3).norm() < 1e-12);

  LayoutAutoencoder ae({11200, 16, 8, 4});
  ae.init(2);
  const GuiScreen s1 = doc({"x", "y"}), s2 = doc({"other", "words"});
  CHECK(layout_only_embed(s1, ae) == encode_layout(render_layout(s1), ae));
  CHECK(layout_only_embed(s1, ae) == layout_only_embed(s2, ae));
}

TEST_CASE("store persistence") {
  nn::Rng rng(4);
  EmbeddingStore s = random_store(rng, 30, 6, 4);
  LayoutBitmap bm;
  bm.set(3, 4, kTextCell);
  bm.set(79, 139, kNonTextCell);
  s.add({"thumb", "app", {"t1", "t2"}, pack_bitmap(bm)}, random_vector(rng, 6));
  const auto path = std::filesystem::temp_directory_path() / "guivec_unit_store.gvs";
  s.save(path);
  const EmbeddingStore back = EmbeddingStore::load(path);
  CHECK(back.to_bytes() == s.to_bytes());
  CHECK(back.fingerprint() == "fp");
  CHECK(back.content_dim() == 4);
  CHECK(back.entry("thumb").traces == std::vector<std::string>{"t1", "t2"});
  CHECK(unpack_bitmap(back.entry("thumb").thumbnail) == bm);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(back.vector(i) == s.vector(i));
  const Eigen::VectorXd q = random_vector(rng, 6);
  CHECK(nearest_neighbors(q, 5, back) == nearest_neighbors(q, 5, s));

  std::string bytes = s.to_bytes();
  CHECK_THROWS_AS(EmbeddingStore::from_bytes(bytes.substr(0, bytes.size() / 2)), FormatError);
  bytes[0] = 'X';
  CHECK_THROWS_AS(EmbeddingStore::from_bytes(bytes), FormatError);
}

TEST_CASE("evaluation metrics") {
  SUBCASE("perfect predictions") {
    nn::Rng rng(5);
    const EmbeddingStore s = random_store(rng, 40, 5);
    std::vector<Prediction> preds;
    for (std::size_t i = 0; i < s.size(); ++i) preds.push_back({s.vector(i), s.entries()[i].id});
    const auto j = evaluate_predictions(preds, s);
    CHECK(j["top1"] == 1.0);
    for (double p : EvaluationOptions{}.percents) CHECK(j[topk_key(p)] == 1.0);
    CHECK(j["normalized_rmse"] == 0.0);
  }
  SUBCASE("rank cutoffs") {
    CHECK(topk_cutoff(1.0, 1000) == 10);
    CHECK(topk_cutoff(0.1, 1000) == 1);
    CHECK(topk_cutoff(0.01, 1000) == 1);
    CHECK(topk_cutoff(5.0, 30) == 2);
    // 1000 entries; the correct one is built to rank 10th.
    EmbeddingStore s(2, 2, "");
    for (int i = 0; i < 1000; ++i) {
      char id[8];
      std::snprintf(id, sizeof id, "e%04d", i);
      const double angle = i < 9 ? 0.001 * i : (i == 9 ? 0.0095 : 0.5 + 0.001 * i);
      s.add({id, "", {}, ""}, Eigen::Vector2d(std::cos(angle), std::sin(angle)));
    }
    const auto j = evaluate_predictions({{Eigen::Vector2d(1, 0), "e0009"}}, s);
    CHECK(j["top1"] == 0.0);
    CHECK(j["top_1%"] == 1.0);
    CHECK(j["top_0.1%"] == 0.0);
    CHECK(j["top_5%"] == 1.0);
  }
  SUBCASE("hand-computed three entry store") {
    EmbeddingStore s(2, 2, "");
    s.add({"a", "", {}, ""}, Eigen::Vector2d(1, 0));
    s.add({"b", "", {}, ""}, Eigen::Vector2d(0, 1));
    s.add({"c", "", {}, ""}, Eigen::Vector2d(-1, 0));
    // p1 = (1,1): cosines a .7071, b .7071, c -.7071; a wins the tie by id, so b ranks 2.
    // p2 = (-2,0): c ranks 1.
    const auto j = evaluate_predictions({{Eigen::Vector2d(1, 1), "b"}, {Eigen::Vector2d(-2, 0), "c"}}, s,
                                        {{}, {50.0, 100.0}});
    CHECK(j["top1"] == 0.5);
    CHECK(j["top_50%"] == 1.0);  // ceil(1.5) = 2
    CHECK(j["top_100%"] == 1.0);
    // squared errors 1 and 1, truths have unit norm
    CHECK(j["normalized_rmse"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("monotone in k and errors") {
    nn::Rng rng(6);
    const EmbeddingStore s = random_store(rng, 200, 6);
    std::vector<Prediction> preds;
    for (int i = 0; i < 50; ++i) preds.push_back({random_vector(rng, 6), s.entries()[static_cast<std::size_t>(i)].id});
    const auto j = evaluate_predictions(preds, s, {{}, {0.01, 0.1, 1.0, 5.0, 10.0, 50.0}});
    double prev = j["top1"];
    for (double p : {0.01, 0.1, 1.0, 5.0, 10.0, 50.0}) {
      CHECK(j[topk_key(p)].get<double>() >= prev);
      prev = j[topk_key(p)];
    }
    CHECK_THROWS_AS(evaluate_predictions({{random_vector(rng, 6), "nope"}}, s), UnknownScreenId);
    CHECK_THROWS_AS(evaluate_predictions({}, EmbeddingStore(6, 6, "")), EmptyCorpus);
  }
  SUBCASE("table") {
    const std::string t = format_metrics_table({{"Screen", {{"top1", 0.5}, {"top_1%", 0.75}, {"normalized_rmse", 0.25}}},
                                                {"TextOnly", {{"top1", 0.25}, {"top_1%", 0.5}, {"normalized_rmse", nullptr}}}});
    CHECK(t.find("model") == 0);
    CHECK(t.find("TextOnly") != std::string::npos);
    CHECK(t.find("0.7500") != std::string::npos);
  }
}

TEST_CASE("bitmap packing") {
  nn::Rng rng(7);
  LayoutBitmap b;
  const float codes[] = {kBackgroundCell, kTextCell, kNonTextCell};
  for (int y = 0; y < 140; ++y) {
    for (int x = 0; x < 80; ++x) b.set(x, y, codes[nn::uniform_index(rng, 3)]);
  }
  CHECK(unpack_bitmap(pack_bitmap(b)) == b);
}

TEST_CASE("task pair matching") {
  const std::vector<Eigen::VectorXd> a = {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), Eigen::Vector2d(-1, 0)};
  std::vector<Eigen::VectorXd> b = {Eigen::Vector2d(2, 0.1), Eigen::Vector2d(0.1, 3), Eigen::Vector2d(-1, -0.2)};
  auto r = match_task_pairs(a, b);
  CHECK(r.matched == 6);
  CHECK(r.total == 6);
  b[2] = Eigen::Vector2d(0.2, 1);  // now closest to a[1] and far from a[2]
  r = match_task_pairs(a, b);
  CHECK(r.a_to_b == std::vector<int>{0, 1, 1});
  CHECK(r.b_to_a == std::vector<int>{0, 1, 1});
  CHECK(r.matched == 4);
  // Ties resolve to the smaller index.
  r = match_task_pairs({Eigen::Vector2d(1, 0), Eigen::Vector2d(1, 0)}, {Eigen::Vector2d(1, 0), Eigen::Vector2d(2, 0)});
  CHECK(r.a_to_b == std::vector<int>{0, 0});
  CHECK_THROWS_AS(match_task_pairs(a, {}), DimensionMismatch);
}
