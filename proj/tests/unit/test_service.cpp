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
#include "guivec/error.hpp"
#include "guivec/service.hpp"
#include "guivec/util.hpp"

using namespace guivec;
using nlohmann::json;

namespace {

QueryService make_service() {
  EmbeddingStore s(4, 2, "fp1");
  nn::Rng rng(9);
  LayoutBitmap bm;
  bm.set(0, 0, kTextCell);
  for (int i = 0; i < 12; ++i) {
    Eigen::VectorXd v(4);
    for (int d = 0; d < 4; ++d) v[d] = nn::uniform(rng, -1, 1);
    s.add({"app/" + std::to_string(10 + i), "app", {"t"}, i == 0 ? pack_bitmap(bm) : ""}, v);
  }
  return QueryService(std::move(s));
}

json body(const HttpResponse& r) { return json::parse(r.body); }

}  // namespace

TEST_CASE("service read routes") {
  const QueryService svc = make_service();
  const auto h = svc.handle("GET", "/health", "");
  CHECK(h.status == 200);
  CHECK(h.body.back() == '\n');
  CHECK(body(h)["entries"] == 12);
  CHECK(body(h)["fingerprint"] == "fp1");

  const auto page = body(svc.handle("GET", "/screens?offset=10&limit=5", ""));
  CHECK(page["total"] == 12);
  CHECK(page["screens"].size() == 2);
  CHECK(page["screens"][0]["id"] == "app/20");
  CHECK(svc.handle("GET", "/screens?limit=0", "").status == 400);
  CHECK(svc.handle("GET", "/screens?offset=x", "").status == 400);

  const auto one = body(svc.handle("GET", "/screens/app%2F10", ""));
  CHECK(one["id"] == "app/10");
  CHECK(one["thumbnail"]["format"] == "pgm");
  const std::string pgm = base64_decode(one["thumbnail"]["data"].get<std::string>());
  CHECK(pgm.rfind("P5\n80 140\n255\n", 0) == 0);
  CHECK(body(svc.handle("GET", "/screens/app%2F11", ""))["thumbnail"].is_null());
  CHECK(svc.handle("GET", "/screens/nope", "").status == 404);
  CHECK(svc.handle("GET", "/missing", "").status == 404);
  CHECK(svc.handle("DELETE", "/health", "").status == 404);
}

TEST_CASE("service query routes") {
  const QueryService svc = make_service();
  const auto self = body(svc.handle("POST", "/nn", R"({"screen_id":"app/13","k":5})"));
  REQUIRE(self["results"].size() == 5);
  CHECK(self["results"][0]["id"] == "app/13");
  CHECK(self["results"][0]["score"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(self["space"] == "full");
  CHECK(body(svc.handle("POST", "/nn", R"({"screen_id":"app/13"})"))["results"].size() == 10);

  const auto composed = body(svc.handle(
      "POST", "/compose",
      R"({"terms":[{"sign":1,"screen_id":"app/12"},{"sign":"+","screen_id":"app/15"},{"sign":-1,"screen_id":"app/15"}],"k":1})"));
  CHECK(composed["results"][0]["id"] == "app/12");

  const auto task = body(svc.handle("POST", "/task", R"({"screen_ids":["app/10","app/11"],"k":3})"));
  const Eigen::VectorXd mean = (svc.store().vector("app/10") + svc.store().vector("app/11")) / 2;
  for (int d = 0; d < 4; ++d) CHECK(task["vector"][static_cast<std::size_t>(d)].get<double>() == mean[d]);

  const auto content = body(svc.handle("POST", "/nn", R"({"vector":[1,0],"space":"content","similarity":"dot","k":2})"));
  CHECK(content["similarity"] == "dot");
  CHECK(content["results"].size() == 2);
}

TEST_CASE("service error codes") {
  const QueryService svc = make_service();
  CHECK(svc.handle("POST", "/nn", "{not json").status == 400);
  CHECK(svc.handle("POST", "/nn", "[1]").status == 400);
  CHECK(svc.handle("POST", "/nn", "{}").status == 400);
  CHECK(svc.handle("POST", "/nn", R"({"screen_id":"app/10","k":0})").status == 400);
  CHECK(svc.handle("POST", "/nn", R"({"screen_id":"app/10","space":"odd"})").status == 400);
  CHECK(svc.handle("POST", "/nn", R"({"vector":[1,"a"]})").status == 400);
  CHECK(svc.handle("POST", "/compose", R"({"terms":[]})").status == 400);
  CHECK(svc.handle("POST", "/compose", R"({"terms":[{"sign":2,"screen_id":"app/10"}]})").status == 400);
  CHECK(svc.handle("POST", "/task", R"({"screen_ids":[]})").status == 400);
  CHECK(svc.handle("POST", "/nn", R"({"screen_id":"app/99"})").status == 404);
  CHECK(svc.handle("POST", "/task", R"({"screen_ids":["app/10","zz"]})").status == 404);
  CHECK(svc.handle("POST", "/other", "{}").status == 404);
  CHECK(svc.handle("POST", "/nn", R"({"screen_id":"app/10","fingerprint":"other"})").status == 409);
  CHECK(svc.handle("POST", "/nn", R"({"screen_id":"app/10","fingerprint":"fp1"})").status == 200);
  CHECK(svc.handle("POST", "/nn", R"({"vector":[1,2,3]})").status == 422);
  const auto err = svc.handle("POST", "/nn", R"({"vector":[1,2,3]})");
  CHECK(body(err).contains("error"));
}

TEST_CASE("url decoding") {
  CHECK(url_decode("a%2Fb") == "a/b");
  CHECK(url_decode("a+b") == "a+b");
  CHECK(url_decode("a+b", true) == "a b");
  CHECK(url_decode("%zz%4") == "%zz%4");
  CHECK(url_decode("%41") == "A");
}
