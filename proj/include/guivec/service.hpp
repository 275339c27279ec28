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

#include <map>
#include <string>
#include <string_view>

#include "guivec/vector_store.hpp"
#include "json.hpp"

namespace guivec {

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Stateless request handling over one immutable store. Every route is a pure
// function of (method, target, body), so the CLI query commands and the HTTP
// server share it.
//
//   GET  /health
//   GET  /screens?offset=&limit=
//   GET  /screens/{id}            metadata + base64 PGM thumbnail
//   POST /nn       {screen_id | vector, k, space, similarity}
//   POST /compose  {terms: [{sign, screen_id | vector}], k, space, similarity}
//   POST /task     {screen_ids, k}
//
// A request may carry "fingerprint"; when it differs from the store's the
// answer is 409. Malformed bodies give 400, unknown ids 404, vectors of the
// wrong width 422.
class QueryService {
 public:
  explicit QueryService(EmbeddingStore store);

  HttpResponse handle(std::string_view method, std::string_view target, std::string_view body) const;

  const EmbeddingStore& store() const { return store_; }

 private:
  HttpResponse health() const;
  HttpResponse list_screens(const std::map<std::string, std::string>& query) const;
  HttpResponse screen(const std::string& id) const;
  HttpResponse nn(const nlohmann::json& request) const;
  HttpResponse compose(const nlohmann::json& request) const;
  HttpResponse task(const nlohmann::json& request) const;

  EmbeddingStore store_;
};

// Serialization shared by every JSON response: compact, trailing newline.
std::string render_json(const nlohmann::json& j);

// Percent-decoding; '+' becomes a space only in query strings.
std::string url_decode(std::string_view s, bool plus_as_space = false);

}  // namespace guivec
