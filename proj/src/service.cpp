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

#include "guivec/service.hpp"

#include <charconv>

#include "guivec/error.hpp"
#include "guivec/layout_model.hpp"
#include "guivec/util.hpp"

namespace guivec {

namespace {

using nlohmann::json;

class BadRequest : public Error {
 public:
  using Error::Error;
};

HttpResponse error_response(int status, const std::string& message) {
  return {status, render_json({{"error", message}})};
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::map<std::string, std::string> parse_query(std::string_view q) {
  std::map<std::string, std::string> out;
  while (!q.empty()) {
    const std::size_t amp = q.find('&');
    std::string_view pair = q.substr(0, amp);
    q = amp == std::string_view::npos ? std::string_view{} : q.substr(amp + 1);
    if (pair.empty()) continue;
    const std::size_t eq = pair.find('=');
    if (eq == std::string_view::npos) {
      out[url_decode(pair, true)] = "";
    } else {
      out[url_decode(pair.substr(0, eq), true)] = url_decode(pair.substr(eq + 1), true);
    }
  }
  return out;
}

std::size_t parse_count(const std::string& text, const char* what) {
  std::size_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw BadRequest(std::string(what) + " must be a non-negative integer");
  }
  return v;
}

std::size_t get_k(const json& request) {
  if (!request.contains("k")) return 10;
  const json& k = request.at("k");
  if (!k.is_number_integer() || k.get<long long>() < 1) throw BadRequest("k must be a positive integer");
  return static_cast<std::size_t>(k.get<long long>());
}

QueryOptions get_options(const json& request) {
  QueryOptions opts;
  try {
    if (request.contains("space")) opts.space = space_from_name(request.at("space").get<std::string>());
    if (request.contains("similarity")) {
      opts.similarity = similarity_from_name(request.at("similarity").get<std::string>());
    }
  } catch (const Error& e) {
    throw BadRequest(e.what());
  }
  return opts;
}

Eigen::VectorXd get_vector(const json& value) {
  if (!value.is_array()) throw BadRequest("vector must be an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(value.size()));
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (!value[i].is_number()) throw BadRequest("vector must be an array of numbers");
    v[static_cast<Eigen::Index>(i)] = value[i].get<double>();
  }
  return v;
}

// A screen_id or an explicit vector.
Eigen::VectorXd get_query(const json& object, const EmbeddingStore& store) {
  if (object.contains("screen_id")) {
    if (!object.at("screen_id").is_string()) throw BadRequest("screen_id must be a string");
    return store.vector(object.at("screen_id").get<std::string>());
  }
  if (object.contains("vector")) return get_vector(object.at("vector"));
  throw BadRequest("expected screen_id or vector");
}

int get_sign(const json& term) {
  if (!term.contains("sign")) return 1;
  const json& s = term.at("sign");
  if (s.is_number_integer() && (s.get<int>() == 1 || s.get<int>() == -1)) return s.get<int>();
  if (s.is_string() && (s == "+" || s == "-")) return s == "+" ? 1 : -1;
  throw BadRequest("sign must be 1, -1, \"+\" or \"-\"");
}

json results_json(const QueryResult& result, const EmbeddingStore& store) {
  json list = json::array();
  for (const Neighbor& n : result) {
    list.push_back({{"id", n.id}, {"app_id", store.entry(n.id).app_id}, {"score", n.score}});
  }
  return list;
}

json query_response(const Eigen::VectorXd& query, std::size_t k, const QueryOptions& opts,
                    const EmbeddingStore& store) {
  const QueryResult result = nearest_neighbors(query, k, store, opts);
  return {{"k", k},
          {"space", space_name(opts.space)},
          {"similarity", similarity_name(opts.similarity)},
          {"results", results_json(result, store)}};
}

}  // namespace

std::string render_json(const nlohmann::json& j) { return j.dump() + "\n"; }

std::string url_decode(std::string_view s, bool plus_as_space) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      const int hi = hex_value(s[i + 1]);
      const int lo = hex_value(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
        continue;
      }
    }
    out += plus_as_space && s[i] == '+' ? ' ' : s[i];
  }
  return out;
}

QueryService::QueryService(EmbeddingStore store) : store_(std::move(store)) {}

HttpResponse QueryService::handle(std::string_view method, std::string_view target, std::string_view body) const {
  const std::size_t qmark = target.find('?');
  const std::string_view path = target.substr(0, qmark);
  const std::string_view query = qmark == std::string_view::npos ? std::string_view{} : target.substr(qmark + 1);
  try {
    if (method == "GET") {
      if (path == "/health") return health();
      if (path == "/screens") return list_screens(parse_query(query));
      if (path.rfind("/screens/", 0) == 0 && path.size() > 9) return screen(url_decode(path.substr(9)));
      return error_response(404, "no route for GET " + std::string(path));
    }
    if (method == "POST") {
      if (path != "/nn" && path != "/compose" && path != "/task") {
        return error_response(404, "no route for POST " + std::string(path));
      }
      const json request = json::parse(body.empty() ? std::string_view("{}") : body);
      if (!request.is_object()) throw BadRequest("request body must be a JSON object");
      if (request.contains("fingerprint")) {
        if (!request.at("fingerprint").is_string()) throw BadRequest("fingerprint must be a string");
        const std::string fp = request.at("fingerprint").get<std::string>();
        if (fp != store_.fingerprint()) {
          throw FingerprintMismatch("store fingerprint is " + store_.fingerprint() + ", request expects " + fp);
        }
      }
      if (path == "/nn") return nn(request);
      if (path == "/compose") return compose(request);
      return task(request);
    }
    return error_response(404, "no route for " + std::string(method) + " " + std::string(path));
  } catch (const json::exception& e) {
    return error_response(400, std::string("malformed request: ") + e.what());
  } catch (const BadRequest& e) {
    return error_response(400, e.what());
  } catch (const UnknownScreenId& e) {
    return error_response(404, e.what());
  } catch (const FingerprintMismatch& e) {
    return error_response(409, e.what());
  } catch (const DimensionMismatch& e) {
    return error_response(422, e.what());
  } catch (const Error& e) {
    return error_response(400, e.what());
  }
}

HttpResponse QueryService::health() const {
  return {200, render_json({{"status", "ok"},
                            {"entries", store_.size()},
                            {"dim", store_.dim()},
                            {"content_dim", store_.content_dim()},
                            {"fingerprint", store_.fingerprint()}})};
}

HttpResponse QueryService::list_screens(const std::map<std::string, std::string>& query) const {
  std::size_t offset = 0;
  std::size_t limit = 50;
  if (auto it = query.find("offset"); it != query.end()) offset = parse_count(it->second, "offset");
  if (auto it = query.find("limit"); it != query.end()) limit = parse_count(it->second, "limit");
  if (limit == 0 || limit > 1000) throw BadRequest("limit must be between 1 and 1000");
  json screens = json::array();
  const auto& entries = store_.entries();
  for (std::size_t i = offset; i < entries.size() && i < offset + limit; ++i) {
    screens.push_back({{"id", entries[i].id}, {"app_id", entries[i].app_id}});
  }
  return {200, render_json({{"total", entries.size()}, {"offset", offset}, {"limit", limit}, {"screens", screens}})};
}

HttpResponse QueryService::screen(const std::string& id) const {
  const StoreEntry& e = store_.entry(id);
  json j = {{"id", e.id}, {"app_id", e.app_id}, {"traces", e.traces}};
  if (e.thumbnail.empty()) {
    j["thumbnail"] = nullptr;
  } else {
    const LayoutBitmap bitmap = unpack_bitmap(e.thumbnail);
    j["thumbnail"] = {{"format", "pgm"},
                      {"encoding", "base64"},
                      {"width", bitmap.grid().width},
                      {"height", bitmap.grid().height},
                      {"data", base64_encode(to_pgm(bitmap))}};
  }
  return {200, render_json(j)};
}

HttpResponse QueryService::nn(const json& request) const {
  const Eigen::VectorXd query = get_query(request, store_);
  return {200, render_json(query_response(query, get_k(request), get_options(request), store_))};
}

HttpResponse QueryService::compose(const json& request) const {
  if (!request.contains("terms") || !request.at("terms").is_array() || request.at("terms").empty()) {
    throw BadRequest("terms must be a non-empty array");
  }
  std::vector<ComposeTerm> terms;
  for (const json& t : request.at("terms")) {
    if (!t.is_object()) throw BadRequest("each term must be an object");
    terms.push_back({get_sign(t), get_query(t, store_)});
  }
  return {200, render_json(query_response(guivec::compose(terms), get_k(request), get_options(request), store_))};
}

HttpResponse QueryService::task(const json& request) const {
  if (!request.contains("screen_ids") || !request.at("screen_ids").is_array() ||
      request.at("screen_ids").empty()) {
    throw BadRequest("screen_ids must be a non-empty array");
  }
  const auto ids = request.at("screen_ids").get<std::vector<std::string>>();
  const Eigen::VectorXd v = embed_task(ids, store_);
  json response = query_response(v, get_k(request), get_options(request), store_);
  response["vector"] = std::vector<double>(v.data(), v.data() + v.size());
  return {200, render_json(response)};
}

}  // namespace guivec
