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

#include "guivec/vector_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "guivec/error.hpp"
#include "guivec/metrics.hpp"
#include "guivec/util.hpp"

namespace guivec {

namespace {

constexpr std::string_view kStoreMagic = "GVSTOR1";
constexpr std::uint8_t kStoreVersion = 1;

void put_le(std::string& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

class ByteReader {
 public:
  explicit ByteReader(std::string_view b) : bytes_(b) {}
  std::string_view take(std::size_t n) {
    if (n > bytes_.size() - pos_) throw FormatError("store file truncated");
    std::string_view out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint64_t le(int n) {
    const std::string_view b = take(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[static_cast<std::size_t>(i)])) << (8 * i);
    return v;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view similarity_name(Similarity s) { return s == Similarity::kCosine ? "cosine" : "dot"; }

Similarity similarity_from_name(std::string_view name) {
  if (name == "cosine") return Similarity::kCosine;
  if (name == "dot") return Similarity::kDot;
  throw Error("unknown similarity: " + std::string(name));
}

std::string_view space_name(Space s) { return s == Space::kFull ? "full" : "content"; }

Space space_from_name(std::string_view name) {
  if (name == "full") return Space::kFull;
  if (name == "content") return Space::kContent;
  throw Error("unknown space: " + std::string(name));
}

EmbeddingStore::EmbeddingStore(int dim, int content_dim, std::string fingerprint)
    : dim_(dim), content_dim_(content_dim), fingerprint_(std::move(fingerprint)) {
  if (dim < 1 || content_dim < 0 || content_dim > dim) throw DimensionMismatch("invalid store dimensions");
}

void EmbeddingStore::add(StoreEntry entry, const Eigen::VectorXd& vector) {
  if (vector.size() != dim_) {
    throw DimensionMismatch("vector of size " + std::to_string(vector.size()) + " added to a store of dimension " +
                            std::to_string(dim_));
  }
  if (index_.count(entry.id)) throw Error("duplicate store id " + entry.id);
  index_.emplace(entry.id, entries_.size());
  entries_.push_back(std::move(entry));
  for (Eigen::Index i = 0; i < vector.size(); ++i) data_.push_back(static_cast<float>(vector[i]));
}

std::size_t EmbeddingStore::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw UnknownScreenId("unknown screen id " + id);
  return it->second;
}

Eigen::VectorXd EmbeddingStore::vector(std::size_t i) const {
  if (i >= entries_.size()) throw IndexOutOfRange("store index out of range");
  Eigen::VectorXd v(dim_);
  const float* row = data_.data() + i * static_cast<std::size_t>(dim_);
  for (int j = 0; j < dim_; ++j) v[j] = row[j];
  return v;
}

Eigen::VectorXd EmbeddingStore::scores(const Eigen::VectorXd& query, const QueryOptions& options) const {
  int width = dim_;
  if (options.space == Space::kContent) {
    if (query.size() != dim_ && query.size() != content_dim_) {
      throw DimensionMismatch("content query of size " + std::to_string(query.size()) + " against content dimension " +
                              std::to_string(content_dim_));
    }
    width = content_dim_;
  } else if (query.size() != dim_) {
    throw DimensionMismatch("query of size " + std::to_string(query.size()) + " against store dimension " +
                            std::to_string(dim_));
  }
  double qnorm = 0.0;
  for (int j = 0; j < width; ++j) qnorm += query[j] * query[j];
  qnorm = std::sqrt(qnorm);
  Eigen::VectorXd out(static_cast<Eigen::Index>(entries_.size()));
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const float* row = data_.data() + i * static_cast<std::size_t>(dim_);
    double dot = 0.0;
    double norm = 0.0;
    for (int j = 0; j < width; ++j) {
      const double v = row[j];
      dot += v * query[j];
      norm += v * v;
    }
    if (options.similarity == Similarity::kCosine) {
      const double denom = qnorm * std::sqrt(norm);
      dot = denom > 0.0 ? dot / denom : 0.0;
    }
    out[static_cast<Eigen::Index>(i)] = dot;
  }
  return out;
}

std::string EmbeddingStore::to_bytes() const {
  std::string out(kStoreMagic);
  out += static_cast<char>(kStoreVersion);
  put_le(out, static_cast<std::uint32_t>(dim_), 4);
  put_le(out, entries_.size(), 8);
  put_le(out, fingerprint_.size(), 4);
  out += fingerprint_;
  out.reserve(out.size() + data_.size() * 4 + 64);
  for (float f : data_) put_le(out, std::bit_cast<std::uint32_t>(f), 4);
  nlohmann::json footer;
  footer["content_dim"] = content_dim_;
  footer["entries"] = nlohmann::json::array();
  for (const StoreEntry& e : entries_) {
    footer["entries"].push_back({{"id", e.id}, {"app_id", e.app_id}, {"traces", e.traces}, {"thumbnail", e.thumbnail}});
  }
  const std::string text = footer.dump();
  put_le(out, text.size(), 8);
  out += text;
  return out;
}

EmbeddingStore EmbeddingStore::from_bytes(std::string_view bytes) {
  ByteReader in(bytes);
  if (in.take(kStoreMagic.size()) != kStoreMagic) throw FormatError("not a GVSTOR1 store");
  if (in.le(1) != kStoreVersion) throw FormatError("unsupported store version");
  const auto dim = static_cast<int>(in.le(4));
  const std::uint64_t count = in.le(8);
  std::string fingerprint(in.take(in.le(4)));
  if (dim < 1) throw FormatError("store dimension must be positive");
  if (count > bytes.size() / (4 * static_cast<std::uint64_t>(dim))) throw FormatError("store count exceeds file size");
  std::vector<float> data(count * static_cast<std::uint64_t>(dim));
  for (float& f : data) f = std::bit_cast<float>(static_cast<std::uint32_t>(in.le(4)));
  nlohmann::json footer;
  try {
    footer = nlohmann::json::parse(in.take(in.le(8)));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("store footer: ") + e.what());
  }
  if (!in.done()) throw FormatError("trailing bytes after store footer");
  const auto& entries = footer.at("entries");
  if (entries.size() != count) throw FormatError("store footer lists a different number of entries");
  EmbeddingStore store(dim, footer.at("content_dim").get<int>(), std::move(fingerprint));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    StoreEntry entry{e.at("id").get<std::string>(), e.value("app_id", ""),
                     e.value("traces", std::vector<std::string>{}), e.value("thumbnail", "")};
    if (store.index_.count(entry.id)) throw FormatError("duplicate store id " + entry.id);
    store.index_.emplace(entry.id, i);
    store.entries_.push_back(std::move(entry));
  }
  store.data_ = std::move(data);
  return store;
}

void EmbeddingStore::save(const std::filesystem::path& path) const { write_file(path, to_bytes()); }

EmbeddingStore EmbeddingStore::load(const std::filesystem::path& path) { return from_bytes(read_file(path)); }

QueryResult nearest_neighbors(const Eigen::VectorXd& query, std::size_t k, const EmbeddingStore& store,
                              const QueryOptions& options) {
  const Eigen::VectorXd scores = store.scores(query, options);
  std::vector<std::size_t> order(store.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto& entries = store.entries();
  auto better = [&](std::size_t a, std::size_t b) {
    const double sa = scores[static_cast<Eigen::Index>(a)];
    const double sb = scores[static_cast<Eigen::Index>(b)];
    if (sa != sb) return sa > sb;
    return entries[a].id < entries[b].id;
  };
  const std::size_t take = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(), better);
  QueryResult out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.push_back({entries[order[i]].id, scores[static_cast<Eigen::Index>(order[i])]});
  }
  return out;
}

Eigen::VectorXd compose(const std::vector<ComposeTerm>& terms) {
  if (terms.empty()) throw Error("compose needs at least one term");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(terms.front().vector.size());
  for (const ComposeTerm& t : terms) {
    if (t.vector.size() != out.size()) throw DimensionMismatch("compose terms have different dimensions");
    if (t.sign != 1 && t.sign != -1) throw Error("compose sign must be +1 or -1");
    if (t.sign > 0) {
      out += t.vector;
    } else {
      out -= t.vector;
    }
  }
  return out;
}

Eigen::VectorXd embed_task(const std::vector<std::string>& screens, const EmbeddingStore& store) {
  if (screens.empty()) throw Error("a task needs at least one screen");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(store.dim());
  for (const std::string& id : screens) sum += store.vector(id);
  return sum / static_cast<double>(screens.size());
}

TaskMatchResult match_task_pairs(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b) {
  if (a.size() != b.size()) throw DimensionMismatch("task variants differ in length");
  auto pick = [](const Eigen::VectorXd& q, const std::vector<Eigen::VectorXd>& pool) {
    int best = -1;
    double best_score = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool[i].size() != q.size()) throw DimensionMismatch("task vectors differ in dimension");
      const double denom = q.norm() * pool[i].norm();
      const double s = denom > 0.0 ? q.dot(pool[i]) / denom : 0.0;
      if (best < 0 || s > best_score) {
        best = static_cast<int>(i);
        best_score = s;
      }
    }
    return best;
  };
  TaskMatchResult r;
  for (std::size_t i = 0; i < a.size(); ++i) {
    r.a_to_b.push_back(pick(a[i], b));
    r.b_to_a.push_back(pick(b[i], a));
    r.matched += (r.a_to_b.back() == static_cast<int>(i)) + (r.b_to_a.back() == static_cast<int>(i));
  }
  r.total = static_cast<int>(2 * a.size());
  return r;
}

Eigen::VectorXd text_only_embed(const GuiScreen& screen, const TextProvider& provider) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(kTextDim);
  std::size_t n = 0;
  for (const GuiComponent& c : screen.nodes) {
    if (!c.text || normalize_text(*c.text).empty()) continue;
    sum += provider.embed(*c.text).values();
    ++n;
  }
  return n ? Eigen::VectorXd(sum / static_cast<double>(n)) : sum;
}

Eigen::VectorXd layout_only_embed(const GuiScreen& screen, const LayoutAutoencoder& autoencoder) {
  return encode_layout(render_layout(screen), autoencoder);
}

nlohmann::json evaluate_predictions(const std::vector<Prediction>& predictions, const EmbeddingStore& store,
                                    const EvaluationOptions& options) {
  if (store.empty()) throw EmptyCorpus("evaluation needs a non-empty store");
  const auto& entries = store.entries();
  RankTally tally(store.size(), options.percents);
  const int width = options.query.space == Space::kContent ? store.content_dim() : store.dim();
  double squared = 0.0;
  double norms = 0.0;
  for (const Prediction& p : predictions) {
    const std::size_t correct = store.index_of(p.correct);
    const Eigen::VectorXd scores = store.scores(p.predicted, options.query);
    const double s = scores[static_cast<Eigen::Index>(correct)];
    std::size_t rank = 1;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const double v = scores[static_cast<Eigen::Index>(i)];
      if (v > s || (v == s && entries[i].id < entries[correct].id)) ++rank;
    }
    tally.add(rank);
    const Eigen::VectorXd truth = store.vector(correct).head(width);
    squared += (p.predicted.head(width) - truth).squaredNorm();
    norms += truth.norm();
  }
  nlohmann::json j = tally.to_json();
  j["similarity"] = similarity_name(options.query.similarity);
  j["space"] = space_name(options.query.space);
  if (predictions.empty() || norms == 0.0) {
    j["normalized_rmse"] = nullptr;
  } else {
    const auto n = static_cast<double>(predictions.size());
    j["normalized_rmse"] = std::sqrt(squared / n) / (norms / n);
  }
  return j;
}

std::string format_metrics_table(const std::vector<std::pair<std::string, nlohmann::json>>& rows) {
  std::vector<std::string> columns = {"top1"};
  if (!rows.empty()) {
    for (const auto& [key, value] : rows.front().second.items()) {
      if (key.rfind("top_", 0) == 0) columns.push_back(key);
    }
    std::sort(columns.begin() + 1, columns.end(), [](const std::string& a, const std::string& b) {
      return std::stod(a.substr(4)) < std::stod(b.substr(4));
    });
  }
  columns.push_back("normalized_rmse");
  std::size_t label_width = 5;
  for (const auto& r : rows) label_width = std::max(label_width, r.first.size());
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(label_width), "model");
  out << buf;
  for (const std::string& c : columns) {
    std::snprintf(buf, sizeof buf, "  %16s", c.c_str());
    out << buf;
  }
  out << "\n";
  for (const auto& [label, metrics] : rows) {
    std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(label_width), label.c_str());
    out << buf;
    for (const std::string& c : columns) {
      if (metrics.contains(c) && metrics[c].is_number()) {
        std::snprintf(buf, sizeof buf, "  %16.4f", metrics[c].get<double>());
      } else {
        std::snprintf(buf, sizeof buf, "  %16s", "-");
      }
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

std::string pack_bitmap(const LayoutBitmap& bitmap) {
  const auto& cells = bitmap.cells();
  std::string bytes((cells.size() + 3) / 4, '\0');
  for (std::size_t i = 0; i < cells.size(); ++i) {
    unsigned code = 0;
    if (cells[i] >= kNonTextCell) {
      code = 2;
    } else if (cells[i] >= kTextCell) {
      code = 1;
    }
    bytes[i / 4] = static_cast<char>(static_cast<unsigned char>(bytes[i / 4]) | (code << (2 * (i % 4))));
  }
  return base64_encode(bytes);
}

LayoutBitmap unpack_bitmap(const std::string& packed, LayoutGrid grid) {
  const std::string bytes = base64_decode(packed);
  LayoutBitmap bitmap(grid);
  const auto n = static_cast<std::size_t>(grid.cells());
  if (bytes.size() != (n + 3) / 4) throw FormatError("thumbnail size does not match the grid");
  static constexpr float kValues[] = {kBackgroundCell, kTextCell, kNonTextCell, kNonTextCell};
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned code = (static_cast<unsigned char>(bytes[i / 4]) >> (2 * (i % 4))) & 3u;
    bitmap.set(static_cast<int>(i % static_cast<std::size_t>(grid.width)),
               static_cast<int>(i / static_cast<std::size_t>(grid.width)), kValues[code]);
  }
  return bitmap;
}

}  // namespace guivec
