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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "guivec/corpus.hpp"
#include "guivec/layout_model.hpp"
#include "guivec/nn.hpp"
#include "guivec/text_provider.hpp"
#include "json.hpp"

namespace guivec {

struct StoreEntry {
  std::string id;
  std::string app_id;
  std::vector<std::string> traces;
  std::string thumbnail;  // packed layout bitmap (see pack_bitmap), may be empty
};

enum class Similarity { kCosine, kDot };
enum class Space { kFull, kContent };

std::string_view similarity_name(Similarity s);
Similarity similarity_from_name(std::string_view name);
std::string_view space_name(Space s);
Space space_from_name(std::string_view name);

struct QueryOptions {
  Similarity similarity = Similarity::kCosine;
  Space space = Space::kFull;
};

struct Neighbor {
  std::string id;
  double score = 0.0;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};
using QueryResult = std::vector<Neighbor>;

// Immutable once built. Vectors are kept as float32, exactly as persisted,
// so a loaded store answers queries identically to the one that was saved.
//
// File layout (little-endian):
//   "GVSTOR1" u8 version | u32 dim | u64 count | u32 fingerprint length |
//   fingerprint | count*dim float32 | u64 footer length | footer JSON
// The footer holds ids, app ids, trace memberships, thumbnails and the
// content dimension.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  EmbeddingStore(int dim, int content_dim, std::string fingerprint);

  // Throws DimensionMismatch or Error on a duplicate id.
  void add(StoreEntry entry, const Eigen::VectorXd& vector);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  int dim() const { return dim_; }
  int content_dim() const { return content_dim_; }
  const std::string& fingerprint() const { return fingerprint_; }
  const std::vector<StoreEntry>& entries() const { return entries_; }

  bool contains(const std::string& id) const { return index_.count(id) > 0; }
  // Throws UnknownScreenId.
  std::size_t index_of(const std::string& id) const;
  const StoreEntry& entry(const std::string& id) const { return entries_[index_of(id)]; }
  Eigen::VectorXd vector(std::size_t i) const;
  Eigen::VectorXd vector(const std::string& id) const { return vector(index_of(id)); }

  // Similarity of `query` to every entry, in entry order.
  Eigen::VectorXd scores(const Eigen::VectorXd& query, const QueryOptions& options = {}) const;

  std::string to_bytes() const;
  static EmbeddingStore from_bytes(std::string_view bytes);
  void save(const std::filesystem::path& path) const;
  static EmbeddingStore load(const std::filesystem::path& path);

 private:
  int dim_ = 0;
  int content_dim_ = 0;
  std::string fingerprint_;
  std::vector<StoreEntry> entries_;
  std::map<std::string, std::size_t> index_;
  std::vector<float> data_;  // size() x dim_
};

// Exhaustive top-k, scores descending, ties by id. k larger than the store
// returns every entry. Throws DimensionMismatch.
QueryResult nearest_neighbors(const Eigen::VectorXd& query, std::size_t k, const EmbeddingStore& store,
                              const QueryOptions& options = {});

struct ComposeTerm {
  int sign = 1;
  Eigen::VectorXd vector;
};

// Signed sum. Throws DimensionMismatch, or Error when `terms` is empty.
Eigen::VectorXd compose(const std::vector<ComposeTerm>& terms);

// Mean of the stored vectors. Throws UnknownScreenId, or Error when empty.
Eigen::VectorXd embed_task(const std::vector<std::string>& screens, const EmbeddingStore& store);

// Pair matching between two variants of the same task list: every variant-a
// task picks the variant-b task with the highest cosine similarity and vice
// versa (ties go to the smaller index). Counts picks that land on the same task.
struct TaskMatchResult {
  int matched = 0;
  int total = 0;
  std::vector<int> a_to_b;
  std::vector<int> b_to_a;
};
TaskMatchResult match_task_pairs(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b);

// Mean text embedding of every non-empty node text, repeats counted.
Eigen::VectorXd text_only_embed(const GuiScreen& screen, const TextProvider& provider);
Eigen::VectorXd layout_only_embed(const GuiScreen& screen, const LayoutAutoencoder& autoencoder);

struct Prediction {
  Eigen::VectorXd predicted;
  std::string correct;
};

struct EvaluationOptions {
  QueryOptions query;
  std::vector<double> percents = {0.01, 0.1, 1.0, 5.0};
};

// Ranks every store entry for each prediction; top-k% hits when the rank is
// within ceil(k% of N). Normalized RMSE divides the RMS error by the mean norm
// of the correct vectors. Throws UnknownScreenId, EmptyCorpus for an empty store.
nlohmann::json evaluate_predictions(const std::vector<Prediction>& predictions, const EmbeddingStore& store,
                                    const EvaluationOptions& options = {});

// Aligned text table of one or more metric objects keyed by row label.
std::string format_metrics_table(const std::vector<std::pair<std::string, nlohmann::json>>& rows);

// Two bits per cell, base64; used for store thumbnails.
std::string pack_bitmap(const LayoutBitmap& bitmap);
LayoutBitmap unpack_bitmap(const std::string& packed, LayoutGrid grid = {});

}  // namespace guivec
