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

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "guivec/corpus.hpp"

namespace guivec {

inline constexpr int kTextDim = 768;

// A sentence embedding: exactly kTextDim finite values.
class TextEmbedding {
 public:
  TextEmbedding() : values_(Eigen::VectorXd::Zero(kTextDim)) {}
  explicit TextEmbedding(Eigen::VectorXd values);

  const Eigen::VectorXd& values() const { return values_; }
  double operator[](int i) const { return values_[i]; }
  static constexpr int size() { return kTextDim; }

  friend bool operator==(const TextEmbedding& a, const TextEmbedding& b) {
    return a.values_ == b.values_;
  }

 private:
  Eigen::VectorXd values_;
};

// Trim + Unicode NFC; the key under which texts are looked up and deduplicated.
std::string normalize_text(std::string_view s);

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

class TextProvider {
 public:
  virtual ~TextProvider() = default;
  virtual TextEmbedding embed(std::string_view text) const = 0;
  // Stable description used in manifests and fingerprints.
  virtual std::string describe() const = 0;
};

// Character n-gram (3..5) feature hashing with signed buckets, L2-normalised.
// Words are lower-cased and wrapped in '<' '>' before n-grams are taken.
class FallbackTextEmbedder final : public TextProvider {
 public:
  TextEmbedding embed(std::string_view text) const override;
  std::string describe() const override { return "fallback:ngram3-5"; }
};

TextEmbedding fallback_embed(std::string_view text);

// Vectors precomputed by an external sentence encoder. Each line of the file
// is `<base64 UTF-8 text>\t<768 comma-separated decimals>`. Misses fall back
// to FallbackTextEmbedder with a warning.
class LookupTextProvider final : public TextProvider {
 public:
  explicit LookupTextProvider(const std::filesystem::path& path);
  LookupTextProvider(std::unordered_map<std::string, TextEmbedding> table, std::string origin);

  TextEmbedding embed(std::string_view text) const override;
  std::string describe() const override;
  std::size_t size() const { return table_.size(); }
  std::size_t misses() const { return misses_; }

 private:
  std::unordered_map<std::string, TextEmbedding> table_;
  std::string origin_;
  std::uint64_t content_hash_ = 0;
  FallbackTextEmbedder fallback_;
  mutable std::size_t misses_ = 0;
};

// "fallback" or "lookup:<path>". Throws ProviderUnavailable.
std::unique_ptr<TextProvider> make_text_provider(const std::string& spec);

std::string format_lookup_line(std::string_view text, const TextEmbedding& e);

struct Vocabulary {
  std::vector<std::string> texts;
  std::unordered_map<std::string, int> index_of;
  Eigen::MatrixXd matrix;  // texts.size() x kTextDim, row i embeds texts[i]

  std::size_t size() const { return texts.size(); }
  // -1 when absent. Input is normalised first.
  int find(std::string_view text) const;
};

// All distinct embeddable-component texts, first-seen order.
std::vector<std::string> vocabulary_texts(const std::vector<const GuiScreen*>& screens);
Vocabulary build_vocabulary(const std::vector<GuiScreen>& screens, const TextProvider& provider);
Vocabulary build_vocabulary(const std::vector<const GuiScreen*>& screens,
                            const TextProvider& provider);

// Every component text and app description, deduplicated, for the export
// utility that feeds an external encoder.
std::vector<std::string> collect_corpus_texts(const Corpus& corpus);

}  // namespace guivec
