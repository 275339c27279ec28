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

#include "guivec/text_provider.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "guivec/error.hpp"
#include "guivec/util.hpp"

namespace guivec {

namespace {

constexpr int kMinGram = 3;
constexpr int kMaxGram = 5;
constexpr std::size_t kMaxMissWarnings = 5;

std::string lower_ascii(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

}  // namespace

TextEmbedding::TextEmbedding(Eigen::VectorXd values) : values_(std::move(values)) {
  if (values_.size() != kTextDim) {
    throw ShapeMismatch("text embedding must have " + std::to_string(kTextDim) + " values, got " +
                        std::to_string(values_.size()));
  }
  if (!values_.allFinite()) throw FormatError("text embedding has non-finite values");
}

std::string normalize_text(std::string_view s) {
  const std::string trimmed = trim(s);
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) return trimmed;
  const icu::UnicodeString in = icu::UnicodeString::fromUTF8(trimmed);
  icu::UnicodeString out = nfc->normalize(in, status);
  if (U_FAILURE(status)) return trimmed;
  std::string result;
  out.toUTF8String(result);
  return result;
}

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

TextEmbedding fallback_embed(std::string_view text) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(kTextDim);
  const std::string normalized = lower_ascii(normalize_text(text));
  std::istringstream words(normalized);
  std::string word;
  while (words >> word) {
    std::vector<std::string> cps = utf8_code_points(word);
    cps.insert(cps.begin(), "<");
    cps.emplace_back(">");
    const int n_cps = static_cast<int>(cps.size());
    for (int n = kMinGram; n <= kMaxGram; ++n) {
      for (int start = 0; start + n <= n_cps; ++start) {
        std::string gram;
        for (int j = start; j < start + n; ++j) gram += cps[static_cast<std::size_t>(j)];
        const std::uint64_t h = fnv1a64(gram);
        const auto bucket = static_cast<int>(h % kTextDim);
        const double sign = (h >> 63) != 0 ? -1.0 : 1.0;
        v[bucket] += sign;
      }
    }
  }
  const double norm = v.norm();
  if (norm > 0.0) v /= norm;
  return TextEmbedding(std::move(v));
}

TextEmbedding FallbackTextEmbedder::embed(std::string_view text) const { return fallback_embed(text); }

LookupTextProvider::LookupTextProvider(const std::filesystem::path& path) : origin_(path.string()) {
  std::ifstream in(path);
  if (!in) throw ProviderUnavailable("cannot open text lookup file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  content_hash_ = fnv1a64("");
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    content_hash_ = fnv1a64(line, content_hash_);
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ProviderUnavailable(path.string() + ":" + std::to_string(line_no) + ": missing tab");
    }
    std::string key;
    try {
      key = normalize_text(base64_decode(line.substr(0, tab)));
    } catch (const FormatError& e) {
      throw ProviderUnavailable(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    Eigen::VectorXd v(kTextDim);
    std::istringstream values(line.substr(tab + 1));
    std::string cell;
    int n = 0;
    while (std::getline(values, cell, ',')) {
      if (n >= kTextDim) break;
      try {
        v[n] = std::stod(cell);
      } catch (const std::exception&) {
        throw ProviderUnavailable(path.string() + ":" + std::to_string(line_no) +
                                  ": bad number '" + cell + "'");
      }
      ++n;
    }
    if (n != kTextDim || values.rdbuf()->in_avail() > 0) {
      throw ProviderUnavailable(path.string() + ":" + std::to_string(line_no) + ": expected " +
                                std::to_string(kTextDim) + " values");
    }
    if (!v.allFinite()) {
      throw ProviderUnavailable(path.string() + ":" + std::to_string(line_no) + ": non-finite value");
    }
    table_.insert_or_assign(std::move(key), TextEmbedding(std::move(v)));
  }
}

LookupTextProvider::LookupTextProvider(std::unordered_map<std::string, TextEmbedding> table,
                                       std::string origin)
    : origin_(std::move(origin)) {
  content_hash_ = fnv1a64(origin_);
  for (auto& [k, v] : table) table_.insert_or_assign(normalize_text(k), std::move(v));
}

TextEmbedding LookupTextProvider::embed(std::string_view text) const {
  const auto it = table_.find(normalize_text(text));
  if (it != table_.end()) return it->second;
  if (misses_ < kMaxMissWarnings) {
    log_warning("text not in lookup file, using fallback encoder: \"" + std::string(text) + "\"");
  }
  ++misses_;
  return fallback_.embed(text);
}

std::string LookupTextProvider::describe() const {
  return "lookup:" + to_hex(content_hash_) + "+" + fallback_.describe();
}

std::unique_ptr<TextProvider> make_text_provider(const std::string& spec) {
  if (spec.empty() || spec == "fallback") return std::make_unique<FallbackTextEmbedder>();
  constexpr std::string_view kLookup = "lookup:";
  if (spec.rfind(kLookup, 0) == 0) {
    return std::make_unique<LookupTextProvider>(spec.substr(kLookup.size()));
  }
  throw ProviderUnavailable("unknown text provider spec: " + spec);
}

std::string format_lookup_line(std::string_view text, const TextEmbedding& e) {
  std::ostringstream out;
  out.precision(17);
  out << base64_encode(text) << '\t';
  for (int i = 0; i < kTextDim; ++i) {
    if (i) out << ',';
    out << e[i];
  }
  return out.str();
}

int Vocabulary::find(std::string_view text) const {
  const auto it = index_of.find(normalize_text(text));
  return it == index_of.end() ? -1 : it->second;
}

std::vector<std::string> vocabulary_texts(const std::vector<const GuiScreen*>& screens) {
  std::vector<std::string> texts;
  std::set<std::string> seen;
  for (const GuiScreen* s : screens) {
    for (NodeId id : s->embeddable) {
      const auto& text = s->node(id).text;
      if (!text) continue;
      std::string key = normalize_text(*text);
      if (key.empty() || !seen.insert(key).second) continue;
      texts.push_back(std::move(key));
    }
  }
  return texts;
}

Vocabulary build_vocabulary(const std::vector<const GuiScreen*>& screens,
                            const TextProvider& provider) {
  Vocabulary vocab;
  vocab.texts = vocabulary_texts(screens);
  for (std::size_t i = 0; i < vocab.texts.size(); ++i) vocab.index_of.emplace(vocab.texts[i], static_cast<int>(i));
  vocab.matrix.resize(static_cast<Eigen::Index>(vocab.texts.size()), kTextDim);
  for (std::size_t i = 0; i < vocab.texts.size(); ++i) {
    vocab.matrix.row(static_cast<Eigen::Index>(i)) = provider.embed(vocab.texts[i]).values().transpose();
  }
  return vocab;
}

Vocabulary build_vocabulary(const std::vector<GuiScreen>& screens, const TextProvider& provider) {
  std::vector<const GuiScreen*> ptrs;
  ptrs.reserve(screens.size());
  for (const GuiScreen& s : screens) ptrs.push_back(&s);
  return build_vocabulary(ptrs, provider);
}

std::vector<std::string> collect_corpus_texts(const Corpus& corpus) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  auto add = [&](const std::string& t) {
    std::string key = normalize_text(t);
    if (!key.empty() && seen.insert(key).second) out.push_back(std::move(key));
  };
  for (const GuiScreen& s : corpus.screens) {
    for (const GuiComponent& c : s.nodes) {
      if (c.text) add(*c.text);
    }
  }
  std::set<std::string> app_ids;
  for (const GuiScreen& s : corpus.screens) app_ids.insert(s.app_id);
  for (const std::string& app : app_ids) add(corpus.description_of(app));
  return out;
}

}  // namespace guivec
