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
#include <string>
#include <vector>

#include "guivec/corpus.hpp"

namespace guivec {

// Planted corpus: apps in domains (app a belongs to domain a % domains), one
// screen of every screen type per app, one trace per app walking the screen
// type graph. Texts correlate with screen type, domain and position.
struct SyntheticConfig {
  int apps = 20;
  std::uint64_t seed = 7;
};

inline constexpr int kSyntheticDomains = 10;
inline constexpr int kSyntheticScreenTypes = 10;

struct SyntheticTask {
  std::string name;
  int domain = 0;
  std::vector<int> screen_types;
  std::vector<std::string> variant_a;  // screen ids in app `domain`
  std::vector<std::string> variant_b;  // screen ids in app `domain + 10`
};

struct SyntheticCorpus {
  Corpus corpus;
  std::vector<nlohmann::json> documents;  // aligned with corpus.screens
  std::vector<int> screen_type;           // aligned with corpus.screens
  std::vector<int> screen_app;            // app ordinal, aligned with corpus.screens
  std::vector<SyntheticTask> tasks;       // empty when fewer than 20 apps
};

SyntheticCorpus make_synthetic_corpus(const SyntheticConfig& config = {});

// RICO-style tree: <root>/<app_id>/<position>.json plus <root>/app_details.csv.
// load_corpus on the result reproduces `synthetic.corpus`.
void write_synthetic_corpus(const SyntheticCorpus& synthetic, const std::filesystem::path& root);

std::string screen_type_name(int type);

// Layout-only fixtures: `per_template` jittered screens of each of the first
// `templates` (<= 4) structurally distinct layouts, template-major order.
std::vector<GuiScreen> make_template_screens(int templates, int per_template, std::uint64_t seed);

}  // namespace guivec
