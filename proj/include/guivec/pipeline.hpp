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
#include <string>

#include "guivec/component_model.hpp"
#include "guivec/corpus.hpp"
#include "guivec/layout_model.hpp"
#include "guivec/screen_model.hpp"
#include "guivec/text_provider.hpp"
#include "guivec/vector_store.hpp"

namespace guivec {

// FNV-1a of the serialized checkpoint, hex.
std::string checkpoint_fingerprint(const Checkpoint& ckpt);

// The three trained stages plus the text provider they were trained with.
struct ModelBundle {
  LayoutGrid grid;
  LayoutAutoencoder autoencoder;
  ComponentModel components;
  ScreenModel screen;

  // Identifies the exact weights and text provider; stored in every store
  // built from the bundle.
  std::string fingerprint(const TextProvider& provider) const;

  // Reads autoencoder.gvm, component.gvm and screen.gvm from `dir`. Throws
  // FingerprintMismatch when the screen model was trained on other upstream
  // checkpoints than the ones found.
  static ModelBundle load(const std::filesystem::path& dir);
};

inline constexpr const char* kAutoencoderFile = "autoencoder.gvm";
inline constexpr const char* kComponentFile = "component.gvm";
inline constexpr const char* kScreenFile = "screen.gvm";
inline constexpr const char* kStoreFile = "store.gvs";

// One entry per corpus screen: the full vector, app, traces and thumbnail.
EmbeddingStore build_store(const Corpus& corpus, const TextProvider& provider, const ModelBundle& models);

}  // namespace guivec
