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

#include "guivec/pipeline.hpp"

#include <map>

#include "guivec/error.hpp"
#include "guivec/util.hpp"

namespace guivec {

std::string checkpoint_fingerprint(const Checkpoint& ckpt) { return to_hex(fnv1a64(ckpt.to_bytes())); }

std::string ModelBundle::fingerprint(const TextProvider& provider) const {
  std::string key = checkpoint_fingerprint(autoencoder.to_checkpoint(grid));
  key += ":" + checkpoint_fingerprint(components.to_checkpoint());
  key += ":" + checkpoint_fingerprint(screen.to_checkpoint());
  key += ":" + provider.describe();
  return to_hex(fnv1a64(key));
}

ModelBundle ModelBundle::load(const std::filesystem::path& dir) {
  const Checkpoint ae = Checkpoint::load(dir / kAutoencoderFile);
  const Checkpoint comp = Checkpoint::load(dir / kComponentFile);
  const Checkpoint scr = Checkpoint::load(dir / kScreenFile);
  auto check = [&](const char* field, const Checkpoint& upstream) {
    if (!scr.header.contains(field)) return;
    const std::string expected = scr.header.at(field).get<std::string>();
    const std::string actual = checkpoint_fingerprint(upstream);
    if (expected != actual) {
      throw FingerprintMismatch(std::string("screen model was trained on ") + field + " " + expected + ", found " +
                                actual);
    }
  };
  check("autoencoder_fingerprint", ae);
  check("component_fingerprint", comp);
  LayoutGrid grid;
  ModelBundle bundle{grid, LayoutAutoencoder::from_checkpoint(ae, &grid), ComponentModel::from_checkpoint(comp),
                     ScreenModel::from_checkpoint(scr)};
  bundle.grid = grid;
  return bundle;
}

EmbeddingStore build_store(const Corpus& corpus, const TextProvider& provider, const ModelBundle& models) {
  const std::vector<ScreenInput> inputs =
      prepare_screens(corpus.screens, provider, models.components, models.autoencoder);
  const nn::Matrix<double> contents = screen_contents(models.screen, inputs);
  std::map<std::string, std::vector<std::string>> traces_of;
  for (const InteractionTrace& t : corpus.traces) {
    for (const std::string& id : t.screens) {
      auto& list = traces_of[id];
      if (list.empty() || list.back() != t.trace_id) list.push_back(t.trace_id);
    }
  }
  const int content_dim = models.screen.dims().content_dim;
  EmbeddingStore store(content_dim + kTextDim, content_dim, models.fingerprint(provider));
  std::map<std::string, Eigen::VectorXd> descriptions;
  for (std::size_t i = 0; i < corpus.screens.size(); ++i) {
    const GuiScreen& s = corpus.screens[i];
    auto it = descriptions.find(s.app_id);
    if (it == descriptions.end()) {
      it = descriptions.emplace(s.app_id, provider.embed(corpus.description_of(s.app_id)).values()).first;
    }
    Eigen::VectorXd full(content_dim + kTextDim);
    full << contents.row(static_cast<Eigen::Index>(i)).transpose(), it->second;
    StoreEntry entry{s.screen_id, s.app_id, traces_of[s.screen_id],
                     pack_bitmap(render_layout(s, models.grid))};
    store.add(std::move(entry), full);
  }
  return store;
}

}  // namespace guivec
