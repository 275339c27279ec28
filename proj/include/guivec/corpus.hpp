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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace guivec {

using NodeId = std::int32_t;

struct BoundingBox {
  std::int32_t left = 0;
  std::int32_t top = 0;
  std::int32_t right = 0;
  std::int32_t bottom = 0;

  std::int32_t width() const { return right - left; }
  std::int32_t height() const { return bottom - top; }
  bool valid() const { return left >= 0 && top >= 0 && left <= right && top <= bottom; }
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// GUI component categories. The ordinal is the row index in the class
// embedding table, so the order is part of the checkpoint format.
enum class ClassCategory : std::uint8_t {
  kAdvertisement,
  kBottomNavigation,
  kCard,
  kDrawer,
  kImage,
  kInput,
  kMapView,
  kNumberStepper,
  kPagerIndicator,
  kSlider,
  kToolBar,
  kWebView,
  kListItem,
  kLayouts,
  kButtonBar,
  kCheckBox,
  kDatePicker,
  kImageButton,
  kListParent,
  kMultiTab,
  kOnOffSwitch,
  kRadioButton,
  kTextButton,
  kVideo,
  kDrawerItem,
  kOthers,
};

inline constexpr std::size_t kNumCategories = 26;

std::string_view category_name(ClassCategory c);
std::optional<ClassCategory> category_from_name(std::string_view name);
inline std::size_t category_index(ClassCategory c) { return static_cast<std::size_t>(c); }
const std::array<ClassCategory, kNumCategories>& all_categories();

struct GuiComponent {
  NodeId node_id = 0;
  std::string class_name;
  // Superclass chain as reported by the dump (RICO `ancestors`), nearest first.
  std::vector<std::string> superclasses;
  ClassCategory category = ClassCategory::kOthers;
  std::optional<std::string> text;
  BoundingBox bounds;
  bool clickable = false;
  bool editable = false;
  std::optional<NodeId> parent;
  std::vector<NodeId> children;

  friend bool operator==(const GuiComponent&, const GuiComponent&) = default;
};

// Parsed view hierarchy. Nodes are stored in pre-order, so node_id equals the
// pre-order rank and nodes[0] is the root.
struct GuiScreen {
  std::string screen_id;
  std::string app_id;
  NodeId root = 0;
  std::vector<GuiComponent> nodes;
  std::vector<NodeId> embeddable;

  const GuiComponent& node(NodeId id) const;
  bool contains(NodeId id) const { return id >= 0 && static_cast<std::size_t>(id) < nodes.size(); }
  const BoundingBox& screen_bounds() const { return nodes.at(0).bounds; }

  // Structural equality on the retained fields; ignores screen_id.
  bool same_content(const GuiScreen& other) const;
};

struct InteractionTrace {
  std::string trace_id;
  std::string app_id;
  std::vector<std::string> screens;
};

struct AppMetadata {
  std::string app_id;
  std::string description;
};

enum class DistanceMetric { kEuclidean, kHierarchical };

std::string_view metric_name(DistanceMetric m);
DistanceMetric metric_from_name(std::string_view name);

// Table-driven class categorisation. `superclasses` lets a custom subclass
// inherit its category from the nearest framework base class; ancestor
// categories are listed root first.
ClassCategory classify_component(std::string_view class_name, bool editable, bool clickable,
                                 bool has_text,
                                 const std::vector<ClassCategory>& ancestor_categories,
                                 const std::vector<std::string>& superclasses = {});

struct ParseOptions {
  std::string screen_id;
  std::string app_id;       // used when the document does not name its package
  std::string source_path;  // only for error messages
};

GuiScreen parse_screen(const nlohmann::json& document, const ParseOptions& options = {});
GuiScreen parse_screen_file(const std::filesystem::path& path, const ParseOptions& options = {});

// Inverse of parse_screen on the retained fields, in the RICO layout.
nlohmann::json screen_to_json(const GuiScreen& screen);

double euclidean_distance(const GuiComponent& a, const GuiComponent& b);
double euclidean_distance(const BoundingBox& a, const BoundingBox& b);
int hierarchical_distance(NodeId a, NodeId b, const GuiScreen& screen);

std::vector<NodeId> context_of(NodeId target, const GuiScreen& screen, std::size_t k,
                               DistanceMetric metric);

struct ParsedTrace {
  InteractionTrace trace;
  std::vector<GuiScreen> screens;  // aligned with trace.screens
};

// Reads a trace directory: numerically named screen files, optionally under a
// `view_hierarchies` subdirectory. Screen ids are "<trace_id>/<file stem>".
ParsedTrace parse_trace(const std::filesystem::path& dir, const std::string& trace_id = {});

// Sort key used for numerically named files: leading digits, then the name.
std::pair<std::uint64_t, std::string> numeric_file_key(const std::string& filename);

std::map<std::string, AppMetadata> load_app_metadata(const std::filesystem::path& csv_path);
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

struct Corpus {
  std::vector<GuiScreen> screens;
  std::vector<InteractionTrace> traces;
  std::map<std::string, AppMetadata> apps;

  std::map<std::string, std::size_t> index_by_id() const;
  const GuiScreen& screen(const std::string& id) const;
  // Description with the app id as fallback when no metadata exists.
  std::string description_of(const std::string& app_id) const;
};

// Walks `root` for trace directories (any directory holding numerically named
// .json files). Trace ids are paths relative to `root`.
Corpus load_corpus(const std::filesystem::path& root,
                   const std::optional<std::filesystem::path>& metadata_csv = std::nullopt);

}  // namespace guivec
