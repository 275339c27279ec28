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

#include "guivec/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <set>

#include "guivec/error.hpp"
#include "guivec/util.hpp"

namespace guivec {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<std::string_view, kNumCategories> kCategoryNames = {
    "Advertisement", "Bottom Navigation", "Card",         "Drawer",       "Image",
    "Input",         "Map View",          "Number Stepper", "Pager Indicator",
    "Slider",        "Tool Bar",          "Web View",     "List Item",    "Layouts",
    "Button Bar",    "CheckBox",          "Date Picker",  "Image Button", "List Parent",
    "Multi-Tab",     "On/Off Switch",     "RadioButton",  "TextButton",   "Video",
    "Drawer Item",   "Others",
};

enum class Requirement { kNone, kEditable, kText, kClickable };

struct ClassRule {
  std::string_view pattern;
  ClassCategory category;
  Requirement requirement = Requirement::kNone;
};

// Base class names per category. Order matters only between rules sharing a
// pattern (CheckedTextView resolves to CheckBox; an editable and clickable
// TextView resolves to Input). DrawyerLayout and CircileIndicator are kept as
// misspelled in the reference category list next to their framework spellings.
constexpr ClassRule kRules[] = {
    {"AdView", ClassCategory::kAdvertisement},
    {"HtmlBannerWebView", ClassCategory::kAdvertisement},
    {"AdContainer", ClassCategory::kAdvertisement},
    {"BottomTabGroupView", ClassCategory::kBottomNavigation},
    {"BottomBar", ClassCategory::kBottomNavigation},
    {"CardView", ClassCategory::kCard},
    {"DrawerLayout", ClassCategory::kDrawer},
    {"DrawyerLayout", ClassCategory::kDrawer},
    {"ImageView", ClassCategory::kImage},
    {"EditText", ClassCategory::kInput},
    {"SearchBoxView", ClassCategory::kInput},
    {"AppCompatAutoCompleteTextView", ClassCategory::kInput},
    {"TextView", ClassCategory::kInput, Requirement::kEditable},
    {"MapView", ClassCategory::kMapView},
    {"NumberPicker", ClassCategory::kNumberStepper},
    {"ViewPagerIndicatorDots", ClassCategory::kPagerIndicator},
    {"PageIndicator", ClassCategory::kPagerIndicator},
    {"CircleIndicator", ClassCategory::kPagerIndicator},
    {"CircileIndicator", ClassCategory::kPagerIndicator},
    {"PagerIndicator", ClassCategory::kPagerIndicator},
    {"SeekBar", ClassCategory::kSlider},
    {"ToolBar", ClassCategory::kToolBar},
    {"TitleBar", ClassCategory::kToolBar},
    {"ActionBar", ClassCategory::kToolBar},
    {"WebView", ClassCategory::kWebView},
    {"LinearLayout", ClassCategory::kLayouts},
    {"AppBarLayout", ClassCategory::kLayouts},
    {"FrameLayout", ClassCategory::kLayouts},
    {"RelativeLayout", ClassCategory::kLayouts},
    {"TableLayout", ClassCategory::kLayouts},
    {"ButtonBar", ClassCategory::kButtonBar},
    {"CheckBox", ClassCategory::kCheckBox},
    {"CheckedTextView", ClassCategory::kCheckBox},
    {"DatePicker", ClassCategory::kDatePicker},
    {"ImageButton", ClassCategory::kImageButton},
    {"GlyphView", ClassCategory::kImageButton},
    {"AppCompatButton", ClassCategory::kImageButton},
    {"AppCompatImageButton", ClassCategory::kImageButton},
    {"ActionMenuItemView", ClassCategory::kImageButton},
    {"ActionMenuItemPresenter", ClassCategory::kImageButton},
    {"ListView", ClassCategory::kListParent},
    {"RecyclerView", ClassCategory::kListParent},
    {"ListPopupWindow", ClassCategory::kListParent},
    {"TabItem", ClassCategory::kListParent},
    {"GridView", ClassCategory::kListParent},
    {"SlidingTab", ClassCategory::kMultiTab},
    {"Switch", ClassCategory::kOnOffSwitch},
    {"RadioButton", ClassCategory::kRadioButton},
    {"CheckedTextView", ClassCategory::kRadioButton},
    {"Button", ClassCategory::kTextButton, Requirement::kText},
    {"TextView", ClassCategory::kTextButton, Requirement::kClickable},
    {"VideoView", ClassCategory::kVideo},
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string simple_name(std::string_view qualified) {
  const auto pos = qualified.find_last_of(".$");
  return std::string(pos == std::string_view::npos ? qualified : qualified.substr(pos + 1));
}

enum class MatchPass { kExact, kSuffix, kContains };

bool matches(const std::string& name, const std::string& pattern, MatchPass pass) {
  switch (pass) {
    case MatchPass::kExact:
      return name == pattern;
    case MatchPass::kSuffix:
      return name.size() > pattern.size() &&
             name.compare(name.size() - pattern.size(), pattern.size(), pattern) == 0;
    case MatchPass::kContains:
      return name.find(pattern) != std::string::npos;
  }
  return false;
}

bool satisfied(Requirement r, bool editable, bool clickable, bool has_text) {
  switch (r) {
    case Requirement::kNone:
      return true;
    case Requirement::kEditable:
      return editable;
    case Requirement::kText:
      return has_text;
    case Requirement::kClickable:
      return clickable;
  }
  return false;
}

// Resolves one class name. Returns nullopt when no pattern matched at all, and
// kOthers when a pattern matched but its heuristic rejected the node.
std::optional<ClassCategory> resolve_name(const std::string& name, bool editable,
                                          bool clickable, bool has_text) {
  for (MatchPass pass : {MatchPass::kExact, MatchPass::kSuffix, MatchPass::kContains}) {
    std::vector<const ClassRule*> hits;
    for (const ClassRule& rule : kRules) {
      if (matches(name, lower(rule.pattern), pass)) hits.push_back(&rule);
    }
    if (hits.empty()) continue;
    // Longer patterns are more specific; stable keeps table order among equals.
    std::stable_sort(hits.begin(), hits.end(), [](const ClassRule* a, const ClassRule* b) {
      return a->pattern.size() > b->pattern.size();
    });
    for (const ClassRule* rule : hits) {
      if (satisfied(rule->requirement, editable, clickable, has_text)) return rule->category;
    }
    return ClassCategory::kOthers;
  }
  return std::nullopt;
}

bool is_numeric_screen_file(const fs::path& p) {
  const std::string name = p.filename().string();
  return p.extension() == ".json" && !name.empty() &&
         std::isdigit(static_cast<unsigned char>(name[0]));
}

std::optional<std::string> string_field(const json& node, const char* key) {
  const auto it = node.find(key);
  if (it == node.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

std::optional<std::string> content_description(const json& node) {
  const auto it = node.find("content-desc");
  if (it == node.end()) return std::nullopt;
  if (it->is_string()) {
    std::string t = trim(it->get<std::string>());
    if (!t.empty()) return t;
    return std::nullopt;
  }
  if (it->is_array()) {
    for (const json& v : *it) {
      if (v.is_string()) {
        std::string t = trim(v.get<std::string>());
        if (!t.empty()) return t;
      }
    }
  }
  return std::nullopt;
}

bool bool_field(const json& node, const char* key) {
  const auto it = node.find(key);
  return it != node.end() && it->is_boolean() && it->get<bool>();
}

std::int32_t clamp_coord(double v, std::int32_t lo, std::int32_t hi) {
  if (!std::isfinite(v)) return lo;
  return static_cast<std::int32_t>(std::clamp(v, static_cast<double>(lo), static_cast<double>(hi)));
}

BoundingBox read_bounds(const json& node, const std::string& path) {
  const auto it = node.find("bounds");
  if (it == node.end() || it->is_null()) return {};
  if (!it->is_array() || it->size() != 4) {
    throw MalformedDocument("bounds must be [left, top, right, bottom] at " + path);
  }
  std::array<double, 4> v{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(*it)[i].is_number()) throw MalformedDocument("non-numeric bounds at " + path);
    v[i] = (*it)[i].get<double>();
  }
  constexpr auto kMax = std::numeric_limits<std::int32_t>::max();
  BoundingBox b;
  b.left = clamp_coord(v[0], 0, kMax);
  b.top = clamp_coord(v[1], 0, kMax);
  b.right = clamp_coord(v[2], 0, kMax);
  b.bottom = clamp_coord(v[3], 0, kMax);
  return b;
}

BoundingBox clamp_to(const BoundingBox& b, const BoundingBox& screen) {
  BoundingBox out;
  out.left = std::clamp(b.left, screen.left, screen.right);
  out.right = std::clamp(b.right, screen.left, screen.right);
  out.top = std::clamp(b.top, screen.top, screen.bottom);
  out.bottom = std::clamp(b.bottom, screen.top, screen.bottom);
  if (out.right < out.left) out.right = out.left;
  if (out.bottom < out.top) out.bottom = out.top;
  return out;
}

bool has_class(const json& node) {
  return node.is_object() && (string_field(node, "class") || string_field(node, "className"));
}

std::string class_of(const json& node) {
  if (auto c = string_field(node, "class")) return *c;
  return string_field(node, "className").value_or("");
}

}  // namespace

std::string_view category_name(ClassCategory c) { return kCategoryNames.at(category_index(c)); }

std::optional<ClassCategory> category_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumCategories; ++i) {
    if (kCategoryNames[i] == name) return static_cast<ClassCategory>(i);
  }
  return std::nullopt;
}

const std::array<ClassCategory, kNumCategories>& all_categories() {
  static const auto kAll = [] {
    std::array<ClassCategory, kNumCategories> a{};
    for (std::size_t i = 0; i < kNumCategories; ++i) a[i] = static_cast<ClassCategory>(i);
    return a;
  }();
  return kAll;
}

std::string_view metric_name(DistanceMetric m) {
  return m == DistanceMetric::kEuclidean ? "euclidean" : "hierarchical";
}

DistanceMetric metric_from_name(std::string_view name) {
  const std::string n = lower(name);
  if (n == "euclidean") return DistanceMetric::kEuclidean;
  if (n == "hierarchical") return DistanceMetric::kHierarchical;
  throw Error("unknown distance metric: " + std::string(name));
}

ClassCategory classify_component(std::string_view class_name, bool editable, bool clickable,
                                 bool has_text,
                                 const std::vector<ClassCategory>& ancestor_categories,
                                 const std::vector<std::string>& superclasses) {
  std::optional<ClassCategory> resolved =
      resolve_name(lower(simple_name(class_name)), editable, clickable, has_text);
  for (std::size_t i = 0; !resolved && i < superclasses.size(); ++i) {
    resolved = resolve_name(lower(simple_name(superclasses[i])), editable, clickable, has_text);
  }
  const ClassCategory category = resolved.value_or(ClassCategory::kOthers);
  if (category != ClassCategory::kOthers) return category;

  // Nearest qualifying ancestor decides between the two container rules.
  for (auto it = ancestor_categories.rbegin(); it != ancestor_categories.rend(); ++it) {
    if (*it == ClassCategory::kListParent) return ClassCategory::kListItem;
    if (*it == ClassCategory::kDrawer) return ClassCategory::kDrawerItem;
  }
  return ClassCategory::kOthers;
}

const GuiComponent& GuiScreen::node(NodeId id) const {
  if (!contains(id)) {
    throw IndexOutOfRange("node " + std::to_string(id) + " not in screen " + screen_id);
  }
  return nodes[static_cast<std::size_t>(id)];
}

bool GuiScreen::same_content(const GuiScreen& other) const {
  return app_id == other.app_id && nodes == other.nodes;
}

GuiScreen parse_screen(const json& document, const ParseOptions& options) {
  const std::string where = options.source_path.empty() ? "<document>" : options.source_path;
  const json* root = nullptr;
  std::string root_path;
  if (document.is_object()) {
    if (auto a = document.find("activity"); a != document.end() && a->is_object()) {
      if (auto r = a->find("root"); r != a->end() && r->is_object()) {
        root = &*r;
        root_path = "activity.root";
      }
    }
    if (!root) {
      if (auto r = document.find("root"); r != document.end() && r->is_object()) {
        root = &*r;
        root_path = "root";
      }
    }
    if (!root && has_class(document)) {
      root = &document;
      root_path = "$";
    }
  }
  if (!root) throw MalformedDocument(where + ": no root view node");
  if (!has_class(*root)) throw MalformedDocument(where + ": root view has no class name");

  GuiScreen screen;
  screen.screen_id = options.screen_id;
  screen.app_id = options.app_id;
  if (auto activity = string_field(document, "activity_name")) {
    const auto slash = activity->find('/');
    std::string pkg = activity->substr(0, slash);
    if (!pkg.empty()) screen.app_id = pkg;
  } else if (auto pkg = string_field(*root, "package"); pkg && !pkg->empty()) {
    screen.app_id = *pkg;
  }

  struct Pending {
    const json* node;
    std::optional<NodeId> parent;
    std::string path;
    std::size_t depth;
  };
  constexpr std::size_t kMaxDepth = 4096;
  std::vector<Pending> stack{{root, std::nullopt, root_path, 0}};
  std::vector<std::vector<ClassCategory>> ancestor_cats;  // per retained node, root first
  BoundingBox screen_box;

  while (!stack.empty()) {
    Pending cur = std::move(stack.back());
    stack.pop_back();
    if (cur.depth > kMaxDepth) {
      throw MalformedDocument(where + ": hierarchy too deep (cyclic?) at " + cur.path);
    }
    const json& n = *cur.node;
    std::optional<NodeId> retained_parent = cur.parent;
    if (has_class(n)) {
      GuiComponent c;
      c.node_id = static_cast<NodeId>(screen.nodes.size());
      c.class_name = class_of(n);
      if (auto anc = n.find("ancestors"); anc != n.end() && anc->is_array()) {
        for (const json& s : *anc) {
          if (s.is_string()) c.superclasses.push_back(s.get<std::string>());
        }
      }
      if (auto t = string_field(n, "text")) {
        std::string trimmed = trim(*t);
        if (!trimmed.empty()) c.text = std::move(trimmed);
      }
      if (!c.text) c.text = content_description(n);
      c.clickable = bool_field(n, "clickable");
      c.editable = bool_field(n, "editable");
      BoundingBox raw = read_bounds(n, cur.path);
      if (!cur.parent) {
        if (raw.right < raw.left) raw.right = raw.left;
        if (raw.bottom < raw.top) raw.bottom = raw.top;
        screen_box = raw;
        c.bounds = raw;
      } else {
        c.bounds = clamp_to(raw, screen_box);
      }
      std::vector<ClassCategory> ancestors;
      if (cur.parent) {
        ancestors = ancestor_cats[static_cast<std::size_t>(*cur.parent)];
        ancestors.push_back(screen.nodes[static_cast<std::size_t>(*cur.parent)].category);
        c.parent = cur.parent;
        screen.nodes[static_cast<std::size_t>(*cur.parent)].children.push_back(c.node_id);
      }
      c.category = classify_component(c.class_name, c.editable, c.clickable, c.text.has_value(),
                                      ancestors, c.superclasses);
      retained_parent = c.node_id;
      ancestor_cats.push_back(std::move(ancestors));
      screen.nodes.push_back(std::move(c));
    }
    if (auto ch = n.find("children"); ch != n.end()) {
      if (!ch->is_array()) throw MalformedDocument(where + ": children is not an array at " + cur.path);
      for (std::size_t i = ch->size(); i-- > 0;) {
        const json& child = (*ch)[i];
        if (!child.is_object()) continue;
        stack.push_back({&child, retained_parent, cur.path + ".children[" + std::to_string(i) + "]",
                         cur.depth + 1});
      }
    }
  }

  for (const GuiComponent& c : screen.nodes) {
    const bool content = c.category != ClassCategory::kLayouts && c.category != ClassCategory::kOthers;
    if (c.text || content) screen.embeddable.push_back(c.node_id);
  }
  return screen;
}

GuiScreen parse_screen_file(const fs::path& path, const ParseOptions& options) {
  ParseOptions opts = options;
  if (opts.source_path.empty()) opts.source_path = path.string();
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw MalformedDocument(path.string() + ": invalid JSON: " + e.what());
  } catch (const FormatError& e) {
    throw MalformedDocument(e.what());
  }
  return parse_screen(doc, opts);
}

json screen_to_json(const GuiScreen& screen) {
  // Children are emitted before their parents are closed, so build bottom-up.
  std::vector<json> built(screen.nodes.size());
  for (std::size_t i = screen.nodes.size(); i-- > 0;) {
    const GuiComponent& c = screen.nodes[i];
    json n;
    n["class"] = c.class_name;
    if (!c.superclasses.empty()) n["ancestors"] = c.superclasses;
    n["bounds"] = {c.bounds.left, c.bounds.top, c.bounds.right, c.bounds.bottom};
    n["clickable"] = c.clickable;
    n["editable"] = c.editable;
    if (c.text) n["text"] = *c.text;
    json children = json::array();
    for (NodeId ch : c.children) children.push_back(std::move(built[static_cast<std::size_t>(ch)]));
    n["children"] = std::move(children);
    built[i] = std::move(n);
  }
  json doc;
  if (!screen.app_id.empty()) doc["activity_name"] = screen.app_id + "/";
  doc["activity"]["root"] = built.empty() ? json::object() : std::move(built[0]);
  return doc;
}

double euclidean_distance(const BoundingBox& a, const BoundingBox& b) {
  const double dx = std::max({0.0, static_cast<double>(a.left) - b.right,
                              static_cast<double>(b.left) - a.right});
  const double dy = std::max({0.0, static_cast<double>(a.top) - b.bottom,
                              static_cast<double>(b.top) - a.bottom});
  // Integer gaps square exactly, so equal sums give equal distances.
  return std::sqrt(dx * dx + dy * dy);
}

double euclidean_distance(const GuiComponent& a, const GuiComponent& b) {
  return euclidean_distance(a.bounds, b.bounds);
}

int hierarchical_distance(NodeId a, NodeId b, const GuiScreen& screen) {
  if (!screen.contains(a) || !screen.contains(b)) {
    throw NodesNotInSameTree("node not in screen " + screen.screen_id);
  }
  std::vector<int> up(screen.nodes.size(), -1);
  int d = 0;
  for (std::optional<NodeId> n = a; n; n = screen.nodes[static_cast<std::size_t>(*n)].parent) {
    up[static_cast<std::size_t>(*n)] = d++;
  }
  d = 0;
  for (std::optional<NodeId> n = b; n; n = screen.nodes[static_cast<std::size_t>(*n)].parent) {
    if (up[static_cast<std::size_t>(*n)] >= 0) return d + up[static_cast<std::size_t>(*n)];
    ++d;
  }
  throw NodesNotInSameTree("nodes " + std::to_string(a) + " and " + std::to_string(b) +
                           " share no root");
}

namespace {

// Tree distance from `source` to every node, by breadth-first search.
std::vector<int> tree_distances(NodeId source, const GuiScreen& screen) {
  std::vector<int> dist(screen.nodes.size(), -1);
  std::deque<NodeId> queue{source};
  dist[static_cast<std::size_t>(source)] = 0;
  while (!queue.empty()) {
    const NodeId cur = queue.front();
    queue.pop_front();
    const GuiComponent& c = screen.nodes[static_cast<std::size_t>(cur)];
    const int next = dist[static_cast<std::size_t>(cur)] + 1;
    auto visit = [&](NodeId n) {
      if (dist[static_cast<std::size_t>(n)] < 0) {
        dist[static_cast<std::size_t>(n)] = next;
        queue.push_back(n);
      }
    };
    if (c.parent) visit(*c.parent);
    for (NodeId ch : c.children) visit(ch);
  }
  return dist;
}

}  // namespace

std::vector<NodeId> context_of(NodeId target, const GuiScreen& screen, std::size_t k,
                               DistanceMetric metric) {
  if (k == 0) throw Error("context size must be at least 1");
  if (!std::binary_search(screen.embeddable.begin(), screen.embeddable.end(), target)) {
    throw TargetNotEmbeddable("node " + std::to_string(target) + " is not embeddable in " +
                              screen.screen_id);
  }
  std::vector<std::pair<double, NodeId>> ranked;
  ranked.reserve(screen.embeddable.size());
  if (metric == DistanceMetric::kHierarchical) {
    const std::vector<int> dist = tree_distances(target, screen);
    for (NodeId n : screen.embeddable) {
      if (n != target) ranked.emplace_back(dist[static_cast<std::size_t>(n)], n);
    }
  } else {
    const GuiComponent& t = screen.node(target);
    for (NodeId n : screen.embeddable) {
      if (n != target) ranked.emplace_back(euclidean_distance(t, screen.node(n)), n);
    }
  }
  const std::size_t take = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take), ranked.end());
  std::vector<NodeId> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(ranked[i].second);
  return out;
}

std::pair<std::uint64_t, std::string> numeric_file_key(const std::string& filename) {
  std::uint64_t value = 0;
  for (char c : filename) {
    if (!std::isdigit(static_cast<unsigned char>(c))) break;
    const auto digit = static_cast<std::uint64_t>(c - '0');
    if (value > (std::numeric_limits<std::uint64_t>::max() - digit) / 10) {
      value = std::numeric_limits<std::uint64_t>::max();
      break;
    }
    value = value * 10 + digit;
  }
  return {value, filename};
}

ParsedTrace parse_trace(const fs::path& dir, const std::string& trace_id) {
  fs::path screens_dir = dir;
  if (fs::is_directory(dir / "view_hierarchies")) screens_dir = dir / "view_hierarchies";
  if (!fs::is_directory(screens_dir)) throw EmptyTrace(dir.string() + " is not a directory");

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(screens_dir)) {
    if (entry.is_regular_file() && is_numeric_screen_file(entry.path())) files.push_back(entry.path());
  }
  if (files.empty()) throw EmptyTrace(dir.string() + " holds no screen files");
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return numeric_file_key(a.filename().string()) < numeric_file_key(b.filename().string());
  });

  ParsedTrace out;
  out.trace.trace_id = trace_id.empty() ? dir.filename().string() : trace_id;
  for (const fs::path& f : files) {
    ParseOptions opts;
    opts.screen_id = out.trace.trace_id + "/" + f.stem().string();
    opts.source_path = f.string();
    GuiScreen s = parse_screen_file(f, opts);
    if (out.screens.empty()) {
      if (s.app_id.empty()) s.app_id = out.trace.trace_id.substr(0, out.trace.trace_id.find('/'));
      out.trace.app_id = s.app_id;
    } else if (s.app_id != out.trace.app_id) {
      log_warning(opts.screen_id + " reports app " + s.app_id + "; keeping trace app " +
                  out.trace.app_id);
      s.app_id = out.trace.app_id;
    }
    if (!out.screens.empty() && out.screens.back().same_content(s)) continue;
    out.trace.screens.push_back(s.screen_id);
    out.screens.push_back(std::move(s));
  }
  return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t i = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      field_started = false;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      field_started = false;
      if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
      row.clear();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw FormatError("unterminated quoted CSV field");
  if (field_started || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::map<std::string, AppMetadata> load_app_metadata(const fs::path& csv_path) {
  const auto rows = parse_csv(read_file(csv_path));
  std::map<std::string, AppMetadata> out;
  if (rows.empty()) return out;
  std::size_t id_col = 0;
  std::size_t desc_col = 1;
  std::size_t first = 0;
  const auto& header = rows[0];
  const auto find_col = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (lower(trim(header[i])) == name) return i;
    }
    return std::nullopt;
  };
  if (auto id = find_col("app_id")) {
    id_col = *id;
    desc_col = find_col("description").value_or(id_col == 0 ? 1 : 0);
    first = 1;
  }
  for (std::size_t r = first; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() <= id_col) continue;
    AppMetadata m;
    m.app_id = trim(row[id_col]);
    if (m.app_id.empty()) continue;
    m.description = desc_col < row.size() ? trim(row[desc_col]) : std::string{};
    if (m.description.empty()) m.description = m.app_id;
    out[m.app_id] = std::move(m);
  }
  return out;
}

std::map<std::string, std::size_t> Corpus::index_by_id() const {
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < screens.size(); ++i) idx.emplace(screens[i].screen_id, i);
  return idx;
}

const GuiScreen& Corpus::screen(const std::string& id) const {
  for (const GuiScreen& s : screens) {
    if (s.screen_id == id) return s;
  }
  throw UnknownScreenId(id);
}

std::string Corpus::description_of(const std::string& app_id) const {
  const auto it = apps.find(app_id);
  if (it == apps.end() || it->second.description.empty()) return app_id;
  return it->second.description;
}

Corpus load_corpus(const fs::path& root, const std::optional<fs::path>& metadata_csv) {
  if (!fs::is_directory(root)) throw EmptyCorpus(root.string() + " is not a directory");
  std::vector<fs::path> dirs{root};
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::vector<std::pair<std::string, fs::path>> trace_dirs;
  for (const fs::path& d : dirs) {
    if (d.filename() == "view_hierarchies") continue;
    bool has_screens = fs::is_directory(d / "view_hierarchies");
    if (!has_screens) {
      for (const auto& entry : fs::directory_iterator(d)) {
        if (entry.is_regular_file() && is_numeric_screen_file(entry.path())) {
          has_screens = true;
          break;
        }
      }
    }
    if (!has_screens) continue;
    std::string id = fs::relative(d, root).generic_string();
    if (id == ".") id = root.filename().string();
    trace_dirs.emplace_back(std::move(id), d);
  }
  std::sort(trace_dirs.begin(), trace_dirs.end());

  Corpus corpus;
  std::set<std::string> seen;
  for (const auto& [id, dir] : trace_dirs) {
    ParsedTrace parsed = parse_trace(dir, id);
    for (GuiScreen& s : parsed.screens) {
      if (seen.insert(s.screen_id).second) corpus.screens.push_back(std::move(s));
    }
    corpus.traces.push_back(std::move(parsed.trace));
  }
  if (corpus.screens.empty()) throw EmptyCorpus(root.string() + " holds no traces");

  fs::path csv = metadata_csv.value_or(root / "app_details.csv");
  if (fs::exists(csv)) {
    corpus.apps = load_app_metadata(csv);
  } else if (metadata_csv) {
    throw FormatError("metadata file not found: " + csv.string());
  }
  return corpus;
}

}  // namespace guivec
