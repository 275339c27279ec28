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

#include "guivec/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <set>

#include "guivec/error.hpp"
#include "guivec/nn.hpp"
#include "guivec/util.hpp"

namespace guivec {

namespace {

using nlohmann::json;

constexpr int kDeviceWidth = 1440;
constexpr int kDeviceHeight = 2560;

struct Domain {
  const char* noun;
  std::array<const char*, 2> apps;
  std::array<const char*, 8> items;
  std::array<const char*, 2> descriptions;  // "%s" is the app name
};

const std::array<Domain, kSyntheticDomains>& domains() {
  static const std::array<Domain, kSyntheticDomains> d = {{
      {"hotels",
       {"Staybright", "Roomly"},
       {"Deluxe Room", "Suite", "Twin Room", "Family Room", "Ocean View", "Breakfast Included",
        "Free Cancellation", "City Center"},
       {"%s helps you find and book hotel rooms at the best prices.",
        "Book hotels, compare room prices and manage your stays with %s."}},
      {"restaurants",
       {"Forkful", "QuickBite"},
       {"Pizza", "Sushi", "Burgers", "Salad Bowl", "Pad Thai", "Tacos", "Noodles", "Dessert"},
       {"%s delivers food from your favorite restaurants to your door.",
        "Order food delivery from local restaurants with %s."}},
      {"music",
       {"Tunewave", "Beatbox"},
       {"Playlists", "Albums", "Artists", "Podcasts", "Top Charts", "New Releases", "Radio", "Liked Songs"},
       {"%s streams millions of songs, albums and playlists.",
        "Listen to music, playlists and podcasts anywhere with %s."}},
      {"workouts",
       {"FitPulse", "Stridely"},
       {"Running", "Cycling", "Yoga", "Strength", "Steps", "Calories", "Heart Rate", "Workout Plan"},
       {"%s tracks your workouts, steps and fitness goals.",
        "Plan workouts and track running and fitness progress with %s."}},
      {"accounts",
       {"Coinvault", "Ledgerly"},
       {"Checking", "Savings", "Transfer", "Pay Bills", "Credit Card", "Statements", "Deposit", "Budget"},
       {"%s is mobile banking for your accounts, transfers and bills.",
        "Manage bank accounts, pay bills and transfer money with %s."}},
      {"fashion",
       {"Styleshop", "Threadly"},
       {"Dresses", "Sneakers", "Jackets", "Jeans", "Accessories", "Sale", "New Arrivals", "Bags"},
       {"%s lets you shop the latest fashion and clothing deals.",
        "Shop clothing, shoes and fashion accessories with %s."}},
      {"news",
       {"Dailybrief", "Newsnest"},
       {"Headlines", "Politics", "Sports", "Technology", "Business", "Weather", "Opinion", "Science"},
       {"%s brings you breaking news and top headlines.",
        "Read the latest news headlines and stories with %s."}},
      {"homes",
       {"Homefinder", "Nestly"},
       {"Apartments", "Houses", "Rent", "Buy", "Bedrooms", "Price Range", "Open House", "Mortgage"},
       {"%s helps you find apartments and houses for rent or sale.",
        "Search homes for sale and apartments for rent with %s."}},
      {"rides",
       {"Ridego", "Cabwise"},
       {"Pickup", "Destination", "Economy", "Premium", "Schedule Ride", "Fare Estimate", "Driver",
        "Trip History"},
       {"%s gets you a ride to your destination in minutes.",
        "Request rides, compare fares and track your driver with %s."}},
      {"courses",
       {"Learnly", "Studybee"},
       {"Courses", "Lessons", "Quizzes", "Flashcards", "Progress", "Certificates", "Vocabulary", "Grammar"},
       {"%s offers online courses and lessons to learn new skills.",
        "Learn with courses, quizzes and flashcards on %s."}},
  }};
  return d;
}

constexpr std::array<const char*, kSyntheticScreenTypes> kTypeNames = {
    "login", "signup", "home", "search", "results", "detail", "cart", "payment", "settings", "profile"};

// Topic-coherent navigation between screen types.
const std::array<std::vector<int>, kSyntheticScreenTypes>& type_graph() {
  static const std::array<std::vector<int>, kSyntheticScreenTypes> g = {{
      {1, 2},
      {0, 2},
      {3, 4, 8, 9},
      {4, 2},
      {5, 3},
      {6, 4},
      {7, 5},
      {2, 9},
      {9, 2},
      {8, 2, 6},
  }};
  return g;
}

struct TaskSpec {
  const char* name;
  std::vector<int> types;
};

const std::array<TaskSpec, kSyntheticDomains>& task_specs() {
  static const std::array<TaskSpec, kSyntheticDomains> t = {{
      {"sign in and open settings", {0, 2, 8}},
      {"search and open a result", {3, 4, 5}},
      {"browse from home to results", {2, 3, 4}},
      {"buy an item", {4, 5, 6, 7}},
      {"change preferences", {9, 8}},
      {"create an account", {1, 2, 9}},
      {"open a featured item", {2, 4, 5}},
      {"pay and check profile", {6, 7, 9}},
      {"find and add to cart", {3, 4, 5, 6}},
      {"sign in and search", {0, 2, 3}},
  }};
  return t;
}

struct Node {
  std::string cls;
  std::optional<std::string> text;
  std::array<int, 4> box{};  // per-mille of the device
  bool clickable = false;
  bool editable = false;
  std::vector<Node> children;
};

Node node(std::string cls, std::array<int, 4> box, std::optional<std::string> text = std::nullopt,
          bool clickable = false, bool editable = false) {
  Node n;
  n.cls = std::move(cls);
  n.box = box;
  n.text = std::move(text);
  n.clickable = clickable;
  n.editable = editable;
  return n;
}

Node text_view(std::array<int, 4> box, std::string text, bool clickable = false) {
  return node("android.widget.TextView", box, std::move(text), clickable);
}
Node edit_text(std::array<int, 4> box, std::string hint) {
  return node("android.widget.EditText", box, std::move(hint), true, true);
}
Node button(std::array<int, 4> box, std::string text) {
  return node("android.widget.Button", box, std::move(text), true);
}
Node image(std::array<int, 4> box) { return node("android.widget.ImageView", box); }
Node image_button(std::array<int, 4> box) { return node("android.widget.ImageButton", box, std::nullopt, true); }
Node container(std::string cls, std::array<int, 4> box, std::vector<Node> children) {
  Node n = node(std::move(cls), box);
  n.children = std::move(children);
  return n;
}

Node bottom_bar() {
  return container("com.guivec.widget.BottomBar", {0, 930, 1000, 1000},
                   {text_view({0, 940, 333, 990}, "Home", true), text_view({333, 940, 666, 990}, "Explore", true),
                    text_view({666, 940, 1000, 990}, "Profile", true)});
}

Node list_row(int y0, int y1, const std::string& text) {
  return container("com.guivec.ui.ResultRow", {0, y0, 1000, y1},
                   {image({30, y0 + 10, 200, y1 - 10}), text_view({230, y0 + 20, 950, y1 - 20}, text)});
}

// Content nodes of one screen type. `item` picks domain items per app.
std::vector<Node> screen_content(int type, const Domain& d, int app, const std::string& app_name) {
  auto item = [&](int k) { return std::string(d.items[static_cast<std::size_t>((app + k) % 8)]); };
  const std::string noun = d.noun;
  std::vector<Node> c;
  switch (type) {
    case 0:
      c = {image({350, 110, 650, 270}),
           edit_text({100, 320, 900, 390}, "Email"),
           edit_text({100, 410, 900, 480}, "Password"),
           node("android.widget.CheckBox", {100, 500, 500, 550}, "Remember me", true),
           button({100, 580, 900, 660}, "Sign in"),
           text_view({300, 690, 700, 730}, "Forgot password?", true),
           text_view({300, 750, 700, 790}, "Create account", true)};
      break;
    case 1:
      c = {text_view({100, 110, 900, 170}, "Welcome to " + app_name),
           edit_text({100, 200, 900, 270}, "Full name"),
           edit_text({100, 290, 900, 360}, "Email address"),
           edit_text({100, 380, 900, 450}, "Choose password"),
           node("android.widget.CheckBox", {100, 470, 900, 520}, "I agree to the Terms of service", true),
           button({100, 550, 900, 630}, "Sign up"),
           text_view({250, 660, 750, 700}, "Already have an account?", true)};
      break;
    case 2: {
      c = {image({0, 80, 1000, 320}), text_view({50, 340, 600, 390}, "Featured " + noun)};
      std::vector<Node> tiles;
      for (int k = 0; k < 4; ++k) {
        const int x0 = (k % 2) * 500 + 20;
        const int y0 = 410 + (k / 2) * 250;
        tiles.push_back(container("androidx.cardview.widget.CardView", {x0, y0, x0 + 460, y0 + 230},
                                  {image({x0 + 10, y0 + 10, x0 + 450, y0 + 160}),
                                   text_view({x0 + 10, y0 + 170, x0 + 450, y0 + 220}, item(k))}));
      }
      c.push_back(container("android.widget.GridView", {0, 400, 1000, 910}, std::move(tiles)));
      c.push_back(bottom_bar());
      break;
    }
    case 3: {
      c = {edit_text({50, 100, 800, 170}, "Search " + noun), image_button({820, 100, 950, 170}),
           text_view({50, 200, 600, 240}, "Recent searches")};
      std::vector<Node> rows;
      for (int k = 0; k < 3; ++k) rows.push_back(list_row(260 + k * 110, 360 + k * 110, item(4 + k)));
      c.push_back(container("androidx.recyclerview.widget.RecyclerView", {0, 250, 1000, 600}, std::move(rows)));
      c.push_back(button({50, 650, 480, 720}, "Filters"));
      c.push_back(button({520, 650, 950, 720}, "Clear"));
      break;
    }
    case 4: {
      c = {text_view({50, 100, 400, 150}, "Sort by", true), image_button({850, 95, 950, 155})};
      std::vector<Node> rows;
      for (int k = 0; k < 5; ++k) rows.push_back(list_row(180 + k * 150, 320 + k * 150, item(k)));
      c.push_back(container("androidx.recyclerview.widget.RecyclerView", {0, 170, 1000, 930}, std::move(rows)));
      break;
    }
    case 5:
      c = {image({0, 80, 1000, 400}),
           text_view({50, 420, 950, 480}, item(0)),
           text_view({50, 500, 950, 540}, "Description"),
           text_view({50, 560, 500, 600}, "Reviews", true),
           image_button({850, 420, 950, 480}),
           button({50, 700, 480, 780}, "Add to favorites"),
           button({520, 700, 950, 780}, "Add to cart")};
      break;
    case 6: {
      c = {text_view({50, 100, 500, 150}, "Cart")};
      std::vector<Node> rows;
      for (int k = 0; k < 2; ++k) rows.push_back(list_row(180 + k * 150, 320 + k * 150, item(2 * k + 1)));
      c.push_back(container("androidx.recyclerview.widget.RecyclerView", {0, 170, 1000, 480}, std::move(rows)));
      c.push_back(edit_text({50, 520, 650, 590}, "Promo code"));
      c.push_back(text_view({50, 620, 500, 670}, "Subtotal"));
      c.push_back(button({50, 720, 950, 800}, "Checkout"));
      break;
    }
    case 7:
      c = {edit_text({50, 120, 950, 190}, "Card number"),
           edit_text({50, 220, 480, 290}, "Expiry date"),
           edit_text({520, 220, 950, 290}, "CVV"),
           text_view({50, 330, 950, 380}, "Billing address"),
           node("android.widget.Switch", {50, 410, 950, 460}, "Save card", true),
           button({50, 520, 950, 600}, "Pay now")};
      break;
    case 8:
      c = {text_view({50, 100, 600, 150}, "Settings"),
           node("android.widget.Switch", {50, 180, 950, 240}, "Notifications", true),
           node("android.widget.Switch", {50, 260, 950, 320}, "Dark mode", true),
           text_view({50, 340, 950, 390}, "Privacy", true),
           text_view({50, 410, 950, 460}, "Language", true),
           text_view({50, 480, 950, 530}, "Log out", true)};
      break;
    default:
      c = {image({380, 100, 620, 260}),
           text_view({250, 280, 750, 330}, "My profile"),
           button({300, 350, 700, 420}, "Edit profile"),
           text_view({50, 460, 950, 510}, "Order history", true),
           text_view({50, 530, 950, 580}, "Saved items", true),
           text_view({50, 600, 950, 650}, "Help", true),
           bottom_bar()};
      break;
  }
  // Branded footer on every screen.
  c.push_back(text_view({50, 895, 950, 925}, app_name + " " + item(7)));
  return c;
}

void jitter(Node& n, int dy, nn::Rng& rng) {
  auto shift = [&](int v, int lo, int hi) { return std::clamp(v, lo, hi); };
  const int jx = static_cast<int>(nn::uniform_index(rng, 9)) - 4;
  const int jy = static_cast<int>(nn::uniform_index(rng, 9)) - 4;
  n.box = {shift(n.box[0] + jx, 0, 1000), shift(n.box[1] + dy + jy, 0, 1000), shift(n.box[2] + jx, 0, 1000),
           shift(n.box[3] + dy + jy, 0, 1000)};
  if (n.box[2] <= n.box[0]) n.box[2] = std::min(1000, n.box[0] + 1);
  if (n.box[3] <= n.box[1]) n.box[3] = std::min(1000, n.box[1] + 1);
  for (Node& c : n.children) jitter(c, dy, rng);
}

json to_json(const Node& n, const std::string& package) {
  json j;
  j["class"] = n.cls;
  j["package"] = package;
  j["bounds"] = {n.box[0] * kDeviceWidth / 1000, n.box[1] * kDeviceHeight / 1000, n.box[2] * kDeviceWidth / 1000,
                 n.box[3] * kDeviceHeight / 1000};
  j["clickable"] = n.clickable;
  j["editable"] = n.editable;
  j["visible-to-user"] = true;
  if (n.text) j["text"] = *n.text;
  json children = json::array();
  for (const Node& c : n.children) children.push_back(to_json(c, package));
  j["children"] = std::move(children);
  return j;
}

std::string app_id_for(const std::string& name) {
  std::string lower;
  for (char ch : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return "com.guivec." + lower;
}

json screen_document(int type, int app, nn::Rng& rng) {
  const Domain& d = domains()[static_cast<std::size_t>(app % kSyntheticDomains)];
  const std::string name = d.apps[static_cast<std::size_t>((app / kSyntheticDomains) % 2)];
  const std::string package = app_id_for(name);
  std::vector<Node> content = screen_content(type, d, app, name);
  const int dy = static_cast<int>(nn::uniform_index(rng, 21)) - 10;
  for (Node& n : content) jitter(n, dy, rng);
  Node toolbar = container("androidx.appcompat.widget.Toolbar", {0, 0, 1000, 70},
                           {image_button({0, 5, 100, 65}), text_view({120, 10, 700, 60}, name)});
  Node body = container("android.widget.LinearLayout", {0, 70, 1000, 1000}, std::move(content));
  Node root = container("android.widget.FrameLayout", {0, 0, 1000, 1000}, {std::move(toolbar), std::move(body)});
  json doc;
  doc["activity_name"] = package + "/" + package + "." + kTypeNames[static_cast<std::size_t>(type)];
  doc["activity"]["root"] = to_json(root, package);
  return doc;
}

std::vector<int> walk_types(nn::Rng& rng) {
  std::vector<int> order;
  std::set<int> seen;
  int current = nn::uniform01(rng) < 0.5 ? 0 : 2;
  while (true) {
    order.push_back(current);
    seen.insert(current);
    if (static_cast<int>(order.size()) == kSyntheticScreenTypes) break;
    std::vector<int> next;
    for (int t : type_graph()[static_cast<std::size_t>(current)]) {
      if (!seen.count(t)) next.push_back(t);
    }
    if (next.empty()) {
      // Jump back to an unvisited screen, as through the navigation bar.
      for (int t = 0; t < kSyntheticScreenTypes; ++t) {
        if (!seen.count(t)) next.push_back(t);
      }
    }
    current = next[nn::uniform_index(rng, next.size())];
  }
  return order;
}

}  // namespace

std::string screen_type_name(int type) {
  if (type < 0 || type >= kSyntheticScreenTypes) throw IndexOutOfRange("unknown screen type");
  return kTypeNames[static_cast<std::size_t>(type)];
}

SyntheticCorpus make_synthetic_corpus(const SyntheticConfig& config) {
  if (config.apps < 1 || config.apps > 2 * kSyntheticDomains) {
    throw Error("synthetic corpus supports 1 to 20 apps");
  }
  nn::Rng rng(config.seed);
  SyntheticCorpus out;
  std::vector<std::map<int, std::string>> by_type(static_cast<std::size_t>(config.apps));
  for (int app = 0; app < config.apps; ++app) {
    const Domain& d = domains()[static_cast<std::size_t>(app % kSyntheticDomains)];
    const std::string name = d.apps[static_cast<std::size_t>(app / kSyntheticDomains)];
    const std::string app_id = app_id_for(name);
    std::string description = d.descriptions[static_cast<std::size_t>(app / kSyntheticDomains)];
    description.replace(description.find("%s"), 2, name);
    out.corpus.apps[app_id] = {app_id, description};

    InteractionTrace trace;
    trace.trace_id = app_id;
    trace.app_id = app_id;
    const std::vector<int> types = walk_types(rng);
    for (std::size_t pos = 0; pos < types.size(); ++pos) {
      json doc = screen_document(types[pos], app, rng);
      ParseOptions opts;
      opts.screen_id = app_id + "/" + std::to_string(pos);
      GuiScreen s = parse_screen(doc, opts);
      trace.screens.push_back(s.screen_id);
      by_type[static_cast<std::size_t>(app)][types[pos]] = s.screen_id;
      out.corpus.screens.push_back(std::move(s));
      out.documents.push_back(std::move(doc));
      out.screen_type.push_back(types[pos]);
      out.screen_app.push_back(app);
    }
    out.corpus.traces.push_back(std::move(trace));
  }
  if (config.apps == 2 * kSyntheticDomains) {
    for (int t = 0; t < kSyntheticDomains; ++t) {
      const TaskSpec& spec = task_specs()[static_cast<std::size_t>(t)];
      SyntheticTask task;
      task.name = spec.name;
      task.domain = t;
      task.screen_types = spec.types;
      for (int type : spec.types) {
        task.variant_a.push_back(by_type[static_cast<std::size_t>(t)].at(type));
        task.variant_b.push_back(by_type[static_cast<std::size_t>(t + kSyntheticDomains)].at(type));
      }
      out.tasks.push_back(std::move(task));
    }
  }
  return out;
}

void write_synthetic_corpus(const SyntheticCorpus& synthetic, const std::filesystem::path& root) {
  for (std::size_t i = 0; i < synthetic.corpus.screens.size(); ++i) {
    write_file(root / (synthetic.corpus.screens[i].screen_id + ".json"), synthetic.documents[i].dump(1) + "\n");
  }
  std::string csv = "app_id,description\n";
  for (const auto& [id, meta] : synthetic.corpus.apps) csv += id + ",\"" + meta.description + "\"\n";
  write_file(root / "app_details.csv", csv);
}

std::vector<GuiScreen> make_template_screens(int templates, int per_template, std::uint64_t seed) {
  static constexpr std::array<int, 4> kTemplateTypes = {0, 2, 4, 5};
  if (templates < 1 || templates > 4 || per_template < 1) throw Error("invalid template fixture size");
  nn::Rng rng(seed);
  std::vector<GuiScreen> out;
  for (int t = 0; t < templates; ++t) {
    for (int i = 0; i < per_template; ++i) {
      const int app = static_cast<int>(nn::uniform_index(rng, 2 * kSyntheticDomains));
      ParseOptions opts;
      opts.screen_id = "template" + std::to_string(t) + "/" + std::to_string(i);
      out.push_back(parse_screen(screen_document(kTemplateTypes[static_cast<std::size_t>(t)], app, rng), opts));
    }
  }
  return out;
}

}  // namespace guivec
