#include "planbench/scene.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "planbench/error.hpp"

namespace planbench {

namespace {

constexpr std::array<const char*, 6> kCategoryNames = {"block",     "bowl",    "letter",
                                                       "container", "fixture", "misc"};
constexpr std::array<const char*, 10> kColorNames = {"red",    "orange", "yellow", "green", "blue",
                                                     "purple", "pink",   "brown",  "gray",  "white"};
constexpr std::array<const char*, 3> kSizeNames = {"small", "medium", "large"};

template <class Enum, std::size_t N>
std::optional<Enum> parse_enum(std::string_view text, const std::array<const char*, N>& names) {
  for (std::size_t i = 0; i < N; ++i) {
    if (text == names[i]) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

}  // namespace

const char* to_string(Category c) { return kCategoryNames[static_cast<std::size_t>(c)]; }
const char* to_string(Color c) { return kColorNames[static_cast<std::size_t>(c)]; }
const char* to_string(Size s) { return kSizeNames[static_cast<std::size_t>(s)]; }
const char* to_string(RelationKind k) { return k == RelationKind::on ? "on" : "in"; }

std::optional<Category> parse_category(std::string_view text) {
  return parse_enum<Category>(text, kCategoryNames);
}
std::optional<Color> parse_color(std::string_view text) { return parse_enum<Color>(text, kColorNames); }
std::optional<Size> parse_size(std::string_view text) { return parse_enum<Size>(text, kSizeNames); }

std::string ObjectDescriptor::display_noun() const {
  return noun.empty() ? std::string(to_string(category)) : noun;
}

std::string describe(const Relation& r) {
  return std::string(r.kind == RelationKind::on ? "On(" : "In(") + r.a + ", " + r.b + ")";
}

std::size_t SceneStateHash::operator()(const SceneState& s) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : s.support) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  h ^= s.open_mask;
  h *= 0x100000001b3ULL;
  h ^= s.held;
  h *= 0x100000001b3ULL;
  return static_cast<std::size_t>(h);
}

std::string canonical_phrase(const ObjectDescriptor& d) {
  if (d.category == Category::letter && d.glyph) {
    return std::string("letter ") + *d.glyph;
  }
  if (d.category == Category::fixture && d.display_noun() != "mat") {
    return d.display_noun();
  }
  return std::string(to_string(d.color)) + " " + d.display_noun();
}

ObjectTable::ObjectTable(std::vector<ObjectDescriptor> objects) : objects_(std::move(objects)) {
  if (objects_.size() > kMaxObjects) {
    throw Error(ErrorKind::invalid_scene, "scene holds more than 32 objects");
  }
  std::sort(objects_.begin(), objects_.end(),
            [](const ObjectDescriptor& l, const ObjectDescriptor& r) { return l.id < r.id; });
  std::set<Cell> cells;
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    const ObjectDescriptor& d = objects_[i];
    if (d.id.empty()) throw Error(ErrorKind::invalid_scene, "empty object id");
    if (!index_.emplace(d.id, i).second) {
      throw Error(ErrorKind::invalid_scene, "duplicate object id " + d.id);
    }
    const bool is_letter = d.category == Category::letter;
    if (is_letter != d.glyph.has_value()) {
      throw Error(ErrorKind::invalid_scene, "glyph must be present exactly for letters: " + d.id);
    }
    if (d.glyph && (*d.glyph < 'A' || *d.glyph > 'Z')) {
      throw Error(ErrorKind::invalid_scene, "glyph out of range A-Z: " + d.id);
    }
    if (d.cell) {
      if (d.cell->x < 0 || d.cell->x >= kGridColumns || d.cell->y < 0 || d.cell->y >= kGridRows) {
        throw Error(ErrorKind::invalid_scene, "cell outside the table grid: " + d.id);
      }
      if (!cells.insert(*d.cell).second) {
        throw Error(ErrorKind::invalid_scene, "two objects share a home cell: " + d.id);
      }
    }
    const std::string noun = d.display_noun();
    phrases_.push_back(canonical_phrase(d));
    receptacle_.push_back(d.category == Category::bowl || d.category == Category::container);
    receiver_.push_back(d.category == Category::fixture && noun == "person");
    surface_.push_back((d.category == Category::fixture && noun != "person") ||
                       d.category == Category::block || d.category == Category::misc);
    if (d.category == Category::fixture && noun == "table" && !table_) table_ = i;
  }
  json inventory = json::array();
  for (const auto& d : objects_) inventory.push_back(to_json(d));
  fingerprint_ = inventory.dump();
}

std::optional<std::size_t> ObjectTable::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ObjectTable::index_of(std::string_view id) const {
  auto i = find(id);
  if (!i) throw Error(ErrorKind::unknown_object, std::string(id));
  return *i;
}

Scene::Scene() : table_(std::make_shared<const ObjectTable>(std::vector<ObjectDescriptor>{})) {}

Scene::Scene(std::vector<ObjectDescriptor> objects, const std::vector<Relation>& relations,
             const std::map<std::string, bool>& container_open,
             const std::optional<std::string>& held)
    : table_(std::make_shared<const ObjectTable>(std::move(objects))) {
  const ObjectTable& t = *table_;
  auto lookup = [&](const std::string& id) {
    auto i = t.find(id);
    if (!i) throw Error(ErrorKind::invalid_scene, "relation names unknown object " + id);
    return *i;
  };
  for (const Relation& r : relations) {
    const std::size_t a = lookup(r.a);
    const std::size_t b = lookup(r.b);
    if (state_.support[a] != 0) {
      throw Error(ErrorKind::invalid_scene, "object has two supports: " + r.a);
    }
    state_.set_support(a, Support{r.kind, b});
  }
  for (const auto& [id, open] : container_open) {
    const std::size_t i = lookup(id);
    if (!t.is_container(i)) {
      throw Error(ErrorKind::invalid_scene, "open flag on a non-container: " + id);
    }
    state_.set_open(i, open);
  }
  if (held) state_.held = static_cast<std::uint8_t>(lookup(*held));
  auto problems = validate(t, state_);
  if (!problems.empty()) throw Error(ErrorKind::invalid_scene, problems.front());
}

Scene::Scene(std::shared_ptr<const ObjectTable> table, SceneState state)
    : table_(std::move(table)), state_(state) {
  auto problems = validate(*table_, state_);
  if (!problems.empty()) throw Error(ErrorKind::invalid_scene, problems.front());
}

std::optional<std::string> Scene::held() const {
  if (auto h = held_index()) return object(*h).id;
  return std::nullopt;
}

std::vector<Relation> Scene::relations() const {
  std::vector<Relation> out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (auto s = support(i)) out.push_back(Relation{s->kind, object(i).id, object(s->parent).id});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::map<std::string, bool> Scene::container_open() const {
  std::map<std::string, bool> out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (table_->is_container(i)) out.emplace(object(i).id, is_open(i));
  }
  return out;
}

bool Scene::operator==(const Scene& other) const {
  if (!(state_ == other.state_)) return false;
  if (table_ == other.table_) return true;
  return table_->fingerprint() == other.table_->fingerprint();
}

std::vector<std::string> validate(const ObjectTable& table, const SceneState& state) {
  std::vector<std::string> problems;
  const std::size_t n = table.size();
  for (std::size_t i = n; i < kMaxObjects; ++i) {
    if (state.support[i] != 0) problems.push_back("support entry beyond inventory");
  }
  if (n < 32 && (state.open_mask >> n) != 0) problems.push_back("open flag beyond inventory");
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = state.support_of(i);
    if (!table.is_container(i) && state.is_open(i)) {
      problems.push_back("open flag on non-container " + table[i].id);
    }
    if (!s) continue;
    if (s->parent >= n) {
      problems.push_back("support of " + table[i].id + " references a missing object");
      continue;
    }
    if (s->parent == i) problems.push_back(table[i].id + " supports itself");
    if (s->kind == RelationKind::in && !table.is_receptacle(s->parent)) {
      problems.push_back("In(" + table[i].id + ", " + table[s->parent].id +
                         ") requires a bowl or container");
    }
  }
  if (auto h = state.held_index()) {
    if (*h >= n) {
      problems.push_back("held object missing from inventory");
    } else if (state.support[*h] != 0) {
      problems.push_back("held object " + table[*h].id + " still has a support");
    }
  }
  // Each object has at most one support, so a cycle shows up as a walk longer than n.
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t cur = i;
    std::size_t steps = 0;
    while (auto s = state.support_of(cur)) {
      if (s->parent >= n) break;
      cur = s->parent;
      if (++steps > n) {
        problems.push_back("support cycle through " + table[i].id);
        break;
      }
    }
  }
  return problems;
}

std::vector<bool> visibility_mask(const ObjectTable& table, const SceneState& state) {
  const std::size_t n = table.size();
  std::vector<bool> visible(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t cur = i;
    for (std::size_t steps = 0; steps <= n; ++steps) {
      const auto s = state.support_of(cur);
      if (!s) break;
      if (s->kind == RelationKind::in && table.is_container(s->parent) && !state.is_open(s->parent)) {
        visible[i] = false;
        break;
      }
      cur = s->parent;
    }
  }
  return visible;
}

std::vector<std::string> visible_objects(const Scene& scene) {
  const auto mask = visibility_mask(scene.table(), scene.state());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < scene.size(); ++i) {
    if (mask[i]) out.push_back(scene.object(i).id);
  }
  return out;
}

bool is_supported_by(const SceneState& state, std::size_t i, std::size_t ancestor) {
  std::size_t cur = i;
  for (std::size_t steps = 0; steps <= kMaxObjects; ++steps) {
    const auto s = state.support_of(cur);
    if (!s) return false;
    if (s->parent == ancestor) return true;
    cur = s->parent;
  }
  return false;
}

std::optional<Cell> effective_cell(const ObjectTable& table, const SceneState& state, std::size_t i) {
  std::size_t cur = i;
  for (std::size_t steps = 0; steps <= kMaxObjects; ++steps) {
    if (state.held == cur) return std::nullopt;
    const auto s = state.support_of(cur);
    if (!s || !table[s->parent].cell) return table[cur].cell;
    cur = s->parent;
  }
  return std::nullopt;
}

std::string SceneChange::describe() const {
  switch (kind) {
    case Kind::relation_removed: return "- " + planbench::describe(*relation);
    case Kind::relation_added: return "+ " + planbench::describe(*relation);
    case Kind::container_flag:
      return object + (after ? " opened" : " closed");
    case Kind::held:
      return "held: " + held_before.value_or("none") + " -> " + held_after.value_or("none");
  }
  return {};
}

std::vector<SceneChange> scene_diff(const Scene& a, const Scene& b) {
  if (a.table().fingerprint() != b.table().fingerprint()) {
    std::set<std::string> ids_a, ids_b;
    for (const auto& d : a.objects()) ids_a.insert(d.id);
    for (const auto& d : b.objects()) ids_b.insert(d.id);
    if (ids_a != ids_b) throw Error(ErrorKind::mismatched_objects, "scenes hold different objects");
  }
  std::vector<SceneChange> out;
  const auto ra = a.relations();
  const auto rb = b.relations();
  std::vector<Relation> removed, added;
  std::set_difference(ra.begin(), ra.end(), rb.begin(), rb.end(), std::back_inserter(removed));
  std::set_difference(rb.begin(), rb.end(), ra.begin(), ra.end(), std::back_inserter(added));
  for (auto& r : removed) {
    SceneChange c;
    c.kind = SceneChange::Kind::relation_removed;
    c.relation = std::move(r);
    out.push_back(std::move(c));
  }
  for (auto& r : added) {
    SceneChange c;
    c.kind = SceneChange::Kind::relation_added;
    c.relation = std::move(r);
    out.push_back(std::move(c));
  }
  const auto fa = a.container_open();
  const auto fb = b.container_open();
  for (const auto& [id, open] : fa) {
    auto it = fb.find(id);
    if (it != fb.end() && it->second != open) {
      SceneChange c;
      c.kind = SceneChange::Kind::container_flag;
      c.object = id;
      c.before = open;
      c.after = it->second;
      out.push_back(std::move(c));
    }
  }
  if (a.held() != b.held()) {
    SceneChange c;
    c.kind = SceneChange::Kind::held;
    c.held_before = a.held();
    c.held_after = b.held();
    out.push_back(std::move(c));
  }
  return out;
}

json to_json(const ObjectDescriptor& d) {
  json j;
  j["id"] = d.id;
  j["category"] = to_string(d.category);
  j["color"] = to_string(d.color);
  j["size"] = to_string(d.size);
  j["noun"] = d.display_noun();
  j["glyph"] = d.glyph ? json(std::string(1, *d.glyph)) : json(nullptr);
  j["cell"] = d.cell ? json::array({d.cell->x, d.cell->y}) : json(nullptr);
  return j;
}

ObjectDescriptor descriptor_from_json(const json& j) {
  ObjectDescriptor d;
  d.id = j.at("id").get<std::string>();
  auto category = parse_category(j.at("category").get<std::string>());
  auto color = parse_color(j.at("color").get<std::string>());
  auto size = parse_size(j.value("size", std::string("medium")));
  if (!category || !color || !size) {
    throw Error(ErrorKind::invalid_scene, "bad descriptor for " + d.id);
  }
  d.category = *category;
  d.color = *color;
  d.size = *size;
  d.noun = j.value("noun", std::string());
  if (d.noun == to_string(d.category)) d.noun.clear();
  if (j.contains("glyph") && !j["glyph"].is_null()) {
    const auto g = j["glyph"].get<std::string>();
    if (g.size() != 1) throw Error(ErrorKind::invalid_scene, "glyph must be one letter");
    d.glyph = g[0];
  }
  if (j.contains("cell") && !j["cell"].is_null()) {
    d.cell = Cell{j["cell"].at(0).get<int>(), j["cell"].at(1).get<int>()};
  }
  return d;
}

json to_json(const Scene& scene) {
  json j;
  json objects = json::array();
  for (const auto& d : scene.objects()) objects.push_back(to_json(d));
  j["objects"] = std::move(objects);
  json relations = json::array();
  for (const auto& r : scene.relations()) {
    relations.push_back({{"kind", to_string(r.kind)}, {"a", r.a}, {"b", r.b}});
  }
  j["relations"] = std::move(relations);
  j["container_open"] = scene.container_open();
  j["held"] = scene.held() ? json(*scene.held()) : json(nullptr);
  return j;
}

Scene scene_from_json(const json& j) {
  std::vector<ObjectDescriptor> objects;
  for (const auto& o : j.at("objects")) objects.push_back(descriptor_from_json(o));
  std::vector<Relation> relations;
  for (const auto& r : j.at("relations")) {
    const auto kind = r.at("kind").get<std::string>();
    if (kind != "on" && kind != "in") throw Error(ErrorKind::invalid_scene, "bad relation kind");
    relations.push_back(Relation{kind == "on" ? RelationKind::on : RelationKind::in,
                                 r.at("a").get<std::string>(), r.at("b").get<std::string>()});
  }
  std::map<std::string, bool> open;
  if (j.contains("container_open")) open = j["container_open"].get<std::map<std::string, bool>>();
  std::optional<std::string> held;
  if (j.contains("held") && !j["held"].is_null()) held = j["held"].get<std::string>();
  return Scene(std::move(objects), relations, open, held);
}

std::string canonical_json(const Scene& scene) { return to_json(scene).dump(); }

}  // namespace planbench
