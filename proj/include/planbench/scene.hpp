#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace planbench {

using json = nlohmann::json;

enum class Category : std::uint8_t { block, bowl, letter, container, fixture, misc };
enum class Color : std::uint8_t { red, orange, yellow, green, blue, purple, pink, brown, gray, white };
enum class Size : std::uint8_t { small, medium, large };

inline constexpr std::array<Color, 10> kPalette = {
    Color::red,  Color::orange, Color::yellow, Color::green, Color::blue,
    Color::purple, Color::pink, Color::brown,  Color::gray,  Color::white};

const char* to_string(Category c);
const char* to_string(Color c);
const char* to_string(Size s);
std::optional<Category> parse_category(std::string_view text);
std::optional<Color> parse_color(std::string_view text);
std::optional<Size> parse_size(std::string_view text);

/// Table grid used for layout and left/right reasoning.
inline constexpr int kGridColumns = 8;
inline constexpr int kGridRows = 7;

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

struct ObjectDescriptor {
  std::string id;
  Category category = Category::misc;
  Color color = Color::gray;
  std::optional<char> glyph;  // letters only, 'A'..'Z'
  Size size = Size::medium;
  std::string noun;           // display noun; empty means the category name
  std::optional<Cell> cell;   // home cell on the table grid

  std::string display_noun() const;
  bool operator==(const ObjectDescriptor&) const = default;
};

enum class RelationKind : std::uint8_t { on, in };
const char* to_string(RelationKind k);

struct Relation {
  RelationKind kind = RelationKind::on;
  std::string a;  // supported object
  std::string b;  // supporter
  auto operator<=>(const Relation&) const = default;
};

std::string describe(const Relation& r);

inline constexpr std::size_t kMaxObjects = 32;
inline constexpr std::uint8_t kNoObject = 0xFF;

struct Support {
  RelationKind kind;
  std::size_t parent;
  bool operator==(const Support&) const = default;
};

/// Mutable part of a scene, packed so search can copy, compare and hash it
/// cheaply. Support codes: 0 = unsupported, 1 + p = On(p), 1 + kMaxObjects + p = In(p).
struct SceneState {
  std::array<std::uint8_t, kMaxObjects> support{};
  std::uint32_t open_mask = 0;
  std::uint8_t held = kNoObject;

  std::optional<Support> support_of(std::size_t i) const {
    const std::uint8_t code = support[i];
    if (code == 0) return std::nullopt;
    if (code <= kMaxObjects) return Support{RelationKind::on, static_cast<std::size_t>(code - 1)};
    return Support{RelationKind::in, static_cast<std::size_t>(code - 1 - kMaxObjects)};
  }
  void set_support(std::size_t i, std::optional<Support> s) {
    if (!s) {
      support[i] = 0;
    } else {
      support[i] = static_cast<std::uint8_t>(
          1 + s->parent + (s->kind == RelationKind::in ? kMaxObjects : 0));
    }
  }
  bool is_open(std::size_t i) const { return (open_mask >> i) & 1U; }
  void set_open(std::size_t i, bool open) {
    if (open) {
      open_mask |= (1U << i);
    } else {
      open_mask &= ~(1U << i);
    }
  }
  std::optional<std::size_t> held_index() const {
    if (held == kNoObject) return std::nullopt;
    return held;
  }

  bool operator==(const SceneState&) const = default;
};

struct SceneStateHash {
  std::size_t operator()(const SceneState& s) const noexcept;
};

/// Immutable object inventory shared by every state of one scene, with the
/// per-object role flags the skills and search consult on every step.
class ObjectTable {
 public:
  explicit ObjectTable(std::vector<ObjectDescriptor> objects);

  std::size_t size() const { return objects_.size(); }
  const ObjectDescriptor& operator[](std::size_t i) const { return objects_[i]; }
  const std::vector<ObjectDescriptor>& objects() const { return objects_; }

  std::optional<std::size_t> find(std::string_view id) const;
  /// Throws Error(unknown_object) when absent.
  std::size_t index_of(std::string_view id) const;

  /// Canonical phrase: "letter X", bare noun for singleton fixtures, otherwise "<color> <noun>".
  const std::string& phrase(std::size_t i) const { return phrases_[i]; }
  /// Canonical JSON of the inventory; equal fingerprints mean equal tables.
  const std::string& fingerprint() const { return fingerprint_; }
  std::optional<std::size_t> table_surface() const { return table_; }

  bool is_container(std::size_t i) const { return objects_[i].category == Category::container; }
  bool is_fixture(std::size_t i) const { return objects_[i].category == Category::fixture; }
  /// Bowls and containers hold objects In them.
  bool is_receptacle(std::size_t i) const { return receptacle_[i]; }
  /// Objects can be placed On the table, mats, blocks and misc items.
  bool is_surface(std::size_t i) const { return surface_[i]; }
  /// The person fixture only receives objects through handover events.
  bool is_receiver(std::size_t i) const { return receiver_[i]; }

 private:
  std::vector<ObjectDescriptor> objects_;
  std::vector<std::string> phrases_;
  std::vector<bool> receptacle_;
  std::vector<bool> surface_;
  std::vector<bool> receiver_;
  std::unordered_map<std::string, std::size_t> index_;
  std::optional<std::size_t> table_;
  std::string fingerprint_;
};

std::string canonical_phrase(const ObjectDescriptor& d);

/// Full symbolic world state. Cheap to copy: the inventory is shared.
class Scene {
 public:
  Scene();
  Scene(std::vector<ObjectDescriptor> objects, const std::vector<Relation>& relations,
        const std::map<std::string, bool>& container_open = {},
        const std::optional<std::string>& held = std::nullopt);
  /// Throws Error(invalid_scene) if the state breaks a scene invariant.
  Scene(std::shared_ptr<const ObjectTable> table, SceneState state);

  const ObjectTable& table() const { return *table_; }
  const std::shared_ptr<const ObjectTable>& table_ptr() const { return table_; }
  const SceneState& state() const { return state_; }
  std::size_t size() const { return table_->size(); }
  const ObjectDescriptor& object(std::size_t i) const { return (*table_)[i]; }
  const std::vector<ObjectDescriptor>& objects() const { return table_->objects(); }

  std::optional<Support> support(std::size_t i) const { return state_.support_of(i); }
  bool is_open(std::size_t i) const { return state_.is_open(i); }
  std::optional<std::size_t> held_index() const { return state_.held_index(); }
  std::optional<std::string> held() const;

  std::vector<Relation> relations() const;
  std::map<std::string, bool> container_open() const;

  /// New scene over the same inventory; validated.
  Scene with_state(SceneState state) const { return Scene(table_, state); }

  bool operator==(const Scene& other) const;

 private:
  std::shared_ptr<const ObjectTable> table_;
  SceneState state_;
};

/// Every broken invariant, as readable lines; empty for a valid state.
std::vector<std::string> validate(const ObjectTable& table, const SceneState& state);

/// visible[i] is false iff object i sits, transitively, inside a closed container.
std::vector<bool> visibility_mask(const ObjectTable& table, const SceneState& state);

/// Ids of visible objects in id order; the held object is included.
std::vector<std::string> visible_objects(const Scene& scene);

/// True iff `i` is transitively supported by `ancestor` (On or In).
bool is_supported_by(const SceneState& state, std::size_t i, std::size_t ancestor);

/// Grid cell an object currently occupies: its own home cell when it rests on
/// the table, its supporter's cell when stacked or contained, nothing when held.
std::optional<Cell> effective_cell(const ObjectTable& table, const SceneState& state, std::size_t i);

struct SceneChange {
  enum class Kind { relation_removed, relation_added, container_flag, held };
  Kind kind = Kind::relation_added;
  std::optional<Relation> relation;
  std::string object;                      // container id for flag changes
  bool before = false;
  bool after = false;
  std::optional<std::string> held_before;  // held changes
  std::optional<std::string> held_after;

  std::string describe() const;
  bool operator==(const SceneChange&) const = default;
};

/// Symmetric relation difference plus flag and gripper changes.
/// Throws Error(mismatched_objects) when the object id sets differ.
std::vector<SceneChange> scene_diff(const Scene& a, const Scene& b);

json to_json(const ObjectDescriptor& d);
ObjectDescriptor descriptor_from_json(const json& j);
json to_json(const Scene& scene);
Scene scene_from_json(const json& j);
/// Sorted-key compact JSON, used in transcripts and cache keys.
std::string canonical_json(const Scene& scene);

}  // namespace planbench
