#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "planbench/scene.hpp"

namespace planbench {

/// Success predicate over a scene, kept as data so it can be serialized with
/// the episode and bound to indices for search.
struct GoalExpr {
  enum class Op : std::uint8_t {
    all,           // conjunction of children; empty is true
    any,           // disjunction of children; empty is false
    on,            // ids = {a, b}: On(a, b)
    in,            // ids = {a, b}: In(a, b)
    left_of,       // ids = {a, b}: x(a) < x(b), neither held
    tower,         // ids: one On-chain whose bottom rests on the table
    count_in,      // ids = {members..., receptacle}: at least `count` members In it
    handed_over,   // ids = {object, receiver}: On(object, receiver)
  };

  Op op = Op::all;
  std::vector<std::string> ids;
  int count = 0;
  std::vector<GoalExpr> children;

  static GoalExpr conj(std::vector<GoalExpr> children);
  static GoalExpr disj(std::vector<GoalExpr> children);
  static GoalExpr on(std::string a, std::string b);
  static GoalExpr in(std::string a, std::string b);
  static GoalExpr left_of(std::string a, std::string b);
  static GoalExpr tower(std::vector<std::string> ids);
  static GoalExpr count_in(std::vector<std::string> members, std::string receptacle, int at_least);
  static GoalExpr handed_over(std::string object, std::string receiver);

  /// Every object id mentioned, sorted and unique.
  std::vector<std::string> referenced_ids() const;
  bool operator==(const GoalExpr&) const = default;
};

json to_json(const GoalExpr& g);
GoalExpr goal_from_json(const json& j);

/// GoalExpr compiled against one inventory.
class BoundGoal {
 public:
  /// Throws Error(unknown_object) if the expression names an absent object.
  BoundGoal(const GoalExpr& expr, const ObjectTable& table);

  /// The predicate alone, without the empty-gripper requirement.
  bool holds(const SceneState& state) const;
  /// Success: predicate holds and the gripper is empty.
  bool satisfied(const SceneState& state) const;
  /// Search-time test: a handover counts once the robot holds the object,
  /// since only the person can complete it.
  bool planning_satisfied(const SceneState& state) const;

 private:
  struct Node {
    GoalExpr::Op op;
    std::vector<std::uint8_t> idx;
    int count = 0;
    std::vector<Node> children;
  };
  Node compile(const GoalExpr& expr, const ObjectTable& table) const;
  bool eval(const Node& node, const SceneState& state, bool planning) const;

  const ObjectTable* table_;
  Node root_;
  std::vector<std::uint8_t> handover_objects_;
};

bool goal_expr_holds(const GoalExpr& expr, const Scene& scene);

enum class GoalMode : std::uint8_t { language, goal_image, combined };
const char* to_string(GoalMode m);

struct GoalSpec {
  GoalMode mode = GoalMode::language;
  std::string instruction;
  std::optional<Scene> goal_scene;                       // image and combined modes
  std::optional<std::vector<std::uint8_t>> goal_image;   // PNG of goal_scene
  GoalExpr predicate;
  std::vector<std::string> relevant;                     // task-relevant object ids
  std::vector<ObjectDescriptor> mentioned;               // objects the instruction names
};

/// Predicate holds and the gripper is empty.
bool goal_satisfied(const Scene& scene, const GoalSpec& goal);

/// Conjunction reproducing the support relation of each relevant object in
/// the goal scene.
GoalExpr relational_match(const Scene& goal_scene, const std::vector<std::string>& relevant);

json to_json(const GoalSpec& g);
GoalSpec goal_spec_from_json(const json& j);
std::optional<GoalMode> parse_goal_mode(std::string_view text);

}  // namespace planbench
