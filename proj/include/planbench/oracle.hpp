#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "planbench/goal.hpp"
#include "planbench/plan_language.hpp"
#include "planbench/scene.hpp"
#include "planbench/skills.hpp"

namespace planbench {

inline constexpr int kDefaultOracleDepth = 30;

/// Every action that can apply to some state of this inventory, sorted by its
/// formatted text so that breadth-first search meets ties in lexicographic order.
std::vector<Action> candidate_actions(const ObjectTable& table);

/// Shortest plan under the six skills with noise ignored; among shortest plans
/// the one whose step texts are lexicographically smallest. A handover goal is
/// reached by holding the object, so such plans end with `wait`.
/// Returns nullopt when no plan exists within max_depth.
std::optional<Plan> oracle_solve(const Scene& scene, const GoalSpec& goal,
                                 int max_depth = kDefaultOracleDepth);

/// Reuses solutions across calls for one inventory and goal. Every suffix of an
/// optimal plan is itself the optimal plan from the state it starts in, so each
/// solve also answers every state along its path.
class OracleMemo {
 public:
  std::optional<Plan> solve(const Scene& scene, const GoalSpec& goal,
                            int max_depth = kDefaultOracleDepth);

 private:
  std::mutex mu_;
  std::string key_;
  std::unordered_map<SceneState, std::vector<Action>, SceneStateHash> plans_;
  std::unordered_map<SceneState, bool, SceneStateHash> unsolvable_;
};

}  // namespace planbench
