#include "planbench/oracle.hpp"

#include <algorithm>
#include <deque>

namespace planbench {

namespace {

bool pickable(const ObjectTable& table, std::size_t i) {
  return !table.is_fixture(i) && table[i].category != Category::bowl;
}

struct SearchNode {
  SceneState state;
  std::uint32_t parent;
  std::uint16_t action;
  std::uint8_t depth;
};

// Returns the action path, or nullopt when unsolvable within max_depth.
std::optional<std::vector<Action>> bfs(const Scene& scene, const BoundGoal& goal, int max_depth) {
  const ObjectTable& table = scene.table();
  const std::vector<Action> actions = candidate_actions(table);
  std::vector<SearchNode> nodes;
  std::unordered_map<SceneState, std::uint32_t, SceneStateHash> seen;
  nodes.push_back({scene.state(), UINT32_MAX, 0, 0});
  seen.emplace(scene.state(), 0);
  for (std::size_t head = 0; head < nodes.size(); ++head) {
    const SearchNode node = nodes[head];
    if (goal.planning_satisfied(node.state)) {
      std::vector<Action> path;
      for (std::uint32_t cur = static_cast<std::uint32_t>(head); nodes[cur].parent != UINT32_MAX;
           cur = nodes[cur].parent) {
        path.push_back(actions[nodes[cur].action]);
      }
      std::reverse(path.begin(), path.end());
      return path;
    }
    if (node.depth >= max_depth) continue;
    const std::vector<bool> visible = visibility_mask(table, node.state);
    for (std::size_t k = 0; k < actions.size(); ++k) {
      if (!check_precondition(table, node.state, visible, actions[k])) continue;
      SceneState next = apply_effect(table, node.state, actions[k]);
      if (seen.emplace(next, static_cast<std::uint32_t>(nodes.size())).second) {
        nodes.push_back({next, static_cast<std::uint32_t>(head), static_cast<std::uint16_t>(k),
                         static_cast<std::uint8_t>(node.depth + 1)});
      }
    }
  }
  return std::nullopt;
}

Plan to_plan(const ObjectTable& table, const std::vector<Action>& path, bool needs_wait) {
  Plan plan;
  plan.terminated = true;
  for (const Action& a : path) plan.steps.push_back(unbind(table, a));
  if (needs_wait) plan.steps.push_back(make_invocation(SkillName::wait));
  return plan;
}

SceneState final_state(const ObjectTable& table, SceneState state, const std::vector<Action>& path) {
  for (const Action& a : path) state = apply_effect(table, state, a);
  return state;
}

}  // namespace

std::vector<Action> candidate_actions(const ObjectTable& table) {
  std::vector<Action> out;
  const auto n = static_cast<std::uint8_t>(table.size());
  for (std::uint8_t a = 0; a < n; ++a) {
    if (pickable(table, a)) out.push_back({SkillName::pick_up, a, kNoObject});
    if (table.is_container(a)) {
      out.push_back({SkillName::open, a, kNoObject});
      out.push_back({SkillName::close, a, kNoObject});
    }
    if (!pickable(table, a)) continue;
    for (std::uint8_t b = 0; b < n; ++b) {
      if (a == b) continue;
      if (table.is_receptacle(b) || table.is_surface(b)) out.push_back({SkillName::place, a, b});
      if (table.is_receptacle(a) && table.is_receptacle(b)) out.push_back({SkillName::pour, a, b});
    }
  }
  std::vector<std::pair<std::string, Action>> keyed;
  keyed.reserve(out.size());
  for (const Action& a : out) keyed.emplace_back(format_action(a, table), a);
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  out.clear();
  for (auto& [text, a] : keyed) out.push_back(a);
  return out;
}

std::optional<Plan> oracle_solve(const Scene& scene, const GoalSpec& goal, int max_depth) {
  const BoundGoal bound(goal.predicate, scene.table());
  const auto path = bfs(scene, bound, max_depth);
  if (!path) return std::nullopt;
  const SceneState end = final_state(scene.table(), scene.state(), *path);
  return to_plan(scene.table(), *path, !bound.satisfied(end));
}

std::optional<Plan> OracleMemo::solve(const Scene& scene, const GoalSpec& goal, int max_depth) {
  const BoundGoal bound(goal.predicate, scene.table());
  const std::string key = scene.table().fingerprint() + to_json(goal.predicate).dump() +
                          std::to_string(max_depth);
  std::vector<Action> path;
  {
    std::lock_guard lock(mu_);
    if (key != key_) {
      key_ = key;
      plans_.clear();
      unsolvable_.clear();
    }
    if (unsolvable_.count(scene.state())) return std::nullopt;
    const auto hit = plans_.find(scene.state());
    if (hit != plans_.end()) path = hit->second;
  }
  if (path.empty() && !bound.planning_satisfied(scene.state())) {
    const auto found = bfs(scene, bound, max_depth);
    std::lock_guard lock(mu_);
    if (!found) {
      unsolvable_.emplace(scene.state(), true);
      return std::nullopt;
    }
    path = *found;
    SceneState cur = scene.state();
    for (std::size_t k = 0; k < path.size(); ++k) {
      plans_.emplace(cur, std::vector<Action>(path.begin() + static_cast<std::ptrdiff_t>(k), path.end()));
      cur = apply_effect(scene.table(), cur, path[k]);
    }
  }
  const SceneState end = final_state(scene.table(), scene.state(), path);
  return to_plan(scene.table(), path, !bound.satisfied(end));
}

}  // namespace planbench
