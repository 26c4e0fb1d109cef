#include "planbench/goal.hpp"

#include <algorithm>
#include <set>

#include "planbench/digest.hpp"
#include "planbench/error.hpp"
#include "planbench/render.hpp"

namespace planbench {

namespace {

const char* op_name(GoalExpr::Op op) {
  switch (op) {
    case GoalExpr::Op::all: return "all";
    case GoalExpr::Op::any: return "any";
    case GoalExpr::Op::on: return "on";
    case GoalExpr::Op::in: return "in";
    case GoalExpr::Op::left_of: return "left_of";
    case GoalExpr::Op::tower: return "tower";
    case GoalExpr::Op::count_in: return "count_in";
    case GoalExpr::Op::handed_over: return "handed_over";
  }
  return "all";
}

GoalExpr::Op parse_op(const std::string& name) {
  for (auto op : {GoalExpr::Op::all, GoalExpr::Op::any, GoalExpr::Op::on, GoalExpr::Op::in,
                  GoalExpr::Op::left_of, GoalExpr::Op::tower, GoalExpr::Op::count_in,
                  GoalExpr::Op::handed_over}) {
    if (name == op_name(op)) return op;
  }
  throw Error(ErrorKind::config_error, "unknown goal op " + name);
}

void collect_ids(const GoalExpr& g, std::set<std::string>& out) {
  out.insert(g.ids.begin(), g.ids.end());
  for (const auto& c : g.children) collect_ids(c, out);
}

void collect_handover(const GoalExpr& g, const ObjectTable& table, std::vector<std::uint8_t>& out) {
  if (g.op == GoalExpr::Op::handed_over) out.push_back(static_cast<std::uint8_t>(table.index_of(g.ids.at(0))));
  for (const auto& c : g.children) collect_handover(c, table, out);
}

}  // namespace

GoalExpr GoalExpr::conj(std::vector<GoalExpr> children) {
  GoalExpr g;
  g.op = Op::all;
  g.children = std::move(children);
  return g;
}

GoalExpr GoalExpr::disj(std::vector<GoalExpr> children) {
  GoalExpr g;
  g.op = Op::any;
  g.children = std::move(children);
  return g;
}

GoalExpr GoalExpr::on(std::string a, std::string b) {
  GoalExpr g;
  g.op = Op::on;
  g.ids = {std::move(a), std::move(b)};
  return g;
}

GoalExpr GoalExpr::in(std::string a, std::string b) {
  GoalExpr g;
  g.op = Op::in;
  g.ids = {std::move(a), std::move(b)};
  return g;
}

GoalExpr GoalExpr::left_of(std::string a, std::string b) {
  GoalExpr g;
  g.op = Op::left_of;
  g.ids = {std::move(a), std::move(b)};
  return g;
}

GoalExpr GoalExpr::tower(std::vector<std::string> ids) {
  GoalExpr g;
  g.op = Op::tower;
  g.ids = std::move(ids);
  return g;
}

GoalExpr GoalExpr::count_in(std::vector<std::string> members, std::string receptacle, int at_least) {
  GoalExpr g;
  g.op = Op::count_in;
  g.ids = std::move(members);
  g.ids.push_back(std::move(receptacle));
  g.count = at_least;
  return g;
}

GoalExpr GoalExpr::handed_over(std::string object, std::string receiver) {
  GoalExpr g;
  g.op = Op::handed_over;
  g.ids = {std::move(object), std::move(receiver)};
  return g;
}

std::vector<std::string> GoalExpr::referenced_ids() const {
  std::set<std::string> ids;
  collect_ids(*this, ids);
  return {ids.begin(), ids.end()};
}

json to_json(const GoalExpr& g) {
  json j;
  j["op"] = op_name(g.op);
  if (!g.ids.empty()) j["ids"] = g.ids;
  if (g.op == GoalExpr::Op::count_in) j["count"] = g.count;
  if (g.op == GoalExpr::Op::all || g.op == GoalExpr::Op::any) {
    json children = json::array();
    for (const auto& c : g.children) children.push_back(to_json(c));
    j["children"] = std::move(children);
  }
  return j;
}

GoalExpr goal_from_json(const json& j) {
  GoalExpr g;
  g.op = parse_op(j.at("op").get<std::string>());
  if (j.contains("ids")) g.ids = j["ids"].get<std::vector<std::string>>();
  g.count = j.value("count", 0);
  if (j.contains("children")) {
    for (const auto& c : j["children"]) g.children.push_back(goal_from_json(c));
  }
  return g;
}

BoundGoal::BoundGoal(const GoalExpr& expr, const ObjectTable& table)
    : table_(&table), root_(compile(expr, table)) {
  collect_handover(expr, table, handover_objects_);
}

BoundGoal::Node BoundGoal::compile(const GoalExpr& expr, const ObjectTable& table) const {
  Node node;
  node.op = expr.op;
  node.count = expr.count;
  for (const auto& id : expr.ids) node.idx.push_back(static_cast<std::uint8_t>(table.index_of(id)));
  for (const auto& c : expr.children) node.children.push_back(compile(c, table));
  return node;
}

bool BoundGoal::eval(const Node& node, const SceneState& state, bool planning) const {
  switch (node.op) {
    case GoalExpr::Op::all:
      return std::all_of(node.children.begin(), node.children.end(),
                         [&](const Node& c) { return eval(c, state, planning); });
    case GoalExpr::Op::any:
      return std::any_of(node.children.begin(), node.children.end(),
                         [&](const Node& c) { return eval(c, state, planning); });
    case GoalExpr::Op::on:
    case GoalExpr::Op::in: {
      const auto s = state.support_of(node.idx[0]);
      const RelationKind want = node.op == GoalExpr::Op::on ? RelationKind::on : RelationKind::in;
      return s && s->kind == want && s->parent == node.idx[1];
    }
    case GoalExpr::Op::left_of: {
      const auto a = effective_cell(*table_, state, node.idx[0]);
      const auto b = effective_cell(*table_, state, node.idx[1]);
      return a && b && a->x < b->x;
    }
    case GoalExpr::Op::tower: {
      const auto table_surface = table_->table_surface();
      std::size_t bottoms = 0;
      std::vector<int> children_on(node.idx.size(), 0);
      for (std::uint8_t member : node.idx) {
        if (state.held == member) return false;
        const auto s = state.support_of(member);
        if (!s || s->kind != RelationKind::on) return false;
        if (table_surface && s->parent == *table_surface) {
          ++bottoms;
          continue;
        }
        const auto it = std::find(node.idx.begin(), node.idx.end(), s->parent);
        if (it == node.idx.end()) return false;
        if (++children_on[static_cast<std::size_t>(it - node.idx.begin())] > 1) return false;
      }
      return bottoms == 1 || node.idx.empty();
    }
    case GoalExpr::Op::count_in: {
      const std::uint8_t receptacle = node.idx.back();
      int n = 0;
      for (std::size_t k = 0; k + 1 < node.idx.size(); ++k) {
        const auto s = state.support_of(node.idx[k]);
        if (s && s->kind == RelationKind::in && s->parent == receptacle) ++n;
      }
      return n >= node.count;
    }
    case GoalExpr::Op::handed_over: {
      const auto s = state.support_of(node.idx[0]);
      if (s && s->kind == RelationKind::on && s->parent == node.idx[1]) return true;
      return planning && state.held == node.idx[0];
    }
  }
  return false;
}

bool BoundGoal::holds(const SceneState& state) const { return eval(root_, state, false); }

bool BoundGoal::satisfied(const SceneState& state) const {
  return state.held == kNoObject && eval(root_, state, false);
}

bool BoundGoal::planning_satisfied(const SceneState& state) const {
  if (state.held != kNoObject &&
      std::find(handover_objects_.begin(), handover_objects_.end(), state.held) == handover_objects_.end()) {
    return false;
  }
  return eval(root_, state, true);
}

bool goal_expr_holds(const GoalExpr& expr, const Scene& scene) {
  return BoundGoal(expr, scene.table()).holds(scene.state());
}

const char* to_string(GoalMode m) {
  switch (m) {
    case GoalMode::language: return "language";
    case GoalMode::goal_image: return "goal_image";
    case GoalMode::combined: return "combined";
  }
  return "language";
}

bool goal_satisfied(const Scene& scene, const GoalSpec& goal) {
  return BoundGoal(goal.predicate, scene.table()).satisfied(scene.state());
}

GoalExpr relational_match(const Scene& goal_scene, const std::vector<std::string>& relevant) {
  std::vector<GoalExpr> atoms;
  for (const auto& id : relevant) {
    const std::size_t i = goal_scene.table().index_of(id);
    const auto s = goal_scene.support(i);
    if (!s) continue;
    const std::string& parent = goal_scene.object(s->parent).id;
    atoms.push_back(s->kind == RelationKind::on ? GoalExpr::on(id, parent) : GoalExpr::in(id, parent));
  }
  return GoalExpr::conj(std::move(atoms));
}

json to_json(const GoalSpec& g) {
  json j;
  j["mode"] = to_string(g.mode);
  j["instruction"] = g.instruction;
  j["predicate"] = to_json(g.predicate);
  j["relevant"] = g.relevant;
  json mentioned = json::array();
  for (const auto& d : g.mentioned) mentioned.push_back(to_json(d));
  j["mentioned"] = std::move(mentioned);
  j["goal_scene"] = g.goal_scene ? to_json(*g.goal_scene) : json(nullptr);
  j["goal_image_sha256"] =
      g.goal_image ? json(sha256_hex(std::span<const std::uint8_t>(*g.goal_image))) : json(nullptr);
  return j;
}

std::optional<GoalMode> parse_goal_mode(std::string_view text) {
  for (auto m : {GoalMode::language, GoalMode::goal_image, GoalMode::combined}) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

GoalSpec goal_spec_from_json(const json& j) {
  GoalSpec g;
  const auto mode = parse_goal_mode(j.at("mode").get<std::string>());
  if (!mode) throw Error(ErrorKind::config_error, "unknown goal mode");
  g.mode = *mode;
  g.instruction = j.at("instruction").get<std::string>();
  g.predicate = goal_from_json(j.at("predicate"));
  g.relevant = j.value("relevant", std::vector<std::string>{});
  if (j.contains("mentioned")) {
    for (const auto& d : j["mentioned"]) g.mentioned.push_back(descriptor_from_json(d));
  }
  if (j.contains("goal_scene") && !j["goal_scene"].is_null()) {
    g.goal_scene = scene_from_json(j["goal_scene"]);
    g.goal_image = render_image(*g.goal_scene, RenderStyle::goal_sketch);
  }
  return g;
}

}  // namespace planbench
