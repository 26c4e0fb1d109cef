#include "planbench/skills.hpp"

#include <array>

#include "planbench/error.hpp"

namespace planbench {

namespace {

constexpr std::array<const char*, 6> kSkillNames = {"pick_up", "place", "open",
                                                    "close",   "pour",  "wait"};

bool has_on_child(const ObjectTable& table, const SceneState& state, std::size_t target) {
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto s = state.support_of(i);
    if (s && s->kind == RelationKind::on && s->parent == target) return true;
  }
  return false;
}

PreconditionResult fail(PreconditionReason r) { return {false, r}; }

PreconditionResult check_destination(const ObjectTable& table, const SceneState& state,
                                     const std::vector<bool>& visible, std::size_t item,
                                     std::size_t dest, bool receptacle_only) {
  if (!visible[dest]) return fail(PreconditionReason::not_visible);
  if (dest == item || is_supported_by(state, dest, item)) {
    return fail(PreconditionReason::invalid_destination);
  }
  if (table.is_receptacle(dest)) {
    if (table.is_container(dest) && !state.is_open(dest)) {
      return fail(PreconditionReason::destination_closed);
    }
    return {};
  }
  if (receptacle_only || !table.is_surface(dest)) {
    return fail(PreconditionReason::invalid_destination);
  }
  if (table.table_surface() != dest && has_on_child(table, state, dest)) {
    return fail(PreconditionReason::destination_occupied);
  }
  return {};
}

}  // namespace

const char* to_string(SkillName s) { return kSkillNames[static_cast<std::size_t>(s)]; }

std::optional<SkillName> parse_skill_name(std::string_view text) {
  for (std::size_t i = 0; i < kSkillNames.size(); ++i) {
    if (text == kSkillNames[i]) return static_cast<SkillName>(i);
  }
  return std::nullopt;
}

const std::vector<SkillTemplate>& skill_registry() {
  static const std::vector<SkillTemplate> registry = {
      {SkillName::pick_up, 1, {}, "pick up <object>"},
      {SkillName::place, 2, {"in", "on"}, "place <object> in|on <object>"},
      {SkillName::open, 1, {}, "open <object>"},
      {SkillName::close, 1, {}, "close <object>"},
      {SkillName::pour, 2, {"into", "onto"}, "pour <object> into|onto <object>"},
      {SkillName::wait, 0, {}, "wait"},
  };
  return registry;
}

const SkillTemplate& skill_template(SkillName s) {
  return skill_registry()[static_cast<std::size_t>(s)];
}

SkillInvocation make_invocation(SkillName skill, std::vector<std::string> args) {
  SkillInvocation inv;
  inv.skill = skill;
  inv.args = std::move(args);
  return inv;
}

const char* to_string(PreconditionReason r) {
  switch (r) {
    case PreconditionReason::ok: return "Ok";
    case PreconditionReason::not_visible: return "NotVisible";
    case PreconditionReason::nothing_held: return "NothingHeld";
    case PreconditionReason::hand_full: return "HandFull";
    case PreconditionReason::not_held: return "NotHeld";
    case PreconditionReason::is_fixture: return "IsFixture";
    case PreconditionReason::not_clear: return "ClearTop";
    case PreconditionReason::not_a_container: return "NotAContainer";
    case PreconditionReason::already_open: return "AlreadyOpen";
    case PreconditionReason::already_closed: return "AlreadyClosed";
    case PreconditionReason::invalid_destination: return "InvalidDestination";
    case PreconditionReason::destination_closed: return "DestinationClosed";
    case PreconditionReason::destination_occupied: return "DestinationOccupied";
  }
  return "Unknown";
}

Action bind(const ObjectTable& table, const SkillInvocation& inv) {
  const int arity = skill_template(inv.skill).arity;
  if (static_cast<int>(inv.args.size()) != arity) {
    throw Error(ErrorKind::precondition_violated,
                std::string(to_string(inv.skill)) + " expects " + std::to_string(arity) + " args");
  }
  Action action;
  action.skill = inv.skill;
  if (arity >= 1) action.a = static_cast<std::uint8_t>(table.index_of(inv.args[0]));
  if (arity >= 2) action.b = static_cast<std::uint8_t>(table.index_of(inv.args[1]));
  return action;
}

SkillInvocation unbind(const ObjectTable& table, const Action& action) {
  SkillInvocation inv;
  inv.skill = action.skill;
  if (action.a != kNoObject) inv.args.push_back(table[action.a].id);
  if (action.b != kNoObject) inv.args.push_back(table[action.b].id);
  return inv;
}

PreconditionResult check_precondition(const ObjectTable& table, const SceneState& state,
                                      const std::vector<bool>& visible, const Action& action) {
  const auto held = state.held_index();
  switch (action.skill) {
    case SkillName::pick_up: {
      if (held) return fail(PreconditionReason::hand_full);
      if (!visible[action.a]) return fail(PreconditionReason::not_visible);
      if (table.is_fixture(action.a)) return fail(PreconditionReason::is_fixture);
      if (has_on_child(table, state, action.a)) return fail(PreconditionReason::not_clear);
      return {};
    }
    case SkillName::place: {
      if (!held) return fail(PreconditionReason::nothing_held);
      if (*held != action.a) return fail(PreconditionReason::not_held);
      return check_destination(table, state, visible, action.a, action.b, false);
    }
    case SkillName::open:
    case SkillName::close: {
      if (!table.is_container(action.a)) return fail(PreconditionReason::not_a_container);
      if (!visible[action.a]) return fail(PreconditionReason::not_visible);
      const bool open = state.is_open(action.a);
      if (action.skill == SkillName::open && open) return fail(PreconditionReason::already_open);
      if (action.skill == SkillName::close && !open) return fail(PreconditionReason::already_closed);
      return {};
    }
    case SkillName::pour: {
      if (!held) return fail(PreconditionReason::nothing_held);
      if (*held != action.a) return fail(PreconditionReason::not_held);
      return check_destination(table, state, visible, action.a, action.b, true);
    }
    case SkillName::wait:
      return {};
  }
  return {};
}

SceneState apply_effect(const ObjectTable& table, const SceneState& state, const Action& action) {
  SceneState next = state;
  switch (action.skill) {
    case SkillName::pick_up:
      next.set_support(action.a, std::nullopt);
      next.held = action.a;
      break;
    case SkillName::place:
      next.held = kNoObject;
      next.set_support(action.a, Support{table.is_receptacle(action.b) ? RelationKind::in
                                                                        : RelationKind::on,
                                         action.b});
      break;
    case SkillName::open:
      next.set_open(action.a, true);
      break;
    case SkillName::close:
      next.set_open(action.a, false);
      break;
    case SkillName::pour:
      for (std::size_t i = 0; i < table.size(); ++i) {
        const auto s = state.support_of(i);
        if (s && s->kind == RelationKind::in && s->parent == action.a) {
          next.set_support(i, Support{RelationKind::in, action.b});
        }
      }
      break;
    case SkillName::wait:
      break;
  }
  return next;
}

PreconditionResult precondition(const Scene& scene, const SkillInvocation& inv) {
  const Action action = bind(scene.table(), inv);
  return check_precondition(scene.table(), scene.state(),
                            visibility_mask(scene.table(), scene.state()), action);
}

Scene effect(const Scene& scene, const SkillInvocation& inv) {
  const Action action = bind(scene.table(), inv);
  const auto check = check_precondition(scene.table(), scene.state(),
                                        visibility_mask(scene.table(), scene.state()), action);
  if (!check) {
    throw Error(ErrorKind::precondition_violated,
                std::string(to_string(inv.skill)) + ": " + to_string(check.reason));
  }
  return scene.with_state(apply_effect(scene.table(), scene.state(), action));
}

}  // namespace planbench
