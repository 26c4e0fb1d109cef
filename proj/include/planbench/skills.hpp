#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "planbench/scene.hpp"

namespace planbench {

enum class SkillName : std::uint8_t { pick_up, place, open, close, pour, wait };

const char* to_string(SkillName s);
std::optional<SkillName> parse_skill_name(std::string_view text);

struct SkillTemplate {
  SkillName name;
  int arity;
  std::vector<std::string> prepositions;
  std::string text_form;  // e.g. "place <object> in|on <object>"
};

/// The six primitive skills: five manipulation skills and `wait`.
const std::vector<SkillTemplate>& skill_registry();
const SkillTemplate& skill_template(SkillName s);

/// One primitive-skill call. Equality compares the skill and the resolved
/// argument ids; the original phrases are provenance only.
struct SkillInvocation {
  SkillName skill = SkillName::wait;
  std::vector<std::string> args;
  std::vector<std::string> raw_phrases;

  bool operator==(const SkillInvocation& other) const {
    return skill == other.skill && args == other.args;
  }
};

SkillInvocation make_invocation(SkillName skill, std::vector<std::string> args = {});

enum class PreconditionReason : std::uint8_t {
  ok,
  not_visible,
  nothing_held,
  hand_full,
  not_held,
  is_fixture,
  not_clear,
  not_a_container,
  already_open,
  already_closed,
  invalid_destination,
  destination_closed,
  destination_occupied,
};

const char* to_string(PreconditionReason r);

struct PreconditionResult {
  bool ok = true;
  PreconditionReason reason = PreconditionReason::ok;
  explicit operator bool() const { return ok; }
};

/// Index-level invocation used by search; kNoObject marks unused slots.
struct Action {
  SkillName skill = SkillName::wait;
  std::uint8_t a = kNoObject;
  std::uint8_t b = kNoObject;
  bool operator==(const Action&) const = default;
};

/// Throws Error(unknown_object) for an absent id and Error(precondition_violated)
/// on an arity mismatch.
Action bind(const ObjectTable& table, const SkillInvocation& inv);
SkillInvocation unbind(const ObjectTable& table, const Action& action);

PreconditionResult check_precondition(const ObjectTable& table, const SceneState& state,
                                      const std::vector<bool>& visible, const Action& action);
/// Applies the effect without checking the precondition.
SceneState apply_effect(const ObjectTable& table, const SceneState& state, const Action& action);

PreconditionResult precondition(const Scene& scene, const SkillInvocation& inv);
/// Throws Error(precondition_violated) when the precondition fails.
Scene effect(const Scene& scene, const SkillInvocation& inv);

}  // namespace planbench
