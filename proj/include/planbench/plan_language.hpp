#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "planbench/scene.hpp"
#include "planbench/skills.hpp"

namespace planbench {

/// Ordered skill calls, optionally closed by a done token.
struct Plan {
  std::vector<SkillInvocation> steps;
  bool terminated = false;
  bool operator==(const Plan&) const = default;
};

struct DoneToken {
  bool operator==(const DoneToken&) const = default;
};

struct StructureError {
  std::string line;  // first offending line, verbatim
  std::string reason;
  bool operator==(const StructureError&) const = default;
};

struct EmptyResponse {
  bool operator==(const EmptyResponse&) const = default;
};

using StepParse = std::variant<SkillInvocation, DoneToken, StructureError>;
using ParseOutcome = std::variant<Plan, StructureError, EmptyResponse>;

using Vocabulary = std::span<const ObjectDescriptor>;

struct ObjectResolution {
  enum class Status { resolved, unresolved, ambiguous };
  Status status = Status::unresolved;
  std::string id;
  std::size_t candidates = 0;
};

/// Matches a noun phrase against descriptors by attributes only:
/// "<color> <noun|category>", "letter X", or a noun/category that is unique.
ObjectResolution resolve_object(std::string_view phrase, Vocabulary vocab);

/// Lowercase, trim, collapse whitespace, drop trailing punctuation.
std::string normalize_line(std::string_view line);

/// Accepted termination phrases, compared after normalization.
bool is_done_token(std::string_view normalized);

/// One plan line with its numbering already stripped.
StepParse parse_step(std::string_view line, Vocabulary vocab);

/// Extracts the numbered (or bulleted) list after a "Plan:" marker, falling
/// back to the first list in the response, and parses it up to the first done.
/// Total: never throws, whatever the input bytes.
ParseOutcome parse_plan(std::string_view response, Vocabulary vocab);

/// Canonical text, e.g. "place red block in blue bowl".
std::string format_invocation(const SkillInvocation& inv, Vocabulary vocab);
std::string format_invocation(const SkillInvocation& inv, const ObjectTable& table);
std::string format_action(const Action& action, const ObjectTable& table);

/// "1. <step>" lines followed by "N. done" when terminated.
std::string format_plan(const Plan& plan, const ObjectTable& table);

/// Phrases listed on an "Objects:" / "Visible objects:" inventory line, if any.
std::optional<std::vector<std::string>> parse_inventory(std::string_view response);

}  // namespace planbench
