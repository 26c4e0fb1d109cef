#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "planbench/goal.hpp"
#include "planbench/scene.hpp"
#include "planbench/skills.hpp"

namespace planbench {

enum class Suite : std::uint8_t { blocks_bowls, letters, feedback, image_goal };
enum class Split : std::uint8_t { seen, unseen };

const char* to_string(Suite s);
const char* to_string(Split s);
std::optional<Suite> parse_suite(std::string_view text);

struct TaskSpec {
  std::string id;
  Suite suite = Suite::blocks_bowls;
  Split split = Split::seen;
  std::string instruction_template;
  json params;  // generator parameters, declared per task
};

/// Registry order: 16 benchmark tasks, 4 feedback tasks, 2 image-goal tasks.
const std::vector<TaskSpec>& task_registry();
/// Throws Error(unknown_task).
const TaskSpec& find_task(std::string_view id);
std::vector<std::string> benchmark_task_ids();
std::vector<std::string> tasks_in_suite(Suite s);
json registry_json();

struct DisturbanceTrigger {
  enum class Kind : std::uint8_t { after_step, on_condition };
  Kind kind = Kind::after_step;
  int step = 0;          // after_step: fires once the k-th step has executed
  GoalExpr condition;    // on_condition: fires the first time this holds after a step
};

struct DisturbanceAction {
  enum class Kind : std::uint8_t { none, relocate, revert, external_take };
  Kind kind = Kind::none;
  std::string object;
  std::string destination;  // relocate: new supporter; external_take: the receiver
  RelationKind relation = RelationKind::on;
};

struct DisturbanceEvent {
  DisturbanceTrigger trigger;
  DisturbanceAction action;
};

struct Episode {
  std::string task_id;
  std::uint64_t seed = 0;
  Scene scene;
  GoalSpec goal;
  std::vector<DisturbanceEvent> disturbances;
  std::map<SkillName, double> noise;  // per-skill failure probability
  std::uint64_t rng_seed = 0;
};

inline constexpr int kGenerationRetries = 100;

/// Deterministic in (task_id, seed). Every returned episode is solvable by the
/// oracle and not already solved. Throws Error(unknown_task) or
/// Error(generation_failed).
Episode generate_episode(std::string_view task_id, std::uint64_t seed);

/// The four feedback families for one seed, in registry order.
std::vector<Episode> feedback_scenarios(std::uint64_t seed);

/// Sets the failure probability of pick_up and place.
void set_manipulation_noise(Episode& episode, double p);

json to_json(const DisturbanceEvent& e);
DisturbanceEvent disturbance_from_json(const json& j);
json to_json(const Episode& e);
Episode episode_from_json(const json& j);

}  // namespace planbench
