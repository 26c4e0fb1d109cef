#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "planbench/planners.hpp"
#include "planbench/sim.hpp"
#include "planbench/tasks.hpp"

namespace planbench {

inline constexpr int kTranscriptSchemaVersion = 1;
inline constexpr int kDefaultMaxSteps = 20;

enum class LoopMode : std::uint8_t { closed, open };
enum class Outcome : std::uint8_t { success, failure, timeout };
enum class FailureClass : std::uint8_t {
  response_structure,
  perception,
  understanding,
  execution,
  no_feasible_action,
  timeout,
};

const char* to_string(LoopMode m);
const char* to_string(Outcome o);
const char* to_string(FailureClass f);
std::optional<LoopMode> parse_loop_mode(std::string_view text);

/// Inventory line of a response checked against the true scene.
struct PerceptionCheck {
  bool has_inventory = false;
  /// Task-relevant ids left out: visible ones, and hidden ones whose closed
  /// container the plan never touches.
  std::vector<std::string> missing;
  std::vector<std::string> unknown;  // listed phrases that name no object
};

PerceptionCheck check_inventory(const std::string& response, const Scene& scene, const GoalSpec& goal);

struct TranscriptStep {
  int t = 0;
  std::string obs_digest;
  std::optional<std::string> prompt_key;
  std::optional<std::string> response;
  json decision;
  DecisionFailure decision_failure = DecisionFailure::none;
  std::optional<StepResult> result;  // absent when nothing was executed
  std::vector<std::string> diff;
  PerceptionCheck perception;
};

struct Transcript {
  std::string task_id;
  std::uint64_t seed = 0;
  LoopMode mode = LoopMode::closed;
  std::string planner;
  std::string backend;
  std::vector<TranscriptStep> steps;
  Outcome outcome = Outcome::failure;
  std::optional<FailureClass> failure_class;
  int step_count = 0;
  std::optional<std::string> error;  // episode aborted by a library error
  double wall_time = 0;  // seconds; kept out of the JSON so replays compare byte for byte

  json to_json() const;
};

struct ExecutorConfig {
  int max_steps = kDefaultMaxSteps;
  bool early_success = false;
};

/// Observe, plan the next step, execute it, repeat until the planner says done
/// or max_steps skills have run. Failed steps enter the history marked
/// "(failed)". Never throws for planner or backend failures.
Transcript run_closed_loop(const Episode& episode, Planner& planner, const std::string& backend_name,
                           const ExecutorConfig& config = {});

/// One planning call on the first observation, then every step in order.
/// Throws Error(config_error) if the planner cannot produce full plans.
Transcript run_open_loop(const Episode& episode, Planner& planner, const std::string& backend_name,
                         const ExecutorConfig& config = {});

/// ResponseStructure > Perception > NoFeasibleAction > Execution (at least
/// half the failed steps were execution failures) > Understanding, with
/// Timeout in place of Understanding for timed-out episodes.
/// Throws Error(not_a_failure) for a successful transcript.
FailureClass classify_failure(const Transcript& transcript);

}  // namespace planbench
