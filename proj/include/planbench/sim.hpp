#pragma once

#include <string>
#include <vector>

#include "planbench/rng.hpp"
#include "planbench/scene.hpp"
#include "planbench/skills.hpp"
#include "planbench/tasks.hpp"

namespace planbench {

enum class StepStatus : std::uint8_t { ok, precondition_violated, execution_failed, unknown_object };
const char* to_string(StepStatus s);

struct StepResult {
  StepStatus status = StepStatus::ok;
  PreconditionReason reason = PreconditionReason::ok;
  std::vector<std::string> disturbances;  // applied events, readable

  bool ok() const { return status == StepStatus::ok; }
};

json to_json(const StepResult& r);

/// One episode advancing step by step. Every step counts towards AfterStep
/// triggers, whether or not the skill succeeded.
class Simulator {
 public:
  explicit Simulator(const Episode& episode);

  const Scene& scene() const { return scene_; }
  int steps() const { return steps_; }

  /// Executes one invocation, then fires due disturbances. Throws
  /// Error(invariant_violation) if the resulting scene is invalid.
  StepResult step(const SkillInvocation& inv);

 private:
  void apply(const DisturbanceAction& action, StepResult& result);

  const Episode* episode_;
  Scene scene_;
  Rng rng_;
  int steps_ = 0;
  std::vector<bool> fired_;
};

}  // namespace planbench
