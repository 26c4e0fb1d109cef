#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "planbench/plan_language.hpp"
#include "planbench/scene.hpp"
#include "planbench/skills.hpp"

namespace planbench {

/// One option a scoring planner can pick: a skill call or the done token.
struct Candidate {
  bool done = false;
  SkillInvocation inv;

  static Candidate stop() { return Candidate{true, {}}; }
  static Candidate of(SkillInvocation inv) { return Candidate{false, std::move(inv)}; }
  bool operator==(const Candidate&) const = default;
};

/// Canonical text; "done" for the done token.
std::string candidate_text(const Candidate& c, Vocabulary vocab);

/// 1 iff the invocation binds to the scene and its precondition holds.
double gt_affordance(const Scene& scene, const SkillInvocation& inv);
/// Done is always feasible.
double gt_affordance(const Scene& scene, const Candidate& c);

struct AffordanceConfig {
  double false_negative_rate = 0.05;
  double false_positive_rate = 0.01;
  std::uint64_t seed = 0;

  /// Throws Error(config_error) unless both rates lie in [0, 1].
  void validate() const;
};

inline constexpr double kDetectorCeiling = 0.9;

/// Whether the emulated detector finds this object in this episode. The draw
/// depends only on (object id, episode seed, config seed), so it is frozen for
/// the whole episode whatever order objects are queried in.
bool detected(const std::string& object_id, const AffordanceConfig& cfg, std::uint64_t episode_seed);

/// 0 if any argument is hidden; 0.9 * FP if any argument names no object in
/// the scene; 0.9 if every argument is detected; 0 otherwise. Scores
/// visibility only, never full preconditions.
double detector_affordance(const Scene& scene, const SkillInvocation& inv, const AffordanceConfig& cfg,
                           std::uint64_t episode_seed);
double detector_affordance(const Scene& scene, const Candidate& c, const AffordanceConfig& cfg,
                           std::uint64_t episode_seed);

}  // namespace planbench
