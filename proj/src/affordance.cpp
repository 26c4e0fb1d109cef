#include "planbench/affordance.hpp"

#include "planbench/error.hpp"
#include "planbench/rng.hpp"

namespace planbench {

std::string candidate_text(const Candidate& c, Vocabulary vocab) {
  return c.done ? "done" : format_invocation(c.inv, vocab);
}

double gt_affordance(const Scene& scene, const SkillInvocation& inv) {
  for (const auto& id : inv.args) {
    if (!scene.table().find(id)) return 0.0;
  }
  try {
    return precondition(scene, inv) ? 1.0 : 0.0;
  } catch (const Error&) {
    return 0.0;
  }
}

double gt_affordance(const Scene& scene, const Candidate& c) {
  return c.done ? 1.0 : gt_affordance(scene, c.inv);
}

void AffordanceConfig::validate() const {
  if (!(false_negative_rate >= 0.0 && false_negative_rate <= 1.0) ||
      !(false_positive_rate >= 0.0 && false_positive_rate <= 1.0)) {
    throw Error(ErrorKind::config_error, "detector rates must lie in [0, 1]");
  }
}

bool detected(const std::string& object_id, const AffordanceConfig& cfg, std::uint64_t episode_seed) {
  Rng rng(derive_seed("detector/" + object_id, episode_seed ^ splitmix64(cfg.seed)));
  return rng.next_double() >= cfg.false_negative_rate;
}

double detector_affordance(const Scene& scene, const SkillInvocation& inv, const AffordanceConfig& cfg,
                           std::uint64_t episode_seed) {
  const auto visible = visibility_mask(scene.table(), scene.state());
  bool unknown = false;
  bool all_detected = true;
  for (const auto& id : inv.args) {
    const auto i = scene.table().find(id);
    if (!i) {
      unknown = true;
      continue;
    }
    if (!visible[*i]) return 0.0;
    if (!detected(id, cfg, episode_seed)) all_detected = false;
  }
  if (unknown) return kDetectorCeiling * cfg.false_positive_rate;
  return all_detected ? kDetectorCeiling : 0.0;
}

double detector_affordance(const Scene& scene, const Candidate& c, const AffordanceConfig& cfg,
                           std::uint64_t episode_seed) {
  return c.done ? 1.0 : detector_affordance(scene, c.inv, cfg, episode_seed);
}

}  // namespace planbench
