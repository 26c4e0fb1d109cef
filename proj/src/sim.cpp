#include "planbench/sim.hpp"

#include "planbench/error.hpp"
#include "planbench/goal.hpp"

namespace planbench {

const char* to_string(StepStatus s) {
  switch (s) {
    case StepStatus::ok: return "Ok";
    case StepStatus::precondition_violated: return "PreconditionViolated";
    case StepStatus::execution_failed: return "ExecutionFailed";
    case StepStatus::unknown_object: return "UnknownObject";
  }
  return "Ok";
}

json to_json(const StepResult& r) {
  json j = {{"status", to_string(r.status)}};
  if (r.status == StepStatus::precondition_violated) j["reason"] = to_string(r.reason);
  if (!r.disturbances.empty()) j["disturbances"] = r.disturbances;
  return j;
}

Simulator::Simulator(const Episode& episode)
    : episode_(&episode),
      scene_(episode.scene),
      rng_(episode.rng_seed),
      fired_(episode.disturbances.size(), false) {}

StepResult Simulator::step(const SkillInvocation& inv) {
  StepResult result;
  ++steps_;
  const ObjectTable& table = scene_.table();
  std::optional<Action> action;
  try {
    action = bind(table, inv);
  } catch (const Error& e) {
    result.status = StepStatus::unknown_object;
  }
  if (action) {
    const auto check = check_precondition(table, scene_.state(), visibility_mask(table, scene_.state()), *action);
    if (!check) {
      result.status = StepStatus::precondition_violated;
      result.reason = check.reason;
    } else {
      const auto it = episode_->noise.find(inv.skill);
      const double p = it == episode_->noise.end() ? 0.0 : it->second;
      if (p > 0.0 && rng_.bernoulli(p)) {
        result.status = StepStatus::execution_failed;
      } else {
        scene_ = scene_.with_state(apply_effect(table, scene_.state(), *action));
      }
    }
  }
  for (std::size_t k = 0; k < episode_->disturbances.size(); ++k) {
    if (fired_[k]) continue;
    const auto& event = episode_->disturbances[k];
    const bool due = event.trigger.kind == DisturbanceTrigger::Kind::after_step
                         ? steps_ == event.trigger.step
                         : goal_expr_holds(event.trigger.condition, scene_);
    if (!due) continue;
    fired_[k] = true;
    apply(event.action, result);
  }
  const auto problems = validate(table, scene_.state());
  if (!problems.empty()) throw Error(ErrorKind::invariant_violation, problems.front());
  return result;
}

void Simulator::apply(const DisturbanceAction& action, StepResult& result) {
  const ObjectTable& table = scene_.table();
  SceneState state = scene_.state();
  std::string text;
  switch (action.kind) {
    case DisturbanceAction::Kind::none:
      text = "none";
      break;
    case DisturbanceAction::Kind::relocate: {
      const std::size_t obj = table.index_of(action.object);
      if (state.held == obj) state.held = kNoObject;
      state.set_support(obj, Support{action.relation, table.index_of(action.destination)});
      text = "Relocate(" + action.object + " -> " + action.destination + ")";
      break;
    }
    case DisturbanceAction::Kind::revert: {
      const std::size_t obj = table.index_of(action.object);
      if (state.held == obj) state.held = kNoObject;
      state.set_support(obj, episode_->scene.support(obj));
      text = "Revert(" + action.object + ")";
      break;
    }
    case DisturbanceAction::Kind::external_take: {
      const std::size_t obj = table.index_of(action.object);
      if (state.held != obj) {
        text = "ExternalTake(" + action.object + "): not held, nothing taken";
        break;
      }
      state.held = kNoObject;
      state.set_support(obj, Support{RelationKind::on, table.index_of(action.destination)});
      text = "ExternalTake(" + action.object + " -> " + action.destination + ")";
      break;
    }
  }
  if (validate(table, state).empty()) {
    scene_ = scene_.with_state(state);
  } else {
    text += " skipped: would break scene invariants";
  }
  result.disturbances.push_back(text);
}

}  // namespace planbench
