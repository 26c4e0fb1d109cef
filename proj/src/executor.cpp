#include "planbench/executor.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "planbench/error.hpp"
#include "planbench/observe.hpp"
#include "planbench/render.hpp"

namespace planbench {

namespace {

std::vector<std::string> diff_lines(const Scene& before, const Scene& after) {
  std::vector<std::string> out;
  for (const auto& c : scene_diff(before, after)) out.push_back(c.describe());
  return out;
}

PlannerDecision decide(Planner& planner, const PlanningInput& in) {
  try {
    return planner.next(in);
  } catch (const Error& e) {
    PlannerDecision d;
    d.failure = DecisionFailure::backend_error;
    d.failure_reason = e.what();
    return d;
  }
}

TranscriptStep record(int t, const Observation& obs, const PlannerDecision& d, const Scene& scene,
                      const GoalSpec& goal) {
  TranscriptStep step;
  step.t = t;
  step.obs_digest = obs.digest();
  step.prompt_key = d.prompt_key;
  if (d.prompt_key) {
    step.response = d.raw_response;
    step.perception = check_inventory(d.raw_response, scene, goal);
  }
  step.decision = to_json(d);
  step.decision_failure = d.failure;
  return step;
}

std::string history_line(const PlannerDecision& d, const StepResult& r) {
  return r.ok() ? d.chosen_text : d.chosen_text + " (failed)";
}

Transcript start(const Episode& ep, LoopMode mode, const Planner& planner, const std::string& backend) {
  Transcript tr;
  tr.task_id = ep.task_id;
  tr.seed = ep.seed;
  tr.mode = mode;
  tr.planner = planner.name();
  tr.backend = backend;
  return tr;
}

void finish(Transcript& tr, const Simulator& sim, std::chrono::steady_clock::time_point began) {
  tr.step_count = sim.steps();
  if (tr.outcome != Outcome::success) tr.failure_class = classify_failure(tr);
  tr.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - began).count();
}

Observation look(const Scene& scene, const Planner& planner) { return observe(scene, planner.wants_images()); }

}  // namespace

const char* to_string(LoopMode m) { return m == LoopMode::closed ? "closed" : "open"; }

std::optional<LoopMode> parse_loop_mode(std::string_view text) {
  if (text == "closed") return LoopMode::closed;
  if (text == "open") return LoopMode::open;
  return std::nullopt;
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::success: return "Success";
    case Outcome::failure: return "Failure";
    case Outcome::timeout: return "Timeout";
  }
  return "Failure";
}

const char* to_string(FailureClass f) {
  switch (f) {
    case FailureClass::response_structure: return "ResponseStructure";
    case FailureClass::perception: return "Perception";
    case FailureClass::understanding: return "Understanding";
    case FailureClass::execution: return "Execution";
    case FailureClass::no_feasible_action: return "NoFeasibleAction";
    case FailureClass::timeout: return "Timeout";
  }
  return "Understanding";
}

PerceptionCheck check_inventory(const std::string& response, const Scene& scene, const GoalSpec& goal) {
  PerceptionCheck check;
  const auto phrases = parse_inventory(response);
  if (!phrases) return check;
  check.has_inventory = true;
  std::set<std::string> named;
  for (const auto& phrase : *phrases) {
    const auto r = resolve_object(phrase, scene.objects());
    if (r.status == ObjectResolution::Status::resolved) {
      named.insert(r.id);
    } else if (r.status == ObjectResolution::Status::unresolved) {
      check.unknown.push_back(phrase);
    }
  }
  const ObjectTable& table = scene.table();
  const auto visible = visibility_mask(table, scene.state());
  std::set<std::string> acted_on;
  const ParseOutcome parsed = parse_plan(response, scene.objects());
  if (const auto* plan = std::get_if<Plan>(&parsed)) {
    for (const auto& step : plan->steps) acted_on.insert(step.args.begin(), step.args.end());
  }
  for (const auto& id : goal.relevant) {
    const auto i = table.find(id);
    if (!i || named.count(id)) continue;
    if (visible[*i]) {
      check.missing.push_back(id);
      continue;
    }
    // A hidden object is accounted for when the plan works on the closed
    // container that hides it.
    std::optional<std::size_t> cover;
    for (std::size_t cur = *i, guard = 0; guard <= table.size(); ++guard) {
      const auto s = scene.support(cur);
      if (!s) break;
      if (s->kind == RelationKind::in && table.is_container(s->parent) && !scene.is_open(s->parent)) {
        cover = s->parent;
      }
      cur = s->parent;
    }
    if (!cover || !acted_on.count(table[*cover].id)) check.missing.push_back(id);
  }
  return check;
}

json Transcript::to_json() const {
  json steps_json = json::array();
  for (const auto& s : steps) {
    json j = {{"t", s.t},
              {"obs_digest", s.obs_digest},
              {"prompt_key", s.prompt_key ? json(*s.prompt_key) : json(nullptr)},
              {"response", s.response ? json(*s.response) : json(nullptr)},
              {"decision", s.decision},
              {"result", s.result ? planbench::to_json(*s.result) : json(nullptr)},
              {"diff", s.diff}};
    if (s.perception.has_inventory) {
      j["perception"] = {{"missing", s.perception.missing}, {"unknown", s.perception.unknown}};
    }
    steps_json.push_back(std::move(j));
  }
  json out = {{"schema_version", kTranscriptSchemaVersion},
              {"task_id", task_id},
              {"seed", seed},
              {"mode", planbench::to_string(mode)},
              {"planner", planner},
              {"backend", backend},
              {"steps", std::move(steps_json)},
              {"outcome", planbench::to_string(outcome)},
              {"failure_class", failure_class ? json(planbench::to_string(*failure_class)) : json(nullptr)},
              {"step_count", step_count}};
  if (error) out["error"] = *error;
  return out;
}

Transcript run_closed_loop(const Episode& episode, Planner& planner, const std::string& backend_name,
                           const ExecutorConfig& config) {
  const auto began = std::chrono::steady_clock::now();
  Transcript tr = start(episode, LoopMode::closed, planner, backend_name);
  Simulator sim(episode);
  std::vector<std::string> history;
  for (int t = 1;; ++t) {
    if (sim.steps() >= config.max_steps) {
      tr.outcome = goal_satisfied(sim.scene(), episode.goal) ? Outcome::success : Outcome::timeout;
      break;
    }
    const Observation obs = look(sim.scene(), planner);
    const PlannerDecision d = decide(planner, {obs, episode.goal, history, sim.scene()});
    tr.steps.push_back(record(t, obs, d, sim.scene(), episode.goal));
    if (d.failure != DecisionFailure::none) {
      tr.outcome = Outcome::failure;
      break;
    }
    if (d.chosen->done) {
      tr.outcome = goal_satisfied(sim.scene(), episode.goal) ? Outcome::success : Outcome::failure;
      break;
    }
    const Scene before = sim.scene();
    const StepResult r = sim.step(d.chosen->inv);
    tr.steps.back().result = r;
    tr.steps.back().diff = diff_lines(before, sim.scene());
    history.push_back(history_line(d, r));
    if (config.early_success && goal_satisfied(sim.scene(), episode.goal)) {
      tr.outcome = Outcome::success;
      break;
    }
  }
  finish(tr, sim, began);
  return tr;
}

Transcript run_open_loop(const Episode& episode, Planner& planner, const std::string& backend_name,
                         const ExecutorConfig& config) {
  if (!planner.plans_ahead()) {
    throw Error(ErrorKind::config_error, "open-loop execution needs a planner that returns full plans");
  }
  const auto began = std::chrono::steady_clock::now();
  Transcript tr = start(episode, LoopMode::open, planner, backend_name);
  Simulator sim(episode);
  const std::vector<std::string> history;
  const Observation first = look(sim.scene(), planner);
  const PlannerDecision d = decide(planner, {first, episode.goal, history, sim.scene()});
  tr.steps.push_back(record(1, first, d, sim.scene(), episode.goal));
  if (d.failure != DecisionFailure::none) {
    tr.outcome = Outcome::failure;
    finish(tr, sim, began);
    return tr;
  }
  const auto& steps = d.full_plan->steps;
  bool truncated = false;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (sim.steps() >= config.max_steps) {
      truncated = true;
      break;
    }
    if (k > 0) {
      TranscriptStep s;
      s.t = static_cast<int>(k) + 1;
      s.obs_digest = observe(sim.scene()).digest();
      s.decision = {{"chosen", format_invocation(steps[k], sim.scene().table())}, {"failure", nullptr}};
      tr.steps.push_back(std::move(s));
    }
    const Scene before = sim.scene();
    tr.steps.back().result = sim.step(steps[k]);
    tr.steps.back().diff = diff_lines(before, sim.scene());
  }
  const bool ok = goal_satisfied(sim.scene(), episode.goal);
  tr.outcome = ok ? Outcome::success : (truncated ? Outcome::timeout : Outcome::failure);
  finish(tr, sim, began);
  return tr;
}

FailureClass classify_failure(const Transcript& tr) {
  if (tr.outcome == Outcome::success) throw Error(ErrorKind::not_a_failure, tr.task_id);
  const auto any = [&](auto pred) { return std::any_of(tr.steps.begin(), tr.steps.end(), pred); };
  if (any([](const TranscriptStep& s) {
        return s.decision_failure == DecisionFailure::structure ||
               s.decision_failure == DecisionFailure::empty_response ||
               s.decision_failure == DecisionFailure::backend_error;
      })) {
    return FailureClass::response_structure;
  }
  if (any([](const TranscriptStep& s) { return !s.perception.missing.empty() || !s.perception.unknown.empty(); })) {
    return FailureClass::perception;
  }
  if (any([](const TranscriptStep& s) { return s.decision_failure == DecisionFailure::no_feasible_action; })) {
    return FailureClass::no_feasible_action;
  }
  int failed = 0;
  int execution = 0;
  for (const auto& s : tr.steps) {
    if (!s.result || s.result->ok()) continue;
    ++failed;
    if (s.result->status == StepStatus::execution_failed) ++execution;
  }
  if (failed > 0 && 2 * execution >= failed) return FailureClass::execution;
  return tr.outcome == Outcome::timeout ? FailureClass::timeout : FailureClass::understanding;
}

}  // namespace planbench
