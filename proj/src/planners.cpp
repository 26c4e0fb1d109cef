#include "planbench/planners.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "planbench/digest.hpp"
#include "planbench/error.hpp"
#include "planbench/prompt_text.hpp"
#include "planbench/rng.hpp"

namespace planbench {

namespace {

const char* kResponseContract =
    "Reply with the Objects: line, then Plan: and the numbered remaining steps, ending with done.";

std::string join_lines(const std::vector<std::string>& lines) {
  if (lines.empty()) return "none\n";
  std::ostringstream out;
  for (std::size_t i = 0; i < lines.size(); ++i) out << i + 1 << ". " << lines[i] << "\n";
  return out.str();
}

std::vector<ObjectDescriptor> merge_by_id(const std::vector<ObjectDescriptor>& first,
                                          const std::vector<ObjectDescriptor>& second) {
  std::map<std::string, ObjectDescriptor> by_id;
  for (const auto& d : first) by_id.emplace(d.id, d);
  for (const auto& d : second) by_id.emplace(d.id, d);
  std::vector<ObjectDescriptor> out;
  for (auto& [id, d] : by_id) out.push_back(std::move(d));
  return out;
}

bool is_receptacle(const ObjectDescriptor& d) {
  return d.category == Category::bowl || d.category == Category::container;
}

bool is_surface(const ObjectDescriptor& d) {
  return (d.category == Category::fixture && d.display_noun() != "person") || d.category == Category::block ||
         d.category == Category::misc;
}

bool is_pickable(const ObjectDescriptor& d) {
  return d.category == Category::block || d.category == Category::letter || d.category == Category::misc ||
         d.category == Category::container;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::vector<std::string> tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.size() > 3 && cur.back() == 's' && cur[cur.size() - 2] != 's') cur.pop_back();
    if (!cur.empty()) out.push_back(cur);
    cur.clear();
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

const std::set<std::string>& stop_words() {
  static const std::set<std::string> words = {"the", "a",    "an",   "in",   "on",    "into", "onto",
                                              "of",  "to",   "all",  "and",  "with",  "up",   "put",
                                              "pick", "place", "pour", "from", "is",   "it",   "that"};
  return words;
}

PlannerDecision failure(DecisionFailure kind, std::string reason, std::string line = "") {
  PlannerDecision d;
  d.failure = kind;
  d.failure_reason = std::move(reason);
  d.failure_line = std::move(line);
  return d;
}

PlannerDecision ask(Backend& backend, const PromptSpec& prompt, const std::string& model,
                    std::shared_ptr<const SimAttachment> attachment, Vocabulary vocab) {
  ChatRequest req = prompt.to_request(model);
  req.attachment = std::move(attachment);
  const std::string key = cache_key(req);
  PlannerDecision d = decide_from_response(backend.complete(req), vocab);
  d.prompt_key = key;
  return d;
}

}  // namespace

const char* to_string(ObservationMode m) {
  switch (m) {
    case ObservationMode::image: return "image";
    case ObservationMode::scene_text: return "scene_text";
    case ObservationMode::none: return "none";
  }
  return "none";
}

const char* to_string(DecisionFailure f) {
  switch (f) {
    case DecisionFailure::none: return "None";
    case DecisionFailure::structure: return "StructureError";
    case DecisionFailure::empty_response: return "EmptyResponse";
    case DecisionFailure::no_feasible_action: return "NoFeasibleAction";
    case DecisionFailure::backend_error: return "BackendError";
  }
  return "None";
}

json PromptSpec::to_json() const {
  json j = {{"prompt_version", prompt_version},
            {"system", system_preamble},
            {"instruction", instruction},
            {"history", history},
            {"observation_mode", planbench::to_string(observation_mode)},
            {"response_contract", response_contract}};
  j["image_sha256"] = image ? json(sha256_hex(*image)) : json(nullptr);
  j["scene_text"] = observation_mode == ObservationMode::scene_text ? json(scene_text) : json(nullptr);
  j["goal_image_sha256"] = goal_image ? json(sha256_hex(*goal_image)) : json(nullptr);
  return j;
}

ChatRequest PromptSpec::to_request(const std::string& model) const {
  ChatRequest req;
  req.model = model;
  req.messages.push_back({"system", {TextPart{system_preamble}}});
  ChatMessage user{"user", {}};
  user.parts.push_back(TextPart{"Instruction: " + instruction + "\nSteps finished so far:\n" + join_lines(history)});
  if (observation_mode == ObservationMode::image && image) {
    user.parts.push_back(TextPart{"Current view:"});
    user.parts.push_back(ImagePart{*image});
  } else if (observation_mode == ObservationMode::scene_text) {
    user.parts.push_back(TextPart{"Current scene:\n" + scene_text});
  }
  if (goal_image) {
    user.parts.push_back(TextPart{"Goal image, possibly drawn in a different style:"});
    user.parts.push_back(ImagePart{*goal_image});
  }
  user.parts.push_back(TextPart{response_contract});
  req.messages.push_back(std::move(user));
  return req;
}

PromptSpec build_prompt(const Observation& obs, const GoalSpec& goal, const std::vector<std::string>& history,
                        ObservationMode mode) {
  PromptSpec p;
  p.system_preamble = prompts::kSystemPrompt;
  p.prompt_version = prompts::kSystemPromptVersion;
  p.instruction = goal.instruction;
  p.history = history;
  p.observation_mode = mode;
  if (mode == ObservationMode::image) {
    if (!obs.image) throw Error(ErrorKind::config_error, "image prompt needs an observation image");
    p.image = obs.image;
  }
  if (mode == ObservationMode::scene_text) p.scene_text = obs.text;
  if (goal.mode != GoalMode::language) p.goal_image = goal.goal_image;
  p.response_contract = kResponseContract;
  return p;
}

json to_json(const PlannerDecision& d) {
  json j;
  j["chosen"] = d.chosen ? json(d.chosen_text) : json(nullptr);
  if (d.failure == DecisionFailure::none) {
    j["failure"] = nullptr;
  } else {
    j["failure"] = {{"kind", to_string(d.failure)}, {"reason", d.failure_reason}, {"line", d.failure_line}};
  }
  if (d.full_plan) j["plan_length"] = d.full_plan->steps.size();
  if (d.candidate_scores) {
    json scores = json::array();
    for (const auto& s : *d.candidate_scores) {
      scores.push_back({{"text", s.text}, {"lm", s.lm}, {"affordance", s.affordance}, {"product", s.product}});
    }
    j["candidate_scores"] = std::move(scores);
  }
  return j;
}

std::vector<ObjectDescriptor> planning_vocabulary(const Observation& obs, const GoalSpec& goal) {
  return merge_by_id(obs.visible, goal.mentioned);
}

PlannerDecision decide_from_response(std::string response, Vocabulary vocab) {
  ParseOutcome outcome = parse_plan(response, vocab);
  PlannerDecision d;
  if (const auto* err = std::get_if<StructureError>(&outcome)) {
    d = failure(DecisionFailure::structure, err->reason, err->line);
  } else if (std::holds_alternative<EmptyResponse>(outcome)) {
    d = failure(DecisionFailure::empty_response, "no plan list in the response");
  } else {
    Plan plan = std::get<Plan>(std::move(outcome));
    if (plan.steps.empty()) {
      d.chosen = Candidate::stop();
      d.chosen_text = "done";
    } else {
      d.chosen = Candidate::of(plan.steps.front());
      d.chosen_text = format_invocation(plan.steps.front(), vocab);
    }
    d.full_plan = std::move(plan);
  }
  d.raw_response = std::move(response);
  return d;
}

PlannerDecision vila_next(Backend& backend, const Observation& obs, const GoalSpec& goal,
                          const std::vector<std::string>& history, const std::string& model,
                          std::shared_ptr<const SimAttachment> attachment) {
  const ObservationMode mode =
      backend.wants_images() && obs.image ? ObservationMode::image : ObservationMode::scene_text;
  const auto vocab = planning_vocabulary(obs, goal);
  return ask(backend, build_prompt(obs, goal, history, mode), model, std::move(attachment), vocab);
}

const std::vector<ObjectDescriptor>& imagined_vocabulary() {
  static const std::vector<ObjectDescriptor> vocab = [] {
    std::vector<ObjectDescriptor> out;
    for (Color c : kPalette) {
      out.push_back({std::string("block_") + to_string(c), Category::block, c, std::nullopt, Size::medium, "", {}});
      out.push_back({std::string("bowl_") + to_string(c), Category::bowl, c, std::nullopt, Size::medium, "", {}});
    }
    for (char g = 'A'; g <= 'Z'; ++g) {
      out.push_back({std::string("letter_") + static_cast<char>(std::tolower(g)), Category::letter, Color::gray, g,
                     Size::medium, "", {}});
    }
    return out;
  }();
  return vocab;
}

PlannerDecision llm_only_next(Backend& backend, const GoalSpec& goal, const std::vector<std::string>& history,
                              const std::optional<std::string>& scene_text, const std::string& model,
                              std::shared_ptr<const SimAttachment> attachment, Vocabulary visible) {
  Observation obs;
  obs.text = scene_text.value_or("");
  const ObservationMode mode = scene_text ? ObservationMode::scene_text : ObservationMode::none;
  const std::vector<ObjectDescriptor> base =
      scene_text ? std::vector<ObjectDescriptor>(visible.begin(), visible.end()) : imagined_vocabulary();
  const auto vocab = merge_by_id(goal.mentioned, base);
  return ask(backend, build_prompt(obs, goal, history, mode), model, std::move(attachment), vocab);
}

std::vector<Candidate> enumerate_candidates(const Observation& obs, const std::vector<ObjectDescriptor>& extra) {
  const auto objects = merge_by_id(obs.visible, extra);
  std::vector<Candidate> out;
  const ObjectDescriptor* held = nullptr;
  for (const auto& d : objects) {
    if (obs.held && d.id == *obs.held) held = &d;
  }
  if (!obs.held) {
    for (const auto& d : objects) {
      if (is_pickable(d)) out.push_back(Candidate::of(make_invocation(SkillName::pick_up, {d.id})));
    }
  } else if (held) {
    for (const auto& d : objects) {
      if (d.id != held->id && (is_receptacle(d) || is_surface(d))) {
        out.push_back(Candidate::of(make_invocation(SkillName::place, {held->id, d.id})));
      }
    }
    if (is_receptacle(*held)) {
      for (const auto& d : objects) {
        if (d.id != held->id && is_receptacle(d)) {
          out.push_back(Candidate::of(make_invocation(SkillName::pour, {held->id, d.id})));
        }
      }
    }
  }
  for (const auto& d : objects) {
    if (d.category == Category::container) {
      out.push_back(Candidate::of(make_invocation(SkillName::open, {d.id})));
      out.push_back(Candidate::of(make_invocation(SkillName::close, {d.id})));
    }
  }
  out.push_back(Candidate::of(make_invocation(SkillName::wait)));
  out.push_back(Candidate::stop());
  return out;
}

std::vector<double> heuristic_lm_scores(const std::vector<std::string>& candidates, const std::string& instruction,
                                        const std::vector<std::string>& history) {
  const auto instruction_tokens = tokens(instruction);
  const std::set<std::string> wanted(instruction_tokens.begin(), instruction_tokens.end());
  std::set<std::string> placed;  // phrases the history already put somewhere
  for (const auto& line : history) {
    if (line.size() >= 8 && line.ends_with("(failed)")) continue;
    if (!line.starts_with("place ")) continue;
    for (const char* prep : {" in ", " on "}) {
      const auto at = line.find(prep);
      if (at != std::string::npos) {
        placed.insert(line.substr(6, at - 6));
        break;
      }
    }
  }
  std::vector<double> raw;
  for (const auto& text : candidates) {
    if (text == "done") {
      raw.push_back(kLmDone);
      continue;
    }
    std::set<std::string> content;
    for (const auto& t : tokens(text)) {
      if (!stop_words().count(t)) content.insert(t);
    }
    double score = kLmBase;
    for (const auto& t : content) {
      if (wanted.count(t)) score += 1.0;
    }
    if (text.starts_with("pick up ") && placed.count(text.substr(8))) score *= kLmRepeatPenalty;
    raw.push_back(score);
  }
  double total = 0;
  for (double r : raw) total += r;
  for (double& r : raw) r = total > 0 ? r / total : 0.0;
  return raw;
}

PlannerDecision saycan_next(const LmScorer& lm, const AffordanceFn& affordance, const Observation& obs,
                            const GoalSpec& goal, const std::vector<std::string>& history) {
  const auto vocab = planning_vocabulary(obs, goal);
  const auto candidates = enumerate_candidates(obs, goal.mentioned);
  std::vector<std::string> texts;
  for (const auto& c : candidates) texts.push_back(candidate_text(c, vocab));
  const auto lm_scores = lm(texts, goal.instruction, history);
  std::vector<CandidateScore> scores;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double a = affordance(candidates[i]);
    scores.push_back({texts[i], lm_scores[i], a, lm_scores[i] * a});
    if (scores.back().product > 0 && (!best || scores.back().product > scores[*best].product)) best = i;
  }
  PlannerDecision d;
  if (!best) {
    d = failure(DecisionFailure::no_feasible_action, "every candidate has zero score");
  } else {
    d.chosen = candidates[*best];
    d.chosen_text = texts[*best];
  }
  d.candidate_scores = std::move(scores);
  return d;
}

TokenScorer trie_token_scorer(const std::vector<std::string>& candidates, const std::vector<double>& masses) {
  std::vector<std::vector<std::string>> words;
  for (const auto& c : candidates) words.push_back(split_words(c));
  return [words, masses](const std::vector<std::string>& prefix, const std::vector<std::string>& next) {
    auto mass_of = [&](const std::vector<std::string>& p, bool exact) {
      double m = 0;
      for (std::size_t k = 0; k < words.size(); ++k) {
        const auto& w = words[k];
        if (w.size() < p.size() || (exact && w.size() != p.size())) continue;
        if (std::equal(p.begin(), p.end(), w.begin())) m += masses[k];
      }
      return m;
    };
    const double total = mass_of(prefix, false);
    std::vector<double> out;
    for (const auto& w : next) {
      if (total <= 0) {
        out.push_back(1.0 / static_cast<double>(next.size()));
        continue;
      }
      if (w == kEndOfStep) {
        out.push_back(mass_of(prefix, true) / total);
      } else {
        auto longer = prefix;
        longer.push_back(w);
        out.push_back(mass_of(longer, false) / total);
      }
    }
    return out;
  };
}

PlannerDecision gd_search(const std::vector<Candidate>& candidates, const std::vector<std::string>& texts,
                          const TokenScorer& lm, const AffordanceFn& grounding, int beam_width) {
  struct Beam {
    std::vector<std::string> words;
    double lm = 1.0;
    double score = 1.0;
    std::size_t order = 0;  // first candidate under this prefix
    bool finished = false;
  };
  std::vector<std::vector<std::string>> words;
  std::vector<double> ground;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    words.push_back(split_words(texts[k]));
    ground.push_back(grounding(candidates[k]));
  }
  auto under = [&](const std::vector<std::string>& prefix) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < words.size(); ++k) {
      if (words[k].size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), words[k].begin())) {
        out.push_back(k);
      }
    }
    return out;
  };

  std::vector<Beam> beams = {Beam{}};
  const std::size_t width = static_cast<std::size_t>(std::max(1, beam_width));
  while (!std::all_of(beams.begin(), beams.end(), [](const Beam& b) { return b.finished; })) {
    std::vector<Beam> next;
    for (const Beam& beam : beams) {
      if (beam.finished) {
        next.push_back(beam);
        continue;
      }
      std::vector<std::string> children;
      std::vector<std::size_t> child_order;
      for (std::size_t k : under(beam.words)) {
        const std::string w = words[k].size() == beam.words.size() ? kEndOfStep : words[k][beam.words.size()];
        if (std::find(children.begin(), children.end(), w) == children.end()) {
          children.push_back(w);
          child_order.push_back(k);
        }
      }
      const auto probs = lm(beam.words, children);
      for (std::size_t c = 0; c < children.size(); ++c) {
        Beam child;
        child.words = beam.words;
        child.order = child_order[c];
        child.lm = beam.lm * probs[c];
        double g = 0;
        if (children[c] == kEndOfStep) {
          child.finished = true;
          g = ground[child_order[c]];
        } else {
          child.words.push_back(children[c]);
          for (std::size_t k : under(child.words)) g = std::max(g, ground[k]);
        }
        child.score = child.lm * g;
        if (child.score > 0) next.push_back(std::move(child));
      }
    }
    std::stable_sort(next.begin(), next.end(), [](const Beam& l, const Beam& r) {
      if (l.score != r.score) return l.score > r.score;
      return l.order < r.order;
    });
    if (next.size() > width) next.resize(width);
    beams = std::move(next);
    if (beams.empty()) break;
  }

  std::vector<CandidateScore> scores;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    scores.push_back({texts[k], 0.0, ground[k], 0.0});
  }
  PlannerDecision d;
  if (beams.empty()) {
    d = failure(DecisionFailure::no_feasible_action, "every beam has zero score");
  } else {
    d.chosen = candidates[beams.front().order];
    d.chosen_text = texts[beams.front().order];
  }
  d.candidate_scores = std::move(scores);
  return d;
}

PlannerDecision gd_next(const LmScorer& lm, const AffordanceFn& grounding, const Observation& obs,
                        const GoalSpec& goal, const std::vector<std::string>& history, int beam_width) {
  const auto vocab = planning_vocabulary(obs, goal);
  const auto candidates = enumerate_candidates(obs, goal.mentioned);
  std::vector<std::string> texts;
  for (const auto& c : candidates) texts.push_back(candidate_text(c, vocab));
  const auto masses = lm(texts, goal.instruction, history);
  PlannerDecision d = gd_search(candidates, texts, trie_token_scorer(texts, masses), grounding, beam_width);
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    auto& s = (*d.candidate_scores)[k];
    s.lm = masses[k];
    s.product = masses[k] * s.affordance;
  }
  return d;
}

namespace {

class VilaPlanner : public Planner {
 public:
  VilaPlanner(std::shared_ptr<Backend> backend, std::string model)
      : backend_(std::move(backend)), model_(std::move(model)), memo_(std::make_shared<OracleMemo>()) {}
  std::string name() const override { return "vila"; }
  bool plans_ahead() const override { return true; }
  bool wants_images() const override { return backend_->wants_images(); }
  PlannerDecision next(const PlanningInput& in) override {
    auto sim = std::make_shared<SimAttachment>(SimAttachment{in.scene, in.goal, memo_});
    return vila_next(*backend_, in.observation, in.goal, in.history, model_, sim);
  }

 private:
  std::shared_ptr<Backend> backend_;
  std::string model_;
  std::shared_ptr<OracleMemo> memo_;
};

class LlmPlanner : public Planner {
 public:
  LlmPlanner(std::shared_ptr<Backend> backend, std::string model, bool scene_text)
      : backend_(std::move(backend)),
        model_(std::move(model)),
        scene_text_(scene_text),
        memo_(std::make_shared<OracleMemo>()) {}
  std::string name() const override { return "llm"; }
  bool plans_ahead() const override { return true; }
  PlannerDecision next(const PlanningInput& in) override {
    auto sim = std::make_shared<SimAttachment>(SimAttachment{in.scene, in.goal, memo_});
    const auto text = scene_text_ ? std::optional<std::string>(in.observation.text) : std::nullopt;
    return llm_only_next(*backend_, in.goal, in.history, text, model_, sim, in.observation.visible);
  }

 private:
  std::shared_ptr<Backend> backend_;
  std::string model_;
  bool scene_text_;
  std::shared_ptr<OracleMemo> memo_;
};

class ScoringPlanner : public Planner {
 public:
  ScoringPlanner(PlannerSpec spec, std::uint64_t episode_seed)
      : spec_(std::move(spec)), episode_seed_(episode_seed) {
    spec_.detector.validate();
  }
  std::string name() const override { return spec_.kind; }
  PlannerDecision next(const PlanningInput& in) override {
    AffordanceFn affordance = [&](const Candidate& c) {
      return spec_.affordance == "detector" ? detector_affordance(in.scene, c, spec_.detector, episode_seed_)
                                            : gt_affordance(in.scene, c);
    };
    if (spec_.kind == "gd") {
      return gd_next(heuristic_lm_scores, affordance, in.observation, in.goal, in.history, spec_.beam_width);
    }
    return saycan_next(heuristic_lm_scores, affordance, in.observation, in.goal, in.history);
  }

 private:
  PlannerSpec spec_;
  std::uint64_t episode_seed_;
};

}  // namespace

std::unique_ptr<Planner> make_planner(const PlannerSpec& spec, std::shared_ptr<Backend> backend,
                                      const Episode& episode) {
  if (spec.kind == "vila") return std::make_unique<VilaPlanner>(std::move(backend), spec.model);
  if (spec.kind == "llm") return std::make_unique<LlmPlanner>(std::move(backend), spec.model, spec.llm_scene_text);
  if (spec.kind == "saycan" || spec.kind == "gd") {
    if (spec.affordance != "gt" && spec.affordance != "detector") {
      throw Error(ErrorKind::config_error, "unknown affordance " + spec.affordance);
    }
    return std::make_unique<ScoringPlanner>(spec, derive_seed("episode/" + episode.task_id, episode.seed));
  }
  throw Error(ErrorKind::config_error, "unknown planner " + spec.kind);
}

}  // namespace planbench
