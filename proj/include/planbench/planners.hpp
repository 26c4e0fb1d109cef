#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "planbench/affordance.hpp"
#include "planbench/goal.hpp"
#include "planbench/observe.hpp"
#include "planbench/plan_language.hpp"
#include "planbench/tasks.hpp"
#include "planbench/vlm_client.hpp"

namespace planbench {

enum class ObservationMode : std::uint8_t { image, scene_text, none };
const char* to_string(ObservationMode m);

/// Everything one planning request says, before it becomes a ChatRequest.
/// Holds no in-context examples.
struct PromptSpec {
  std::string system_preamble;
  std::string prompt_version;
  std::string instruction;
  std::vector<std::string> history;
  ObservationMode observation_mode = ObservationMode::image;
  std::optional<std::vector<std::uint8_t>> image;
  std::string scene_text;
  std::optional<std::vector<std::uint8_t>> goal_image;
  std::string response_contract;

  /// Images appear as digests.
  json to_json() const;
  ChatRequest to_request(const std::string& model) const;
};

PromptSpec build_prompt(const Observation& obs, const GoalSpec& goal, const std::vector<std::string>& history,
                        ObservationMode mode);

struct CandidateScore {
  std::string text;
  double lm = 0;
  double affordance = 0;
  double product = 0;
};

enum class DecisionFailure : std::uint8_t { none, structure, empty_response, no_feasible_action, backend_error };
const char* to_string(DecisionFailure f);

struct PlannerDecision {
  std::optional<Candidate> chosen;  // exactly one of chosen / failure
  std::string chosen_text;
  std::optional<Plan> full_plan;
  std::string raw_response;
  std::optional<std::string> prompt_key;
  std::optional<std::vector<CandidateScore>> candidate_scores;
  DecisionFailure failure = DecisionFailure::none;
  std::string failure_line;
  std::string failure_reason;
};

json to_json(const PlannerDecision& d);

/// Visible objects plus objects the instruction names, deduplicated by id.
std::vector<ObjectDescriptor> planning_vocabulary(const Observation& obs, const GoalSpec& goal);

/// Parses a model response into a decision: the first step of the plan, or
/// done when the plan is only "done".
PlannerDecision decide_from_response(std::string response, Vocabulary vocab);

/// Closed-loop step of the vision-language planner.
PlannerDecision vila_next(Backend& backend, const Observation& obs, const GoalSpec& goal,
                          const std::vector<std::string>& history, const std::string& model = "mock",
                          std::shared_ptr<const SimAttachment> attachment = nullptr);

/// Text-only planner. Without scene text the response is resolved against an
/// imagined vocabulary, so it may name objects that do not exist.
PlannerDecision llm_only_next(Backend& backend, const GoalSpec& goal, const std::vector<std::string>& history,
                              const std::optional<std::string>& scene_text, const std::string& model = "mock",
                              std::shared_ptr<const SimAttachment> attachment = nullptr,
                              Vocabulary visible = {});

/// Blocks and bowls in every palette color and one letter per glyph.
const std::vector<ObjectDescriptor>& imagined_vocabulary();

/// Type-correct calls over the given objects, in a fixed order: pick-ups when
/// the hand is empty, places and pours of the held object, open and close of
/// every container, wait, done.
std::vector<Candidate> enumerate_candidates(const Observation& obs,
                                            const std::vector<ObjectDescriptor>& extra = {});

/// Normalized usefulness per candidate text.
using LmScorer = std::function<std::vector<double>(const std::vector<std::string>& candidates,
                                                   const std::string& instruction,
                                                   const std::vector<std::string>& history)>;

inline constexpr double kLmBase = 0.1;
inline constexpr double kLmDone = 0.5;
inline constexpr double kLmRepeatPenalty = 0.05;

/// Deterministic mock: kLmBase plus the number of content words shared with
/// the instruction; done scores kLmDone; picking up an object that the history
/// already placed is scaled by kLmRepeatPenalty. Normalized to sum to one.
std::vector<double> heuristic_lm_scores(const std::vector<std::string>& candidates, const std::string& instruction,
                                        const std::vector<std::string>& history);

using AffordanceFn = std::function<double(const Candidate&)>;

/// argmax of lm * affordance; ties go to the earlier candidate.
PlannerDecision saycan_next(const LmScorer& lm, const AffordanceFn& affordance, const Observation& obs,
                            const GoalSpec& goal, const std::vector<std::string>& history);

/// Probability of each next word given the words so far.
using TokenScorer = std::function<std::vector<double>(const std::vector<std::string>& prefix,
                                                      const std::vector<std::string>& next_words)>;

inline constexpr const char* kEndOfStep = "<eos>";

/// Token scorer whose conditionals are ratios of candidate masses.
TokenScorer trie_token_scorer(const std::vector<std::string>& candidates, const std::vector<double>& masses);

/// Beam search over the word trie of the candidate texts; each prefix scores
/// P_lm(prefix) * max grounding over its completions.
PlannerDecision gd_search(const std::vector<Candidate>& candidates, const std::vector<std::string>& texts,
                          const TokenScorer& lm, const AffordanceFn& grounding, int beam_width);

PlannerDecision gd_next(const LmScorer& lm, const AffordanceFn& grounding, const Observation& obs,
                        const GoalSpec& goal, const std::vector<std::string>& history, int beam_width = 4);

struct PlanningInput {
  const Observation& observation;
  const GoalSpec& goal;
  const std::vector<std::string>& history;
  const Scene& scene;  // ground truth: only the oracle attachment and gt affordance read it
};

class Planner {
 public:
  virtual ~Planner() = default;
  virtual std::string name() const = 0;
  virtual PlannerDecision next(const PlanningInput& in) = 0;
  /// Whether decisions carry a full plan, as open-loop execution needs.
  virtual bool plans_ahead() const { return false; }
  virtual bool wants_images() const { return false; }
};

struct PlannerSpec {
  std::string kind = "vila";      // vila | saycan | gd | llm
  std::string affordance = "gt";  // gt | detector
  AffordanceConfig detector;
  int beam_width = 4;
  bool llm_scene_text = true;
  std::string model = "mock";
};

/// One planner per episode; detector draws and oracle memo are per episode.
std::unique_ptr<Planner> make_planner(const PlannerSpec& spec, std::shared_ptr<Backend> backend,
                                      const Episode& episode);

}  // namespace planbench
