#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "planbench/digest.hpp"
#include "planbench/error.hpp"
#include "planbench/harness.hpp"
#include "planbench/oracle.hpp"
#include "support.hpp"
#include "taxonomy.hpp"

using namespace planbench;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

int gating_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail, bool gating = true) {
  std::printf("%s criterion %d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass && gating) ++gating_failures;
}

void skip(int id, const std::string& name, const std::string& detail) {
  std::printf("SKIP criterion %d %s: %s\n", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string pct(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * rate);
  return buf;
}

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("planbench_acceptance_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string tree_digest(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), dir));
  }
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) all += f.string() + "\n" + sha256_hex(slurp(dir / f)) + "\n";
  return sha256_hex(all);
}

double success_rate(const Report& r) {
  int ok = 0;
  int total = 0;
  for (const auto& t : r.tasks) {
    ok += t.successes;
    total += t.episodes;
  }
  return total ? static_cast<double>(ok) / total : 0.0;
}

RunConfig feedback_run(const std::string& task, int episodes, LoopMode mode) {
  RunConfig c;
  c.tasks = {task};
  c.episodes = episodes;
  c.mode = mode;
  return c;
}

void oracle_soundness() {
  RunConfig c;
  c.episodes = 50;
  const auto began = std::chrono::steady_clock::now();
  const Report r = run_suite(c);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - began).count();
  const double rate = success_rate(r);
  char detail[160];
  std::snprintf(detail, sizeof detail, "%zu tasks x 50 seeds, success %s, %.2f s (limit 60 s)", r.tasks.size(),
                pct(rate).c_str(), secs);
  report(1, "oracle soundness", r.tasks.size() == 16 && rate == 1.0 && secs < 60.0, detail);
}

void parser_round_trip() {
  Rng rng(2024);
  int failures = 0;
  Scene scene;
  std::vector<SkillInvocation> pool;
  for (int n = 0; n < 10000; ++n) {
    if (n % 50 == 0) {
      scene = random_scene(rng);
      pool = all_invocations(scene);
    }
    const SkillInvocation inv = rng.pick(pool);
    const auto parsed = parse_step(format_invocation(inv, scene.table()), scene.objects());
    const auto* got = std::get_if<SkillInvocation>(&parsed);
    if (!got || !(*got == inv)) ++failures;
  }
  int panics = 0;
  const std::string alphabet = "pick up place put in on into onto the red blue block bowl drawer done wait Plan:\n1. - * \t";
  const Scene vocab_scene = generate_episode("fb_find_hidden", 0).scene;
  for (int n = 0; n < 10000; ++n) {
    std::string bytes;
    const int len = rng.next_int(0, 256);
    for (int k = 0; k < len; ++k) {
      bytes.push_back(n % 2 ? static_cast<char>(rng.next_below(256)) : alphabet[rng.next_below(alphabet.size())]);
    }
    try {
      parse_plan(bytes, vocab_scene.objects());
    } catch (...) {
      ++panics;
    }
  }
  report(2, "parser round trip", failures == 0 && panics == 0,
         std::to_string(failures) + "/10000 round-trip failures, " + std::to_string(panics) +
             "/10000 fuzz inputs threw");
}

void pack_revert() {
  const double closed = success_rate(run_suite(feedback_run("fb_pack_revert", 100, LoopMode::closed)));
  const double open = success_rate(run_suite(feedback_run("fb_pack_revert", 100, LoopMode::open)));
  report(3, "pack-and-revert open vs closed", open == 0.0 && closed == 1.0,
         "100 seeds, open " + pct(open) + " (want 0%), closed " + pct(closed) + " (want 100%)");
}

void hidden_search() {
  const double closed = success_rate(run_suite(feedback_run("fb_find_hidden", 300, LoopMode::closed)));
  const double open = success_rate(run_suite(feedback_run("fb_find_hidden", 300, LoopMode::open)));
  const bool ok = std::abs(open - 1.0 / 3.0) <= 0.08 + 1e-12 && closed == 1.0;
  report(4, "hidden-object search", ok,
         "300 seeds, open " + pct(open) + " (want 33% +/- 8%), closed " + pct(closed) + " (want 100%)");
}

void noisy_stacking() {
  const int seeds = 200;
  const double closed = success_rate(run_suite(feedback_run("fb_stack_noisy", seeds, LoopMode::closed)));
  const double open = success_rate(run_suite(feedback_run("fb_stack_noisy", seeds, LoopMode::open)));
  double expected = 0;
  for (int s = 0; s < seeds; ++s) {
    const Episode ep = generate_episode("fb_stack_noisy", static_cast<std::uint64_t>(s));
    const auto plan = oracle_solve(ep.scene, ep.goal);
    double p = 1.0;
    if (plan) {
      for (const auto& step : plan->steps) {
        const auto it = ep.noise.find(step.skill);
        if (it != ep.noise.end()) p *= 1.0 - it->second;
      }
    } else {
      p = 0.0;
    }
    expected += p / seeds;
  }
  const bool ok = closed >= 0.95 && std::abs(open - expected) <= 0.07;
  report(5, "noisy stacking", ok,
         "200 seeds at p = 0.3, closed " + pct(closed) + " (want >= 95%), open " + pct(open) + " vs analytic " +
             pct(expected) + " (want within 7 points)");
}

struct GroundingCase {
  Scene scene;
  GoalSpec goal;
  std::uint64_t seed;
};

GroundingCase grounding_case(Rng& rng) {
  const auto& registry = task_registry();
  const auto& task = registry[rng.next_below(registry.size())];
  const Episode ep = generate_episode(task.id, rng.next_below(1000));
  Scene scene = ep.scene;
  const auto actions = candidate_actions(scene.table());
  const int moves = rng.next_int(0, 6);
  for (int m = 0; m < moves; ++m) {
    const auto visible = visibility_mask(scene.table(), scene.state());
    std::vector<Action> valid;
    for (const auto& a : actions) {
      if (check_precondition(scene.table(), scene.state(), visible, a)) valid.push_back(a);
    }
    if (valid.empty()) break;
    scene = scene.with_state(apply_effect(scene.table(), scene.state(), rng.pick(valid)));
  }
  return {scene, ep.goal, ep.seed};
}

// Plain word-level beam search over the candidate texts with no grounding:
// what the language model alone would decode.
std::size_t ungrounded_beam(const std::vector<std::string>& texts, const std::vector<double>& masses, int width) {
  std::vector<std::vector<std::string>> words;
  for (const auto& t : texts) {
    std::vector<std::string> w;
    std::istringstream in(t);
    for (std::string x; in >> x;) w.push_back(x);
    words.push_back(w);
  }
  struct Hyp {
    std::size_t depth;
    std::size_t first;
    double p;
    bool done;
  };
  const auto mass_under = [&](std::size_t k, std::size_t depth) {
    double m = 0;
    for (std::size_t j = 0; j < words.size(); ++j) {
      if (words[j].size() >= depth && std::equal(words[j].begin(), words[j].begin() + depth, words[k].begin())) {
        m += masses[j];
      }
    }
    return m;
  };
  std::vector<Hyp> beam = {{0, 0, 1.0, false}};
  while (!std::all_of(beam.begin(), beam.end(), [](const Hyp& h) { return h.done; })) {
    std::vector<Hyp> next;
    for (const Hyp& h : beam) {
      if (h.done) {
        next.push_back(h);
        continue;
      }
      const double parent = h.depth == 0 ? 1.0 : mass_under(h.first, h.depth);
      std::set<std::string> seen;
      for (std::size_t k = 0; k < words.size(); ++k) {
        if (words[k].size() < h.depth || (h.depth && !std::equal(words[k].begin(), words[k].begin() + h.depth,
                                                                  words[h.first].begin()))) {
          continue;
        }
        const bool ends = words[k].size() == h.depth;
        const std::string w = ends ? "\x01" : words[k][h.depth];
        if (!seen.insert(w).second) continue;
        const double child = ends ? masses[k] : mass_under(k, h.depth + 1);
        next.push_back({ends ? h.depth : h.depth + 1, k, parent > 0 ? h.p * child / parent : 0.0, ends});
      }
    }
    std::stable_sort(next.begin(), next.end(), [](const Hyp& l, const Hyp& r) {
      if (l.p != r.p) return l.p > r.p;
      return l.first < r.first;
    });
    if (next.size() > static_cast<std::size_t>(width)) next.resize(static_cast<std::size_t>(width));
    beam = std::move(next);
  }
  return beam.front().first;
}

void grounding_properties() {
  Rng rng(606);
  int zero_picks = 0;
  int uniform_mismatch = 0;
  int uniform_vs_argmax = 0;
  int rescale_changes = 0;
  const std::vector<std::string> no_history;
  for (int n = 0; n < 1000; ++n) {
    const GroundingCase gc = grounding_case(rng);
    const Observation obs = observe(gc.scene);
    AffordanceConfig det;
    det.seed = static_cast<std::uint64_t>(n);
    const AffordanceFn gt = [&](const Candidate& c) { return gt_affordance(gc.scene, c); };
    const AffordanceFn detector = [&](const Candidate& c) {
      return detector_affordance(gc.scene, c, det, gc.seed);
    };
    for (const AffordanceFn* aff : {&gt, &detector}) {
      for (const auto& d : {saycan_next(heuristic_lm_scores, *aff, obs, gc.goal, no_history),
                            gd_next(heuristic_lm_scores, *aff, obs, gc.goal, no_history)}) {
        if (d.chosen && (*aff)(*d.chosen) <= 0.0) ++zero_picks;
      }
    }

    const auto candidates = enumerate_candidates(obs, gc.goal.mentioned);
    std::vector<std::string> texts;
    const auto vocab = planning_vocabulary(obs, gc.goal);
    for (const auto& c : candidates) texts.push_back(candidate_text(c, vocab));
    const auto lm = heuristic_lm_scores(texts, gc.goal.instruction, no_history);
    const AffordanceFn uniform = [](const Candidate&) { return 1.0; };
    const PlannerDecision g = gd_next(heuristic_lm_scores, uniform, obs, gc.goal, no_history);
    const std::size_t decoded = ungrounded_beam(texts, lm, 4);
    if (!g.chosen || g.chosen_text != texts[decoded]) ++uniform_mismatch;
    const std::size_t argmax = static_cast<std::size_t>(std::max_element(lm.begin(), lm.end()) - lm.begin());
    if (!g.chosen || g.chosen_text != texts[argmax]) ++uniform_vs_argmax;

    const double scale = 0.25 + 8.0 * rng.next_double();
    const LmScorer scaled = [scale](const std::vector<std::string>& c, const std::string& i,
                                    const std::vector<std::string>& h) {
      auto s = heuristic_lm_scores(c, i, h);
      for (double& x : s) x *= scale;
      return s;
    };
    for (const AffordanceFn* aff : {&gt, &detector}) {
      const auto a = saycan_next(heuristic_lm_scores, *aff, obs, gc.goal, no_history);
      const auto b = saycan_next(scaled, *aff, obs, gc.goal, no_history);
      if (a.chosen_text != b.chosen_text || a.failure != b.failure) ++rescale_changes;
    }
  }
  report(6, "grounding properties", zero_picks == 0 && uniform_mismatch == 0 && rescale_changes == 0,
         "1000 scenes, zero-affordance picks " + std::to_string(zero_picks) +
             ", uniform-grounding gd != lm-only decode " + std::to_string(uniform_mismatch) +
             " (differs from full-candidate lm argmax in " + std::to_string(uniform_vs_argmax) +
             "), rescaled saycan changes " + std::to_string(rescale_changes));
}

std::optional<std::string> hidden_holder(const Episode& ep) {
  const Scene& s = ep.scene;
  const auto visible = visibility_mask(s.table(), s.state());
  for (const auto& id : ep.goal.relevant) {
    const auto i = s.table().find(id);
    if (!i || visible[*i]) continue;
    std::optional<std::size_t> cover;
    for (std::size_t cur = *i, guard = 0; guard <= s.size(); ++guard) {
      const auto sup = s.support(cur);
      if (!sup) break;
      if (sup->kind == RelationKind::in && s.table().is_container(sup->parent) && !s.is_open(sup->parent)) {
        cover = sup->parent;
      }
      cur = sup->parent;
    }
    if (cover) return s.table().phrase(*cover);
  }
  return std::nullopt;
}

void zero_affordance_hidden() {
  const int seeds = 100;
  int hidden_episodes = 0;
  int baseline_successes = 0;
  int baseline_opened = 0;
  int vila_successes = 0;
  std::map<std::string, int> classes;
  for (int s = 0; s < seeds; ++s) {
    const Episode ep = generate_episode("fb_find_hidden", static_cast<std::uint64_t>(s));
    const auto holder = hidden_holder(ep);
    if (!holder) continue;
    ++hidden_episodes;
    for (const char* kind : {"saycan", "gd"}) {
      RunConfig c;
      c.planner.kind = kind;
      c.planner.affordance = "detector";
      const Transcript tr = run_episode(c, BackendFactory(c.backend), ep.task_id, ep.seed);
      if (tr.outcome == Outcome::success) ++baseline_successes;
      if (tr.failure_class) ++classes[to_string(*tr.failure_class)];
      for (const auto& step : tr.steps) {
        if (step.decision.value("chosen", "") == "open " + *holder) {
          ++baseline_opened;
          break;
        }
      }
    }
    RunConfig v;
    const Transcript tr = run_episode(v, BackendFactory(v.backend), ep.task_id, ep.seed);
    vila_successes += tr.outcome == Outcome::success;
  }
  std::string hist;
  for (const auto& [k, n] : classes) hist += (hist.empty() ? "" : ", ") + k + " " + std::to_string(n);
  const bool ok = hidden_episodes == seeds && baseline_successes == 0 && baseline_opened == 0 &&
                  vila_successes == hidden_episodes;
  report(7, "zero-affordance hidden object", ok,
         std::to_string(hidden_episodes) + " hidden-goal episodes, saycan+gd detector successes " +
             std::to_string(baseline_successes) + ", opened the holder " + std::to_string(baseline_opened) +
             " (" + hist + "), vila oracle successes " + std::to_string(vila_successes));
}

void determinism() {
  bool ok = true;
  std::string detail;
  for (const char* kind : {"vila", "saycan", "gd"}) {
    RunConfig c;
    c.suite = "all";
    c.planner.kind = kind;
    c.planner.affordance = std::string(kind) == "vila" ? "gt" : "detector";
    c.noise = 0.2;
    c.out_dir = temp_dir(std::string(kind) + "_a");
    run_suite(c);
    RunConfig d = c;
    d.out_dir = temp_dir(std::string(kind) + "_b");
    d.jobs = 2;
    run_suite(d);
    const bool same_report = slurp(c.out_dir / "report.json") == slurp(d.out_dir / "report.json");
    const bool same_tree = tree_digest(c.out_dir) == tree_digest(d.out_dir);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(c.out_dir / "transcripts")) files += e.is_regular_file();
    ok = ok && same_report && same_tree && files == 22 * 20;
    detail += std::string(detail.empty() ? "" : "; ") + kind + ": " + std::to_string(files) + " transcripts, " +
              (same_report && same_tree ? "identical" : "DIFFER");
    fs::remove_all(c.out_dir);
    fs::remove_all(d.out_dir);
  }
  report(8, "determinism", ok, detail);
}

void taxonomy() {
  const auto results = run_taxonomy_fixture(std::string(PLANBENCH_FIXTURES_DIR) + "/taxonomy.json");
  int correct = 0;
  std::string wrong;
  for (const auto& r : results) {
    if (r.actual() == r.expected) {
      ++correct;
    } else {
      wrong += " " + r.name + "->" + r.actual();
    }
  }
  const std::map<std::string, std::string> canonical = {{"structure_wipe_table", "ResponseStructure"},
                                                        {"perception_missed_block", "Perception"},
                                                        {"understanding_wrong_bowl", "Understanding"}};
  int canonical_ok = 0;
  for (const auto& r : results) {
    const auto it = canonical.find(r.name);
    if (it != canonical.end() && r.actual() == it->second) ++canonical_ok;
  }
  const bool ok = results.size() == 12 && correct == 12 && canonical_ok == 3;
  report(9, "failure taxonomy", ok,
         "canonical " + std::to_string(canonical_ok) + "/3, fixture " + std::to_string(correct) + "/" +
             std::to_string(results.size()) + (wrong.empty() ? "" : ", wrong:" + wrong));
}

void live_smoke() {
  const char* key = std::getenv("PLANBENCH_API_KEY");
  const char* endpoint = std::getenv("PLANBENCH_ENDPOINT");
  if (!key || !*key || !endpoint || !*endpoint) {
    skip(10, "live smoke test", "PLANBENCH_API_KEY or PLANBENCH_ENDPOINT not set (non-gating)");
    return;
  }
  const char* model = std::getenv("PLANBENCH_MODEL");
  const fs::path cache = temp_dir("live_cache");
  try {
    RunConfig live;
    live.tasks = {"bb_block_in_bowl"};
    live.backend.kind = "live";
    live.backend.endpoint = endpoint;
    live.backend.model = model && *model ? model : "gpt-4o";
    live.backend.cache_dir = cache;
    live.executor.max_steps = 6;
    const Transcript first = run_episode(live, BackendFactory(live.backend), "bb_block_in_bowl", 0);
    const bool structure = first.failure_class == FailureClass::response_structure;
    bool handled = !first.steps.empty();
    for (const auto& s : first.steps) {
      if (s.decision_failure != DecisionFailure::none && !structure) handled = false;
    }
    RunConfig replay = live;
    replay.backend.kind = "replay";
    const Transcript second = run_episode(replay, BackendFactory(replay.backend), "bb_block_in_bowl", 0);
    const bool cached = second.to_json().at("steps") == first.to_json().at("steps");
    report(10, "live smoke test", handled && cached,
           std::string("outcome ") + to_string(first.outcome) + ", " + std::to_string(first.steps.size()) +
               " steps, replay from cache " + (cached ? "identical" : "DIFFERS") + " (non-gating)",
           false);
  } catch (const std::exception& e) {
    report(10, "live smoke test", false, std::string(e.what()) + " (non-gating)", false);
  }
  fs::remove_all(cache);
}

template <typename F>
void guarded(int id, const std::string& name, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(id, name, false, std::string("threw: ") + e.what());
  }
}

}  // namespace

int main() {
  guarded(1, "oracle soundness", oracle_soundness);
  guarded(2, "parser round trip", parser_round_trip);
  guarded(3, "pack-and-revert open vs closed", pack_revert);
  guarded(4, "hidden-object search", hidden_search);
  guarded(5, "noisy stacking", noisy_stacking);
  guarded(6, "grounding properties", grounding_properties);
  guarded(7, "zero-affordance hidden object", zero_affordance_hidden);
  guarded(8, "determinism", determinism);
  guarded(9, "failure taxonomy", taxonomy);
  live_smoke();
  std::printf("%s: %d gating failure(s)\n", gating_failures ? "FAIL" : "PASS", gating_failures);
  return gating_failures ? 1 : 0;
}
