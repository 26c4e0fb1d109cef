#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "planbench/error.hpp"
#include "planbench/harness.hpp"

namespace fs = std::filesystem;
using namespace planbench;

namespace {

struct Flags {
  std::string config_path;
  std::string suite;
  std::vector<std::string> tasks;
  std::string planner;
  std::string affordance;
  std::string backend;
  std::string mode;
  std::optional<int> episodes;
  std::optional<std::uint64_t> seed;
  std::optional<double> noise;
  std::string out;
  std::optional<int> jobs;
  std::optional<int> max_steps;
  std::string cache_dir;
  std::string endpoint;
  std::string model;
  std::string script;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file; flags override its keys");
  cmd->add_option("--suite", f.suite, "benchmark, all, BlocksBowls, Letters, Feedback or ImageGoal");
  cmd->add_option("--tasks", f.tasks, "Task ids, overriding --suite")->delimiter(',');
  cmd->add_option("--planner", f.planner, "vila, saycan, gd or llm");
  cmd->add_option("--affordance", f.affordance, "gt or detector (saycan and gd)");
  cmd->add_option("--backend", f.backend, "live, replay, scripted or oracle");
  cmd->add_option("--mode", f.mode, "closed or open");
  cmd->add_option("--episodes", f.episodes, "Episodes per task");
  cmd->add_option("--seed", f.seed, "Base seed");
  cmd->add_option("--noise", f.noise, "Pick and place failure probability");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--jobs", f.jobs, "Parallel episodes");
  cmd->add_option("--max-steps", f.max_steps, "Skill budget per episode");
  cmd->add_option("--cache-dir", f.cache_dir, "Response cache directory");
  cmd->add_option("--endpoint", f.endpoint, "Chat completions base URL");
  cmd->add_option("--model", f.model, "Model name sent to the backend");
  cmd->add_option("--script", f.script, "Scripted responses file");
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config_error, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config_error, path.string() + ": " + e.what());
  }
}

RunConfig build_config(const Flags& f, RunConfig c = {}) {
  if (!f.config_path.empty()) c = config_from_json(read_json(f.config_path), c);
  json j = json::object();
  if (!f.suite.empty()) j["suite"] = f.suite;
  if (!f.tasks.empty()) j["tasks"] = f.tasks;
  if (!f.planner.empty()) j["planner"] = f.planner;
  if (!f.affordance.empty()) j["affordance"] = f.affordance;
  if (!f.backend.empty()) j["backend"] = f.backend;
  if (!f.mode.empty()) j["mode"] = f.mode;
  if (f.episodes) j["episodes"] = *f.episodes;
  if (f.seed) j["seed"] = *f.seed;
  if (f.noise) j["noise"] = *f.noise;
  if (!f.out.empty()) j["out"] = f.out;
  if (f.jobs) j["jobs"] = *f.jobs;
  if (f.max_steps) j["max_steps"] = *f.max_steps;
  if (!f.cache_dir.empty()) j["cache_dir"] = f.cache_dir;
  if (!f.endpoint.empty()) j["endpoint"] = f.endpoint;
  if (!f.model.empty()) j["model"] = f.model;
  c = config_from_json(j, c);
  if (!f.script.empty()) load_script(f.script, c.backend);
  if (c.backend.kind == "scripted" && c.backend.script.empty()) {
    throw Error(ErrorKind::config_error, "the scripted backend needs --script");
  }
  return c;
}

RunConfig config_from_echo(const json& echo) {
  json j = echo;
  j.erase("noise");
  RunConfig c = config_from_json(j);
  if (echo.contains("noise") && !echo["noise"].is_null()) c.noise = echo["noise"].get<double>();
  return c;
}

Report load_report(const fs::path& path) {
  return report_from_json(read_json(fs::is_directory(path) ? path / "report.json" : path));
}

int cmd_run(const Flags& f) {
  const RunConfig c = build_config(f);
  const Report r = run_suite(c);
  std::cout << compare_report({r}).markdown;
  if (!c.out_dir.empty()) std::cout << "\nwrote " << (c.out_dir / "report.json").string() << "\n";
  return 0;
}

int cmd_episode(const Flags& f, const std::string& task, std::uint64_t seed, const std::string& transcript_path) {
  RunConfig c = build_config(f);
  c.tasks = {task};
  c.validate();
  const Transcript tr = run_episode(c, BackendFactory(c.backend), task, seed);
  const json j = tr.to_json();
  if (!transcript_path.empty()) {
    std::ofstream out(transcript_path, std::ios::trunc);
    out << j.dump(2) << "\n";
    if (!out) throw Error(ErrorKind::config_error, "cannot write " + transcript_path);
  }
  std::cout << task << " seed " << seed << ": " << to_string(tr.outcome);
  if (tr.failure_class) std::cout << " (" << to_string(*tr.failure_class) << ")";
  std::cout << ", " << tr.step_count << " steps\n";
  for (const auto& s : tr.steps) {
    const auto& chosen = s.decision.value("chosen", json());
    std::cout << "  " << s.t << ". " << (chosen.is_string() ? chosen.get<std::string>() : "-");
    if (s.result) std::cout << " [" << to_json(*s.result).value("status", "") << "]";
    std::cout << "\n";
  }
  return 0;
}

int cmd_compare(const std::vector<std::string>& inputs, const std::string& out_dir, const std::string& format) {
  std::vector<Report> reports;
  for (const auto& p : inputs) reports.push_back(load_report(p));
  const Comparison c = compare_report(reports);
  if (format == "csv") {
    std::cout << c.csv;
  } else if (format == "json") {
    std::cout << c.table.dump(2) << "\n";
  } else {
    std::cout << c.markdown;
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream(fs::path(out_dir) / "comparison.md") << c.markdown;
    std::ofstream(fs::path(out_dir) / "comparison.csv") << c.csv;
    std::ofstream(fs::path(out_dir) / "comparison.json") << c.table.dump(2) << "\n";
  }
  return 0;
}

int cmd_replay(Flags f, const std::string& from) {
  RunConfig base;
  if (!from.empty()) base = config_from_echo(load_report(from).config);
  f.backend = "replay";
  RunConfig c = build_config(f, base);
  c.backend.kind = "replay";
  const Report r = run_suite(c);
  std::cout << compare_report({r}).markdown;
  if (!from.empty()) {
    const Report original = load_report(from);
    const bool same = original.tasks.size() == r.tasks.size() &&
                      std::equal(original.tasks.begin(), original.tasks.end(), r.tasks.begin(),
                                 [](const TaskResult& a, const TaskResult& b) {
                                   return a.task_id == b.task_id && a.successes == b.successes;
                                 });
    std::cout << "\nreplay " << (same ? "matches" : "differs from") << " " << from << "\n";
    return same ? 0 : 1;
  }
  return 0;
}

int cmd_tasks(bool as_json) {
  if (as_json) {
    std::cout << registry_json().dump(2) << "\n";
    return 0;
  }
  for (const auto& t : task_registry()) {
    std::cout << t.id << "\t" << to_string(t.suite) << "\t" << to_string(t.split) << "\t" << t.instruction_template
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop vision-language planning benchmark"};
  app.require_subcommand(1);

  Flags run_flags;
  auto* run = app.add_subcommand("run", "Run a task suite and write a report");
  add_run_flags(run, run_flags);

  Flags episode_flags;
  std::string episode_task;
  std::string transcript_path;
  auto* episode = app.add_subcommand("episode", "Run one episode");
  add_run_flags(episode, episode_flags);
  episode->add_option("--task", episode_task, "Task id")->required();
  episode->add_option("--transcript", transcript_path, "Write the transcript JSON here");

  std::vector<std::string> compare_inputs;
  std::string compare_out;
  std::string compare_format = "md";
  auto* compare = app.add_subcommand("compare", "Tabulate several reports side by side");
  compare->add_option("reports", compare_inputs, "report.json files or run directories")->required();
  compare->add_option("--out", compare_out, "Write comparison.{md,csv,json} here");
  compare->add_option("--format", compare_format, "md, csv or json")
      ->check(CLI::IsMember({"md", "csv", "json"}));

  Flags replay_flags;
  std::string replay_from;
  auto* replay = app.add_subcommand("replay", "Re-run a suite from cached responses only");
  add_run_flags(replay, replay_flags);
  replay->add_option("--from", replay_from, "Earlier run directory whose config to reuse");

  bool tasks_json = false;
  auto* tasks = app.add_subcommand("tasks", "List the task registry");
  tasks->add_flag("--json", tasks_json, "Print the registry as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_flags);
    if (*episode) return cmd_episode(episode_flags, episode_task, episode_flags.seed.value_or(0), transcript_path);
    if (*compare) return cmd_compare(compare_inputs, compare_out, compare_format);
    if (*replay) return cmd_replay(replay_flags, replay_from);
    if (*tasks) return cmd_tasks(tasks_json);
  } catch (const Error& e) {
    std::cerr << "planbench: " << e.what() << "\n";
    return e.kind() == ErrorKind::config_error || e.kind() == ErrorKind::unknown_task ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "planbench: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
