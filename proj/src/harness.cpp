#include "planbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include "planbench/error.hpp"

namespace planbench {

namespace fs = std::filesystem;

namespace {

std::string category_of(const TaskSpec& t) {
  if (t.suite == Suite::blocks_bowls || t.suite == Suite::letters) {
    return std::string(to_string(t.suite)) + "/" + to_string(t.split);
  }
  return to_string(t.suite);
}

std::string percent(double rate) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1) << rate * 100.0;
  return out.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorKind::config_error, "cannot write " + path.string());
}

const std::vector<std::string> kFailureClasses = {"ResponseStructure", "Perception",       "Understanding",
                                                  "Execution",         "NoFeasibleAction", "Timeout"};

}  // namespace

void RunConfig::validate() const {
  if (episodes < 1) throw Error(ErrorKind::config_error, "episodes must be at least 1");
  if (jobs < 1) throw Error(ErrorKind::config_error, "jobs must be at least 1");
  if (executor.max_steps < 1) throw Error(ErrorKind::config_error, "max_steps must be at least 1");
  if (noise && (*noise < 0.0 || *noise > 1.0)) throw Error(ErrorKind::config_error, "noise must lie in [0, 1]");
  for (const char* kind : {"vila", "saycan", "gd", "llm"}) {
    if (planner.kind == kind) goto planner_ok;
  }
  throw Error(ErrorKind::config_error, "unknown planner " + planner.kind);
planner_ok:
  for (const char* kind : {"live", "replay", "scripted", "oracle"}) {
    if (backend.kind == kind) goto backend_ok;
  }
  throw Error(ErrorKind::config_error, "unknown backend " + backend.kind);
backend_ok:
  if (mode == LoopMode::open && planner.kind != "vila" && planner.kind != "llm") {
    throw Error(ErrorKind::config_error, "open loop needs the vila or llm planner");
  }
  planner.detector.validate();
  if (selected_tasks().empty()) throw Error(ErrorKind::config_error, "no tasks selected");
}

std::vector<std::string> RunConfig::selected_tasks() const {
  if (!tasks.empty()) {
    for (const auto& id : tasks) find_task(id);
    return tasks;
  }
  if (suite == "benchmark") return benchmark_task_ids();
  if (suite == "all") {
    std::vector<std::string> out;
    for (const auto& t : task_registry()) out.push_back(t.id);
    return out;
  }
  const auto s = parse_suite(suite);
  if (!s) throw Error(ErrorKind::config_error, "unknown suite " + suite);
  return tasks_in_suite(*s);
}

json RunConfig::echo() const {
  return {{"tasks", selected_tasks()},
          {"planner", planner.kind},
          {"affordance", planner.affordance},
          {"detector", {{"false_negative_rate", planner.detector.false_negative_rate},
                        {"false_positive_rate", planner.detector.false_positive_rate},
                        {"seed", planner.detector.seed}}},
          {"beam_width", planner.beam_width},
          {"llm_scene_text", planner.llm_scene_text},
          {"backend", backend.kind},
          {"model", backend.model},
          {"mode", to_string(mode)},
          {"episodes", episodes},
          {"seed", base_seed},
          {"noise", noise ? json(*noise) : json(nullptr)},
          {"max_steps", executor.max_steps}};
}

RunConfig config_from_json(const json& j, RunConfig c) {
  try {
    if (j.contains("suite")) c.suite = j["suite"].get<std::string>();
    if (j.contains("tasks")) c.tasks = j["tasks"].get<std::vector<std::string>>();
    if (j.contains("planner")) c.planner.kind = j["planner"].get<std::string>();
    if (j.contains("affordance")) c.planner.affordance = j["affordance"].get<std::string>();
    if (j.contains("detector")) {
      const auto& d = j["detector"];
      c.planner.detector.false_negative_rate = d.value("false_negative_rate", c.planner.detector.false_negative_rate);
      c.planner.detector.false_positive_rate = d.value("false_positive_rate", c.planner.detector.false_positive_rate);
      c.planner.detector.seed = d.value("seed", c.planner.detector.seed);
    }
    if (j.contains("beam_width")) c.planner.beam_width = j["beam_width"].get<int>();
    if (j.contains("llm_scene_text")) c.planner.llm_scene_text = j["llm_scene_text"].get<bool>();
    if (j.contains("backend")) c.backend.kind = j["backend"].get<std::string>();
    if (j.contains("cache_dir")) c.backend.cache_dir = j["cache_dir"].get<std::string>();
    if (j.contains("endpoint")) c.backend.endpoint = j["endpoint"].get<std::string>();
    if (j.contains("model")) {
      c.backend.model = j["model"].get<std::string>();
      c.planner.model = c.backend.model;
    }
    if (j.contains("requests_per_minute")) c.backend.requests_per_minute = j["requests_per_minute"].get<double>();
    if (j.contains("mode")) {
      const auto m = parse_loop_mode(j["mode"].get<std::string>());
      if (!m) throw Error(ErrorKind::config_error, "mode must be closed or open");
      c.mode = *m;
    }
    if (j.contains("episodes")) c.episodes = j["episodes"].get<int>();
    if (j.contains("seed")) c.base_seed = j["seed"].get<std::uint64_t>();
    if (j.contains("noise") && !j["noise"].is_null()) c.noise = j["noise"].get<double>();
    if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
    if (j.contains("jobs")) c.jobs = j["jobs"].get<int>();
    if (j.contains("max_steps")) c.executor.max_steps = j["max_steps"].get<int>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config_error, std::string("config: ") + e.what());
  }
  return c;
}

json Report::to_json() const {
  json tasks_json = json::array();
  for (const auto& t : tasks) {
    tasks_json.push_back({{"task_id", t.task_id},
                          {"suite", t.suite},
                          {"split", t.split},
                          {"episodes", t.episodes},
                          {"successes", t.successes},
                          {"rate", t.rate}});
  }
  return {{"schema_version", schema_version}, {"label", label},
          {"config", config},                 {"tasks", tasks_json},
          {"categories", categories},         {"failure_histogram", failure_histogram},
          {"transcripts", transcripts}};
}

Report report_from_json(const json& j) {
  Report r;
  try {
    r.schema_version = j.at("schema_version").get<int>();
    r.label = j.value("label", "");
    r.config = j.value("config", json::object());
    for (const auto& t : j.at("tasks")) {
      r.tasks.push_back({t.at("task_id").get<std::string>(), t.value("suite", ""), t.value("split", ""),
                         t.at("episodes").get<int>(), t.at("successes").get<int>(), t.at("rate").get<double>()});
    }
    r.categories = j.value("categories", std::map<std::string, double>{});
    r.failure_histogram = j.value("failure_histogram", std::map<std::string, int>{});
    r.transcripts = j.value("transcripts", std::vector<std::string>{});
  } catch (const json::exception& e) {
    throw Error(ErrorKind::schema_mismatch, std::string("report: ") + e.what());
  }
  return r;
}

Report aggregate(const json& config_echo, const std::string& label, const std::vector<json>& transcripts) {
  Report r;
  r.label = label;
  r.config = config_echo;
  std::map<std::string, TaskResult> by_task;
  std::vector<std::string> order;
  for (const auto& name : kFailureClasses) r.failure_histogram[name] = 0;
  for (const auto& t : transcripts) {
    const std::string id = t.at("task_id").get<std::string>();
    auto [it, fresh] = by_task.try_emplace(id);
    if (fresh) {
      order.push_back(id);
      const TaskSpec& spec = find_task(id);
      it->second.task_id = id;
      it->second.suite = to_string(spec.suite);
      it->second.split = to_string(spec.split);
    }
    ++it->second.episodes;
    if (t.at("outcome") == "Success") {
      ++it->second.successes;
    } else if (t.at("failure_class").is_string()) {
      ++r.failure_histogram[t["failure_class"].get<std::string>()];
    }
    r.transcripts.push_back("transcripts/" + transcript_filename(id, t.at("seed").get<std::uint64_t>()));
  }
  std::map<std::string, std::vector<double>> per_category;
  for (const auto& id : order) {
    TaskResult& tr = by_task[id];
    tr.rate = static_cast<double>(tr.successes) / static_cast<double>(tr.episodes);
    r.tasks.push_back(tr);
    per_category[category_of(find_task(id))].push_back(tr.rate);
  }
  for (const auto& [name, rates] : per_category) {
    double sum = 0;
    for (double x : rates) sum += x;
    r.categories[name] = sum / static_cast<double>(rates.size());
  }
  return r;
}

std::string transcript_filename(const std::string& task_id, std::uint64_t seed) {
  return task_id + "_seed" + std::to_string(seed) + ".json";
}

Transcript run_episode(const RunConfig& config, const BackendFactory& backends, const std::string& task_id,
                       std::uint64_t seed) {
  Episode ep = generate_episode(task_id, seed);
  if (config.noise) set_manipulation_noise(ep, *config.noise);
  auto backend = backends.for_episode();
  PlannerSpec planner_spec = config.planner;
  planner_spec.model = config.backend.model;
  auto planner = make_planner(planner_spec, backend, ep);
  const std::string backend_name = backend ? backend->name() : config.backend.kind;
  return config.mode == LoopMode::closed ? run_closed_loop(ep, *planner, backend_name, config.executor)
                                         : run_open_loop(ep, *planner, backend_name, config.executor);
}

Report run_suite(const RunConfig& config) {
  config.validate();
  const auto task_ids = config.selected_tasks();
  const BackendFactory backends(config.backend);
  struct Job {
    std::string task_id;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& id : task_ids) {
    for (int e = 0; e < config.episodes; ++e) jobs.push_back({id, config.base_seed + static_cast<std::uint64_t>(e)});
  }
  std::vector<json> transcripts(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      try {
        transcripts[k] = run_episode(config, backends, jobs[k].task_id, jobs[k].seed).to_json();
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::config_error || e.kind() == ErrorKind::unknown_task) {
          errors[k] = std::current_exception();
          continue;
        }
        Transcript failed;
        failed.task_id = jobs[k].task_id;
        failed.seed = jobs[k].seed;
        failed.mode = config.mode;
        failed.planner = config.planner.kind;
        failed.backend = config.backend.kind;
        failed.error = e.what();
        transcripts[k] = failed.to_json();
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int n = std::min<int>(config.jobs, static_cast<int>(jobs.size()));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int i = 0; i < n; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  const std::string label = config.planner.kind + "/" + config.backend.kind + "/" + to_string(config.mode);
  Report report = aggregate(config.echo(), label, transcripts);
  if (!config.out_dir.empty()) {
    fs::create_directories(config.out_dir / "transcripts");
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      write_file(config.out_dir / "transcripts" / transcript_filename(jobs[k].task_id, jobs[k].seed),
                 transcripts[k].dump(2) + "\n");
    }
    write_report(report, config.out_dir);
  }
  return report;
}

void write_report(const Report& report, const fs::path& dir) {
  fs::create_directories(dir);
  write_file(dir / "report.json", report.to_json().dump(2) + "\n");
  const Comparison c = compare_report({report});
  write_file(dir / "report.csv", c.csv);
  write_file(dir / "report.md", c.markdown);
}

Comparison compare_report(const std::vector<Report>& reports) {
  if (reports.empty()) throw Error(ErrorKind::config_error, "nothing to compare");
  for (const auto& r : reports) {
    if (r.schema_version != reports.front().schema_version) {
      throw Error(ErrorKind::schema_mismatch, "report schema versions differ");
    }
  }
  std::vector<std::string> columns;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    columns.push_back(reports[i].label.empty() ? "report " + std::to_string(i + 1) : reports[i].label);
  }

  std::vector<std::string> task_rows;
  std::vector<std::string> category_rows;
  for (const auto& r : reports) {
    for (const auto& t : r.tasks) {
      if (std::find(task_rows.begin(), task_rows.end(), t.task_id) == task_rows.end()) task_rows.push_back(t.task_id);
    }
    for (const auto& [name, rate] : r.categories) {
      if (std::find(category_rows.begin(), category_rows.end(), name) == category_rows.end()) {
        category_rows.push_back(name);
      }
    }
  }
  auto task_rate = [](const Report& r, const std::string& id) -> std::optional<double> {
    for (const auto& t : r.tasks) {
      if (t.task_id == id) return t.rate;
    }
    return std::nullopt;
  };
  auto category_rate = [](const Report& r, const std::string& name) -> std::optional<double> {
    const auto it = r.categories.find(name);
    if (it == r.categories.end()) return std::nullopt;
    return it->second;
  };

  Comparison c;
  std::ostringstream md;
  std::ostringstream csv;
  json rows = json::array();
  md << "| task |";
  csv << "row";
  for (const auto& col : columns) {
    md << " " << col << " |";
    csv << "," << col;
  }
  md << "\n|---|";
  for (std::size_t i = 0; i < columns.size(); ++i) md << "---:|";
  md << "\n";
  csv << "\n";
  auto emit = [&](const std::string& name, const std::string& kind, auto rate_of) {
    md << "| " << name << " |";
    csv << name;
    json values = json::array();
    for (const auto& r : reports) {
      const auto rate = rate_of(r, name);
      md << " " << (rate ? percent(*rate) : "-") << " |";
      csv << "," << (rate ? percent(*rate) : "");
      values.push_back(rate ? json(*rate) : json(nullptr));
    }
    md << "\n";
    csv << "\n";
    rows.push_back({{"row", name}, {"kind", kind}, {"values", values}});
  };
  for (const auto& id : task_rows) emit(id, "task", task_rate);
  for (const auto& name : category_rows) emit(name, "category", category_rate);

  md << "\nFailure breakdown (episodes per class)\n\n| class |";
  for (const auto& col : columns) md << " " << col << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < columns.size(); ++i) md << "---:|";
  md << "\n";
  json breakdown = json::object();
  for (const auto& name : kFailureClasses) {
    md << "| " << name << " |";
    csv << "failures:" << name;
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const auto it = reports[i].failure_histogram.find(name);
      const int count = it == reports[i].failure_histogram.end() ? 0 : it->second;
      md << " " << count << " |";
      csv << "," << count;
      breakdown[columns[i]][name] = count;
    }
    md << "\n";
    csv << "\n";
  }
  c.markdown = md.str();
  c.csv = csv.str();
  c.table = {{"schema_version", reports.front().schema_version},
             {"columns", columns},
             {"rows", rows},
             {"failure_breakdown", breakdown}};
  return c;
}

}  // namespace planbench
