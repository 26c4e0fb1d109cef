#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "planbench/executor.hpp"
#include "planbench/planners.hpp"
#include "planbench/vlm_client.hpp"

namespace planbench {

inline constexpr int kReportSchemaVersion = 1;

struct RunConfig {
  std::string suite = "benchmark";  // benchmark | all | BlocksBowls | Letters | Feedback | ImageGoal
  std::vector<std::string> tasks;   // overrides the suite when non-empty
  PlannerSpec planner;
  BackendSpec backend;
  LoopMode mode = LoopMode::closed;
  int episodes = 20;
  std::uint64_t base_seed = 0;
  std::optional<double> noise;  // pick/place failure probability override
  std::filesystem::path out_dir;
  int jobs = 1;
  ExecutorConfig executor;

  /// Throws Error(config_error) or Error(unknown_task).
  void validate() const;
  /// Task ids selected by `tasks` or `suite`, in registry order.
  std::vector<std::string> selected_tasks() const;
  /// Settings that determine results; output paths and parallelism left out.
  json echo() const;
};

/// Reads the JSON config file; keys mirror the command-line flags.
RunConfig config_from_json(const json& j, RunConfig base = {});

struct TaskResult {
  std::string task_id;
  std::string suite;
  std::string split;
  int episodes = 0;
  int successes = 0;
  double rate = 0;
};

struct Report {
  int schema_version = kReportSchemaVersion;
  std::string label;  // planner/backend/mode
  json config;
  std::vector<TaskResult> tasks;
  std::map<std::string, double> categories;  // unweighted mean of task rates
  std::map<std::string, int> failure_histogram;
  std::vector<std::string> transcripts;  // paths relative to the output dir

  json to_json() const;
};

Report report_from_json(const json& j);

/// Rebuilds a report from transcript JSON alone.
Report aggregate(const json& config_echo, const std::string& label, const std::vector<json>& transcripts);

std::string transcript_filename(const std::string& task_id, std::uint64_t seed);

/// Runs one generated episode with the configured planner and backend.
Transcript run_episode(const RunConfig& config, const BackendFactory& backends, const std::string& task_id,
                       std::uint64_t seed);

/// Runs every selected task for seeds base_seed .. base_seed + episodes - 1,
/// writes transcripts and report files when out_dir is set.
Report run_suite(const RunConfig& config);

/// report.json, report.csv, report.md.
void write_report(const Report& report, const std::filesystem::path& dir);

struct Comparison {
  std::string markdown;
  std::string csv;
  json table;
};

/// One column per report; rows are tasks then categories, followed by the
/// failure breakdown. Throws Error(schema_mismatch) on differing versions.
Comparison compare_report(const std::vector<Report>& reports);

}  // namespace planbench
