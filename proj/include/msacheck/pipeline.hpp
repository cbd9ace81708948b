#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "msacheck/backend.hpp"
#include "msacheck/classify.hpp"
#include "msacheck/evidence.hpp"
#include "msacheck/explain.hpp"
#include "msacheck/metrics.hpp"
#include "msacheck/store.hpp"

namespace msacheck {

struct PipelineConfig {
  BackendDescriptor backend;
  std::size_t context_budget = 100;
  Thresholds thresholds;
  std::uint64_t seed = 42;
  std::size_t exact_limit = kExactShapleyLimit;
  std::size_t kernel_budget = 2048;
  bool explain_all_cells = false;  // default: relevant cells only
  std::size_t workers = 0;         // 0 = OpenMP default
  std::optional<NliBackendConfig> nli;

  void validate() const;  // throws ConfigError
};

// JSON config file; every field optional. See README for the schema.
PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

enum class StageStatus { Pending, Done, Failed, Skipped };
std::string_view to_string(StageStatus s);

struct StatementRunStatus {
  std::string statement_id;  // "line-<n>" when the record never parsed
  std::size_t line = 0;      // 1-based input line, 0 for stored statements
  StageStatus ingest = StageStatus::Pending;
  StageStatus classify = StageStatus::Pending;
  StageStatus explain = StageStatus::Pending;
  StageStatus evidence = StageStatus::Pending;
  std::string error;
  std::size_t failed_cells = 0;
  double millis = 0.0;
};

enum class RunState { Running, Completed };

struct PipelineRun {
  std::string run_id;
  std::string backend_id;
  BackendKind backend_kind = BackendKind::NativeLinear;
  std::size_t context_budget = 0;
  double threshold = 0.5;
  std::uint64_t seed = 0;
  RunState state = RunState::Running;
  std::vector<std::string> statement_ids;  // successfully processed, input order
  std::vector<StatementRunStatus> statements;
  double millis = 0.0;

  std::size_t failures() const;
};

nlohmann::json to_json(const PipelineRun& run);

// Run ids are content hashes of (input, backend, config), so reruns of the
// same job get the same id.
std::string make_run_id(std::string_view input_digest, const std::string& backend_id, const PipelineConfig& c);

class Pipeline {
 public:
  Pipeline(std::shared_ptr<const RelevanceBackend> backend, PipelineConfig config,
           std::shared_ptr<const EvidenceTracker> tracker = nullptr);

  // Statements JSONL: ingest, classify, explain, evidence, persist. A bad
  // line or a failing statement is recorded and the rest carry on.
  PipelineRun run(const std::vector<std::string>& jsonl_lines, Store& store) const;
  PipelineRun run_file(const std::filesystem::path& jsonl, Store& store) const;
  // Same stages for statements already in the store.
  PipelineRun run_stored(const std::vector<std::string>& statement_ids, Store& store) const;

  const PipelineConfig& config() const { return config_; }
  const RelevanceBackend& backend() const { return *backend_; }
  const EvidenceTracker& tracker() const { return *tracker_; }

 private:
  void process(const Statement& st, Store& store, StatementRunStatus& status) const;
  PipelineRun start(std::string_view digest) const;

  std::shared_ptr<const RelevanceBackend> backend_;
  PipelineConfig config_;
  std::shared_ptr<const EvidenceTracker> tracker_;
};

// Reads non-empty lines of a JSONL file.
std::vector<std::string> read_jsonl_lines(const std::filesystem::path& path);

// Per-statement relevance after review overrides, for the metrics module.
std::vector<StatementOutcome> outcomes(const Store& store, const std::vector<std::string>& statement_ids);

// Compliance fractions plus the trend table for one facet.
nlohmann::json run_report(const Store& store, const std::vector<std::string>& statement_ids, Facet facet);

}  // namespace msacheck
