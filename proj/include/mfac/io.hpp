#pragma once

/// File formats: run configuration (JSON), checkpoints (JSON), metric traces
/// (CSV), run summaries (JSON).
///
/// Run config layout:
///   {
///     "problem":  {"type": "lq", "c1": .., "c2": .., "c3": .., "c4": .., "c5": ..,
///                  "sigma_vol": .., "beta": .., "dt": ..}
///              or {"type": "mfcg", "c1", "c2", "c3", "c4", "ct1", "ct2", "ct5",
///                  "sigma_vol", "beta", "dt"},
///     "training": {"mode": "MFG" | "MFC" | "MFCG", "profile": "desk" | "paper",
///                  ...any TrainConfig field overriding the profile...},
///     "output":   "directory"
///   }
/// Unknown keys anywhere are rejected.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mfac/analytic.hpp"
#include "mfac/lq_env.hpp"
#include "mfac/trainer.hpp"

namespace mfac {

using Json = nlohmann::json;

using Problem = std::variant<LQConfig, MFCGConfig>;

struct RunConfigFile {
    Problem problem;
    TrainConfig training;
    std::string profile = "desk";
    std::string output = "runs/default";
};

Json problem_to_json(const Problem& problem);
Problem problem_from_json(const Json& j);

Json train_config_to_json(const TrainConfig& cfg);
/// Applies the keys of `j` on top of `base`.
TrainConfig train_config_from_json(const Json& j, TrainConfig base);

/// Parses and validates a run config. `profile_override` replaces the
/// file's "profile" before the training overrides are applied.
RunConfigFile parse_run_config(const Json& j, const std::optional<std::string>& profile_override = {});
RunConfigFile load_run_config(const std::filesystem::path& path,
                              const std::optional<std::string>& profile_override = {});

/// Fully resolved config (problem + training after profile expansion).
Json resolved_config_json(const RunConfigFile& cfg);

/// FNV-1a over the canonical dump of resolved_config_json().
std::string config_hash(const RunConfigFile& cfg);

/// Environment for the problem section.
std::unique_ptr<Environment> make_environment(const Problem& problem);

/// Analytic solution matching the training mode, if the problem admits one.
std::optional<AnalyticSolution> analytic_for(const Problem& problem, Mode mode);

MetricTargets targets_for(const Problem& problem, Mode mode);

// Checkpoints -------------------------------------------------------------

Json state_to_json(const TrainerState& state);
TrainerState state_from_json(const Json& j, const TrainConfig& cfg);

struct Checkpoint {
    Json config;  // resolved_config_json()
    std::string config_hash;
    TrainerState state;
};

void save_checkpoint(const std::filesystem::path& path, const RunConfigFile& cfg, const TrainerState& state);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Metrics -----------------------------------------------------------------

std::vector<std::string> metrics_header(const TrainConfig& cfg);
std::string format_metric_row(const MetricRow& row, const TrainConfig& cfg);
void write_metrics_csv(const std::filesystem::path& path, const TrainConfig& cfg,
                       const std::vector<MetricRow>& rows);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

/// Per-step mean and population standard deviation of every column except
/// `step` across equally shaped tables.
CsvTable aggregate_tables(const std::vector<CsvTable>& tables);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Summary of a finished (or faulted, or paused) run.
Json make_summary(const RunConfigFile& cfg, const TrainResult& result);

}  // namespace mfac
