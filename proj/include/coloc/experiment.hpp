#ifndef COLOC_EXPERIMENT_HPP_
#define COLOC_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coloc/geometry.hpp"
#include "coloc/occupancy_grid.hpp"
#include "coloc/scenario.hpp"
#include "coloc/swarm.hpp"

namespace coloc {

/// Error bound used for convergence and the accuracy criteria (metres).
inline constexpr double kConvergenceThreshold = 0.2;

struct RunRow {
  double t = 0.0;
  AgentId agent_id = 0;
  Pose2D estimate;
  Pose2D truth;
  double position_error = 0.0;
  bool encounter = false;
};

struct RunRecord {
  std::string run_id;
  std::uint64_t seed = 0;
  Mode mode = Mode::kCooperative;
  std::vector<RunRow> rows;
};

struct SnapshotOptions {
  std::size_t first_tick = 0;
  std::size_t last_tick = 0;
  std::filesystem::path dir;
};

/// Parses "a:b" (inclusive) or a single tick "a".
SnapshotOptions parse_tick_range(const std::string& text, std::filesystem::path dir);

/// Runs one seeded simulation and records every agent at every tick,
/// including the initial belief at t = 0. Snapshot files, when requested,
/// hold one (agent_id, x, y, theta) row per particle; an agent taking part in
/// an encounter gets a _pre and a _post file for that tick.
RunRecord run_scenario(const Scenario& scenario, std::shared_ptr<const OccupancyGrid> map,
                       Mode mode, std::uint64_t seed,
                       const std::optional<SnapshotOptions>& snapshots = std::nullopt);

RunRecord run_scenario(const std::filesystem::path& scenario_path, Mode mode,
                       std::uint64_t seed,
                       const std::optional<SnapshotOptions>& snapshots = std::nullopt);

std::string run_csv(const RunRecord& record);
std::string particles_csv(const ParticleCloud& cloud);

std::string run_file_name(std::uint64_t seed, Mode mode);

struct RunSummary {
  std::string run_id;
  std::uint64_t seed = 0;
  Mode mode = Mode::kCooperative;
  bool ok = true;
  std::string failure;
  std::optional<double> first_encounter_time;
  std::optional<double> post_encounter_max_error;
  // Earliest time after which the error stays below the threshold to the end.
  std::optional<double> convergence_time;
  std::optional<double> post_midpoint_median_error;
};

RunSummary summarize(const RunRecord& record, AgentId evaluated, double duration,
                     double threshold = kConvergenceThreshold);

struct BatchResult {
  std::vector<RunSummary> runs;  // seed-major, coop before standalone
  std::optional<double> coop_median_post_midpoint_error;
  std::optional<double> standalone_median_post_midpoint_error;
  std::optional<double> coop_median_convergence_time;
  std::optional<double> standalone_median_convergence_time;
};

/// Runs both modes for seeds base_seed .. base_seed + n_runs - 1, writes one
/// CSV per run plus summary.csv into out_dir. A run that throws is recorded
/// as failed. Runs are spread over `threads` workers (0 = hardware).
BatchResult batch(const std::filesystem::path& scenario_path, std::size_t n_runs,
                  std::uint64_t base_seed, const std::filesystem::path& out_dir,
                  unsigned threads = 0);

std::string summary_csv(const BatchResult& result);

double median(std::vector<double> values);

}  // namespace coloc

#endif  // COLOC_EXPERIMENT_HPP_
