#pragma once

// Episode orchestration: synthetic datasets, the per-episode navigation loop
// with its ablation switches, and parallel suites with aggregate metrics.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "avln/bevmap.hpp"
#include "avln/candidates.hpp"
#include "avln/env.hpp"
#include "avln/metrics.hpp"
#include "avln/policy.hpp"
#include "avln/pool.hpp"

namespace avln {

struct Episode {
  std::string episode_id;
  std::string scene_id;
  Pose start_pose;
  std::vector<std::string> instruction;
  Path gt_path{Vec3{}};
};

struct DatasetParams {
  std::size_t episodes = 100;
  std::uint64_t seed = 0;
  int min_moves = 10;  // grid moves per ground-truth path
  int max_moves = 40;
  double min_altitude = 6.0;
  double max_altitude = 40.0;
  int min_segment = 4;  // horizontal moves between turns
  int max_segment = 12;
  double vertical_probability = 0.15;
  int max_attempts = 2000;  // per episode before giving up
};

/// Grid-walk episodes over free space. Throws Error when a path cannot be
/// placed within the attempt budget.
std::vector<Episode> generate_dataset(const Scene& scene, const DatasetParams& params,
                                      const StepConfig& cfg);

void save_episodes(const std::vector<Episode>& episodes, const std::filesystem::path& path);
std::vector<Episode> load_episodes(const std::filesystem::path& path);

struct AblationFlags {
  bool extra_candidates = true;
  bool bev_map = true;
  bool top_down_obs = true;
  bool vertical_action = true;
};

struct RunConfig {
  StepConfig step;
  int local_map_size = 11;
  std::size_t pool_size = 10;
  std::size_t lookahead = 5;
  std::size_t bev_hidden_dim = 16;
  std::uint64_t run_seed = 0;  // policy randomness
  std::uint64_t gru_seed = 0;  // BEV cell weights when no weight file is given
  std::optional<std::filesystem::path> gru_weights;
  AblationFlags ablation;
  /// Teacher argmax also ranges over pool candidates.
  bool teacher_uses_pool = true;
  bool record_steps = false;
  bool record_teacher = false;
  bool record_bev = false;

  void validate() const;
};

enum class EpisodeStatus { Stopped, Budget, Stuck, Error };

std::string_view to_string(EpisodeStatus s);
EpisodeStatus episode_status_from_string(std::string_view s);

/// One primitive action; step 0 with no action is the start pose.
struct TrajectoryEntry {
  int step = 0;
  int decision = 0;
  std::optional<Action> action;
  Pose pose;
  friend bool operator==(const TrajectoryEntry&, const TrajectoryEntry&) = default;
};

struct StepRecord {
  int step = 0;
  Pose pose;
  std::vector<Candidate> candidates;
  std::size_t live_count = 0;
  Decision decision;
  std::optional<TeacherLabel> teacher;
  std::optional<Vec3> target;
  int actions = 0;
  std::vector<PoolEntry> pool;  // after the update
};

struct BevSnapshot {
  Vec3 origin;
  double cell_size = 0.0;
  std::size_t hidden_dim = 0;
  std::map<GridCell, std::vector<double>> cells;
};

struct EpisodeResult {
  std::string episode_id;
  std::string scene_id;
  EpisodeStatus status = EpisodeStatus::Error;
  std::string error;
  std::vector<TrajectoryEntry> trajectory;
  MetricsReport metrics;
  int decisions = 0;
  std::vector<StepRecord> steps;  // when recording steps or teacher labels
  std::optional<BevSnapshot> bev;
};

/// Positions along the trajectory with consecutive repeats (turns) removed.
Path executed_path(const std::vector<TrajectoryEntry>& trajectory);

/// Metrics for a finished trajectory; stuck episodes never count as successes.
MetricsReport score_trajectory(const Path& executed, const Path& gt, EpisodeStatus status,
                               const StepConfig& cfg);

/// BEV cell weights per the config: loaded when a weight file is set, seeded otherwise.
std::shared_ptr<const GruCell> make_gru(const RunConfig& cfg, std::size_t feature_dim);

/// Runs one episode. Throws InvalidArgument when the scene does not match.
EpisodeResult run_episode(const Scene& scene, const Episode& episode, const Policy& policy,
                          const RunConfig& cfg, std::shared_ptr<const GruCell> gru);

using SceneSet = std::map<std::string, std::shared_ptr<const Scene>>;

struct SuiteResult {
  std::vector<EpisodeResult> episodes;  // dataset order
  AggregateMetrics aggregate;           // over episodes that did not error
  std::size_t errors = 0;
};

/// Runs every episode on `parallelism` worker threads. Output does not depend
/// on the thread count. Episodes whose scene is missing or that throw are
/// recorded with status Error.
SuiteResult run_suite(const std::vector<Episode>& episodes, const SceneSet& scenes,
                      const Policy& policy, const RunConfig& cfg, int parallelism = 1);

/// Builds a policy by name: oracle, random, heuristic, or replay (needs a score file).
std::unique_ptr<Policy> make_policy(std::string_view name, std::uint64_t seed,
                                    const std::optional<std::filesystem::path>& scores = {});

}  // namespace avln
