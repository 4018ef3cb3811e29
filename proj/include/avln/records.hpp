#pragma once

// Line-delimited JSON records: episode reports with an aggregate line,
// trajectory logs, teacher tuples, replay score lines, per-step debug logs and
// BEV snapshots.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "avln/runner.hpp"

namespace avln {

inline constexpr std::string_view kTeacherSchema = "avln-teacher/1";
inline constexpr std::string_view kScoresSchema = "avln-scores/1";

nlohmann::json pose_to_json(const Pose& p);
Pose pose_from_json(const nlohmann::json& j);
nlohmann::json vec_to_json(Vec3 v);
Vec3 vec_from_json(const nlohmann::json& j);

nlohmann::json report_line(const EpisodeResult& r);
nlohmann::json aggregate_line(const SuiteResult& s);
void write_report(std::ostream& out, const SuiteResult& s);

/// One line per trajectory entry, then an end line carrying the status.
void write_trajectory(std::ostream& out, const EpisodeResult& r);

struct LoggedTrajectory {
  std::vector<TrajectoryEntry> entries;
  EpisodeStatus status = EpisodeStatus::Error;
  int decisions = 0;
};

/// Trajectory logs keyed by episode id.
std::map<std::string, LoggedTrajectory> read_trajectory_log(const std::filesystem::path& path);

/// One teacher tuple per recorded step. Requires teacher labels.
void write_teacher_tuples(std::ostream& out, const EpisodeResult& r);

/// Replay score lines (scores incl. Stop slot, d_v) for each recorded step.
void write_score_lines(std::ostream& out, const EpisodeResult& r);

void write_step_log(std::ostream& out, const EpisodeResult& r);

nlohmann::json bev_snapshot_json(const std::string& episode_id, const BevSnapshot& s);
BevSnapshot bev_snapshot_from_json(const nlohmann::json& j);

}  // namespace avln
