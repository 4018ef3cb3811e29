#pragma once

// Decision interface between the navigation loop and whatever picks a view,
// plus reference policies: teacher oracle, seeded random, a feature-similarity
// heuristic, and replay of externally computed scores.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "avln/bevmap.hpp"
#include "avln/candidates.hpp"

namespace avln {

struct PolicyContext {
  std::string_view episode_id;
  int step = 0;
  std::span<const std::string> instruction;
  std::span<const Candidate> candidates;  // live first, then pool extras
  std::size_t live_count = 0;
  Pose pose;
  const LocalMap* local_map = nullptr;
  const BevMap* bev = nullptr;
  /// Features of previously selected candidates, oldest first.
  std::span<const std::shared_ptr<const Observation>> history;
  /// Agent positions at each decision so far, current position last.
  std::span<const Vec3> recent_positions;
  const TeacherLabel* teacher = nullptr;
  StepConfig step_config;
};

struct Decision {
  std::vector<double> scores;  // one per candidate, then the Stop slot
  std::optional<std::size_t> selected;
  std::vector<double> vertical_offsets;  // one per candidate, in [0, 1]

  std::size_t stop_slot() const { return scores.size() - 1; }
};

/// Builds a Decision whose selection is the argmax of `scores` (smallest index
/// on ties). The last score is the Stop slot. Offsets are clamped to [0, 1].
Decision make_decision(std::vector<double> scores, std::vector<double> vertical_offsets);

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string_view name() const = 0;
  /// When true the loop computes teacher labels and passes them in the context.
  virtual bool needs_teacher() const { return false; }
  virtual Decision decide(const PolicyContext& ctx) const = 0;
};

/// Scores whose argmax is the teacher's choice: teacher nDTW per candidate,
/// then a Stop slot that wins exactly when the teacher stops.
std::vector<double> oracle_scores(std::span<const double> teacher_scores,
                                  std::optional<std::size_t> teacher_choice);

/// Follows the teacher: nDTW scores, Stop when the teacher stops, encoded
/// teacher vertical offsets.
class OraclePolicy final : public Policy {
 public:
  std::string_view name() const override { return "oracle"; }
  bool needs_teacher() const override { return true; }
  Decision decide(const PolicyContext& ctx) const override;
};

/// Uniform scores over candidates and Stop; offsets uniform over {0, 0.5, 1}.
class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : seed_(seed) {}
  std::string_view name() const override { return "random"; }
  Decision decide(const PolicyContext& ctx) const override;

 private:
  std::uint64_t seed_;
};

struct HeuristicWeights {
  double progress = 0.05;  // reward for moving away from recent positions
  double coverage = 0.05;  // reward for candidates on unexplored map cells
  double vertical_gain = 2.0;
  int stagnation_window = 3;
};

/// Unit-norm hash embedding of instruction tokens.
std::vector<double> instruction_query(std::span<const std::string> tokens, std::size_t dim,
                                      std::uint64_t seed);

/// Per-candidate scores plus the Stop slot.
std::vector<double> heuristic_score(const PolicyContext& ctx, std::span<const double> query,
                                    const HeuristicWeights& w = {});

class HeuristicPolicy final : public Policy {
 public:
  explicit HeuristicPolicy(std::uint64_t seed, HeuristicWeights w = {}) : seed_(seed), w_(w) {}
  std::string_view name() const override { return "heuristic"; }
  Decision decide(const PolicyContext& ctx) const override;

 private:
  std::uint64_t seed_;
  HeuristicWeights w_;
};

/// Replays per-(episode, step) scores and offsets from a score file.
class ReplayPolicy final : public Policy {
 public:
  struct Record {
    std::vector<double> scores;
    std::vector<double> vertical_offsets;
  };

  explicit ReplayPolicy(std::map<std::pair<std::string, int>, Record> records)
      : records_(std::move(records)) {}
  static ReplayPolicy load(const std::filesystem::path& path);

  std::string_view name() const override { return "replay"; }
  Decision decide(const PolicyContext& ctx) const override;

 private:
  std::map<std::pair<std::string, int>, Record> records_;
};

double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace avln
