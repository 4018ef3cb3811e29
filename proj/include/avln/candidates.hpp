#pragma once

// View-candidate correspondence, nDTW teacher candidates over a windowed
// ground-truth path, vertical candidate sets and their teacher offsets, the
// vertical regression loss and vertical accuracy.

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "avln/core.hpp"
#include "avln/env.hpp"
#include "avln/metrics.hpp"

namespace avln {

enum class Provenance { Live, Pool };

enum class VerticalLevel { Lower = 1, Middle = 2, Upper = 3 };

std::string_view to_string(VerticalLevel level);

struct Candidate {
  std::shared_ptr<const Observation> observation;
  Provenance provenance = Provenance::Live;
  int observed_step = 0;  // decision step whose skybox produced it
  Vec3 position;
  Pose origin;
  std::array<Vec3, 3> vertical;  // lower, middle, upper

  ViewDirection view() const { return observation->direction; }
  const std::vector<double>& feature() const { return observation->feature; }
  const Vec3& at(VerticalLevel level) const { return vertical[static_cast<int>(level) - 1]; }
};

/// (p - v_up, p, p + v_up) with v_up = (0, 0, s_v).
std::array<Vec3, 3> vertical_set(Vec3 position, const StepConfig& cfg);

/// Position reached by one step along the view: origin + d * (s_h, s_h, s_v).
Candidate make_candidate(std::shared_ptr<const Observation> obs, const Pose& origin,
                         const StepConfig& cfg, int step = 0);

/// One candidate per skybox observation, in skybox order.
std::vector<Candidate> make_candidates(const Skybox& skybox, const StepConfig& cfg, int step = 0);

/// Index of the ground-truth point nearest to `agent` (earliest on ties).
std::size_t nearest_index(const Path& gt, Vec3 agent);

/// gt[0 .. min(nearest + L, last)] inclusive.
Path gt_window(const Path& gt, Vec3 agent, std::size_t lookahead);

/// Per-step teacher: scores candidates by nDTW of the executed path extended
/// with the candidate position against the windowed ground truth.
class Teacher {
 public:
  /// `window_complete` says the window already ends at the full path's end.
  Teacher(const Path& executed, const Path& window, bool window_complete, const StepConfig& cfg);

  double score(Vec3 p) const;

  /// nDTW of the executed path as it stands, i.e. the score of stopping here.
  double current_score() const;

  /// Stop is allowed once the window covers the whole path and the agent is
  /// within the success radius of its end.
  bool stop_allowed() const { return stop_allowed_; }

  /// Stop wins when allowed and no candidate in the first `considered`
  /// scores above the path as it stands.
  bool wants_stop(std::span<const Candidate> candidates, std::size_t considered) const;

  /// Argmax over the first `considered` candidates, smallest index on ties.
  std::size_t best_candidate(std::span<const Candidate> candidates, std::size_t considered) const;

  /// Argmax over the vertical set; ties go to middle, then lower.
  VerticalLevel vertical(const Candidate& c) const;

 private:
  DtwRow row_;
  std::size_t reference_points_;
  double d_th_;
  bool stop_allowed_;
};

struct TeacherLabel {
  std::optional<std::size_t> candidate;  // empty = Stop
  std::vector<VerticalLevel> vertical;   // one per candidate
  std::vector<double> scores;            // per-candidate nDTW
};

/// Full label for a step. Candidates at index >= `considered` get label
/// vertical offsets but are excluded from the argmax.
TeacherLabel teacher_label(std::span<const Candidate> candidates, std::size_t considered,
                           const Path& executed, const Path& gt, std::size_t lookahead,
                           const StepConfig& cfg);

/// c_gt for one step; empty means Stop.
std::optional<std::size_t> teacher_candidate(std::span<const Candidate> candidates,
                                             const Path& executed, const Path& window,
                                             bool window_complete, const StepConfig& cfg);

VerticalLevel teacher_vertical(const Candidate& candidate, const Path& executed,
                               const Path& window, const StepConfig& cfg);

/// (level - 1) / 2: lower 0, middle 0.5, upper 1.
double encode_vertical(VerticalLevel level);

/// Nearest level; 1/4 and 3/4 go to middle. Throws outside [0, 1].
VerticalLevel decode_vertical(double d_v);

/// Mean squared error between predictions and encoded labels.
double vertical_loss(std::span<const double> predicted, std::span<const VerticalLevel> labels);

struct VerticalAccuracy {
  double exact = 0.0;
  double relaxed = 0.0;
  std::size_t count = 0;
};

struct VerticalAccuracyReport {
  VerticalAccuracy all_views;
  std::optional<VerticalAccuracy> selected_view;  // empty when nothing was selected
};

/// Exact and relaxed (|decoded - label| <= 1) accuracy over all views and over
/// the views flagged in `selected`. Throws on empty or misaligned input.
VerticalAccuracyReport vertical_accuracy(std::span<const double> predicted,
                                         std::span<const VerticalLevel> labels,
                                         const std::vector<bool>& selected);

}  // namespace avln
