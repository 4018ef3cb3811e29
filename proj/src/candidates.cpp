#include "avln/candidates.hpp"

#include <cmath>

namespace avln {

std::string_view to_string(VerticalLevel level) {
  switch (level) {
    case VerticalLevel::Lower: return "lower";
    case VerticalLevel::Middle: return "middle";
    case VerticalLevel::Upper: return "upper";
  }
  return "?";
}

std::array<Vec3, 3> vertical_set(Vec3 p, const StepConfig& cfg) {
  const Vec3 up{0.0, 0.0, cfg.vertical_step};
  return {p - up, p, p + up};
}

Candidate make_candidate(std::shared_ptr<const Observation> obs, const Pose& origin,
                         const StepConfig& cfg, int step) {
  Candidate c;
  const Vec3 scale{cfg.horizontal_step, cfg.horizontal_step, cfg.vertical_step};
  c.position = origin.position + hadamard(obs->orientation, scale);
  c.observation = std::move(obs);
  c.origin = origin;
  c.observed_step = step;
  c.vertical = vertical_set(c.position, cfg);
  return c;
}

std::vector<Candidate> make_candidates(const Skybox& skybox, const StepConfig& cfg, int step) {
  std::vector<Candidate> out;
  out.reserve(skybox.observations.size());
  for (const Observation& o : skybox.observations)
    out.push_back(make_candidate(std::make_shared<const Observation>(o), skybox.pose, cfg, step));
  return out;
}

std::size_t nearest_index(const Path& gt, Vec3 agent) {
  std::size_t best = 0;
  double best_d = distance(gt[0], agent);
  for (std::size_t i = 1; i < gt.size(); ++i) {
    const double d = distance(gt[i], agent);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

Path gt_window(const Path& gt, Vec3 agent, std::size_t lookahead) {
  const std::size_t end = std::min(nearest_index(gt, agent) + lookahead, gt.size() - 1);
  return Path(std::vector<Vec3>(gt.points().begin(), gt.points().begin() + end + 1));
}

Teacher::Teacher(const Path& executed, const Path& window, bool window_complete,
                 const StepConfig& cfg)
    : row_(window), reference_points_(window.size()), d_th_(cfg.success_radius) {
  for (const Vec3& p : executed.points()) row_.push(p);
  stop_allowed_ =
      window_complete && distance(executed.back(), window.back()) <= cfg.success_radius;
}

double Teacher::current_score() const {
  return ndtw_from_cost(row_.cost(), reference_points_, d_th_);
}

bool Teacher::wants_stop(std::span<const Candidate> candidates, std::size_t considered) const {
  if (!stop_allowed_) return false;
  if (std::min(considered, candidates.size()) == 0) return true;
  return current_score() >= score(candidates[best_candidate(candidates, considered)].position);
}

double Teacher::score(Vec3 p) const {
  return ndtw_from_cost(row_.cost_if_appended(p), reference_points_, d_th_);
}

std::size_t Teacher::best_candidate(std::span<const Candidate> candidates,
                                    std::size_t considered) const {
  considered = std::min(considered, candidates.size());
  if (considered == 0) throw InvalidArgument("teacher needs at least one candidate");
  std::size_t best = 0;
  double best_score = score(candidates[0].position);
  for (std::size_t i = 1; i < considered; ++i) {
    const double s = score(candidates[i].position);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return best;
}

VerticalLevel Teacher::vertical(const Candidate& c) const {
  VerticalLevel best = VerticalLevel::Middle;
  double best_score = score(c.at(VerticalLevel::Middle));
  for (VerticalLevel level : {VerticalLevel::Lower, VerticalLevel::Upper}) {
    const double s = score(c.at(level));
    if (s > best_score) {
      best_score = s;
      best = level;
    }
  }
  return best;
}

TeacherLabel teacher_label(std::span<const Candidate> candidates, std::size_t considered,
                           const Path& executed, const Path& gt, std::size_t lookahead,
                           const StepConfig& cfg) {
  const Path window = gt_window(gt, executed.back(), lookahead);
  const Teacher teacher(executed, window, window.size() == gt.size(), cfg);
  TeacherLabel label;
  label.scores.reserve(candidates.size());
  label.vertical.reserve(candidates.size());
  for (const Candidate& c : candidates) {
    label.scores.push_back(teacher.score(c.position));
    label.vertical.push_back(teacher.vertical(c));
  }
  if (!teacher.wants_stop(candidates, considered)) label.candidate = teacher.best_candidate(candidates, considered);
  return label;
}

std::optional<std::size_t> teacher_candidate(std::span<const Candidate> candidates,
                                             const Path& executed, const Path& window,
                                             bool window_complete, const StepConfig& cfg) {
  const Teacher teacher(executed, window, window_complete, cfg);
  if (teacher.wants_stop(candidates, candidates.size())) return std::nullopt;
  return teacher.best_candidate(candidates, candidates.size());
}

VerticalLevel teacher_vertical(const Candidate& candidate, const Path& executed,
                               const Path& window, const StepConfig& cfg) {
  return Teacher(executed, window, false, cfg).vertical(candidate);
}

double encode_vertical(VerticalLevel level) { return (static_cast<int>(level) - 1) / 2.0; }

VerticalLevel decode_vertical(double d_v) {
  if (!(d_v >= 0.0 && d_v <= 1.0)) throw InvalidArgument("vertical offset outside [0, 1]");
  if (d_v < 0.25) return VerticalLevel::Lower;
  if (d_v > 0.75) return VerticalLevel::Upper;
  return VerticalLevel::Middle;
}

double vertical_loss(std::span<const double> predicted, std::span<const VerticalLevel> labels) {
  if (predicted.size() != labels.size()) throw InvalidArgument("vertical_loss: length mismatch");
  if (predicted.empty()) throw InvalidArgument("vertical_loss: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double e = predicted[i] - encode_vertical(labels[i]);
    sum += e * e;
  }
  return sum / static_cast<double>(predicted.size());
}

VerticalAccuracyReport vertical_accuracy(std::span<const double> predicted,
                                         std::span<const VerticalLevel> labels,
                                         const std::vector<bool>& selected) {
  if (predicted.size() != labels.size() || selected.size() != labels.size())
    throw InvalidArgument("vertical_accuracy: misaligned inputs");
  if (labels.empty()) throw InvalidArgument("vertical_accuracy: empty input");

  std::size_t all_exact = 0, all_relaxed = 0, sel_n = 0, sel_exact = 0, sel_relaxed = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int diff = std::abs(static_cast<int>(decode_vertical(predicted[i])) -
                              static_cast<int>(labels[i]));
    all_exact += diff == 0;
    all_relaxed += diff <= 1;
    if (selected[i]) {
      ++sel_n;
      sel_exact += diff == 0;
      sel_relaxed += diff <= 1;
    }
  }
  VerticalAccuracyReport report;
  const double n = static_cast<double>(labels.size());
  report.all_views = {all_exact / n, all_relaxed / n, labels.size()};
  if (sel_n > 0) {
    const double s = static_cast<double>(sel_n);
    report.selected_view = VerticalAccuracy{sel_exact / s, sel_relaxed / s, sel_n};
  }
  return report;
}

}  // namespace avln
