#include "avln/pool.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace avln {

CandidatePool::CandidatePool(std::size_t capacity, Vec3 origin, const StepConfig& cfg)
    : capacity_(capacity), origin_(origin), s_h_(cfg.horizontal_step), s_v_(cfg.vertical_step) {}

PoolCell CandidatePool::quantize(Vec3 p) const {
  const Vec3 d = p - origin_;
  return {static_cast<std::int64_t>(std::round(d.x / s_h_)),
          static_cast<std::int64_t>(std::round(d.y / s_h_)),
          static_cast<std::int64_t>(std::round(d.z / s_v_))};
}

void CandidatePool::mark_visited(Vec3 p) { visited_.insert(quantize(p)); }

std::vector<Candidate> CandidatePool::merge_step(std::span<const Candidate> live) const {
  std::vector<Candidate> out(live.begin(), live.end());
  std::set<PoolCell> taken;
  for (const Candidate& c : live) taken.insert(quantize(c.position));
  for (const PoolEntry& e : entries_) {
    if (taken.insert(quantize(e.candidate.position)).second) out.push_back(e.candidate);
  }
  return out;
}

void CandidatePool::update_after_prediction(std::span<const Candidate> scored,
                                            std::span<const double> scores,
                                            std::optional<std::size_t> selected,
                                            Vec3 agent_position, int step) {
  if (scores.size() < scored.size()) throw InvalidArgument("pool update: missing scores");
  mark_visited(agent_position);
  if (capacity_ == 0) {
    entries_.clear();
    return;
  }

  std::map<PoolCell, PoolEntry> by_cell;
  for (PoolEntry& e : entries_) by_cell.emplace(quantize(e.candidate.position), std::move(e));
  entries_.clear();

  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (selected && *selected == i) continue;
    if (!std::isfinite(scores[i])) throw InvalidArgument("pool update: non-finite score");
    const PoolCell cell = quantize(scored[i].position);
    auto it = by_cell.find(cell);
    if (it != by_cell.end()) {
      it->second.score = scores[i];
      it->second.step = step;
    } else {
      Candidate c = scored[i];
      c.provenance = Provenance::Pool;
      by_cell.emplace(cell, PoolEntry{std::move(c), scores[i], step, next_sequence_++});
    }
  }

  std::optional<PoolCell> selected_cell;
  if (selected) selected_cell = quantize(scored[*selected].position);
  for (auto& [cell, entry] : by_cell) {
    if (visited_.contains(cell) || cell == selected_cell) continue;
    entries_.push_back(std::move(entry));
  }
  std::sort(entries_.begin(), entries_.end(), [](const PoolEntry& a, const PoolEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.step != b.step) return a.step > b.step;
    return a.sequence < b.sequence;
  });
  if (entries_.size() > capacity_) entries_.resize(capacity_);
}

}  // namespace avln
