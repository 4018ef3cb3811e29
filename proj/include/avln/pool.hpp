#pragma once

// Extra-candidate pool: keeps high-confidence candidates that were scored but
// not selected, drops anything the agent has since visited, and offers the
// survivors alongside the live skybox candidates at the next step.

#include <compare>
#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "avln/candidates.hpp"

namespace avln {

/// Motion-grid cell at (s_h, s_h, s_v) resolution around the episode origin.
struct PoolCell {
  std::int64_t u = 0;
  std::int64_t v = 0;
  std::int64_t w = 0;
  friend auto operator<=>(const PoolCell&, const PoolCell&) = default;
};

struct PoolEntry {
  Candidate candidate;
  double score = 0.0;
  int step = 0;               // step at which the score was produced
  std::uint64_t sequence = 0;  // insertion order, final tie-break
};

class CandidatePool {
 public:
  CandidatePool(std::size_t capacity, Vec3 origin, const StepConfig& cfg);

  std::size_t capacity() const { return capacity_; }
  /// Ordered by descending score, then most recent step, then insertion.
  const std::vector<PoolEntry>& entries() const { return entries_; }
  const std::set<PoolCell>& visited() const { return visited_; }

  PoolCell quantize(Vec3 p) const;
  void mark_visited(Vec3 p);
  bool is_visited(Vec3 p) const { return visited_.contains(quantize(p)); }

  /// Live candidates first, then pool entries whose cell no live candidate
  /// occupies.
  std::vector<Candidate> merge_step(std::span<const Candidate> live) const;

  /// Marks `agent_position` visited, refreshes scores of re-scored entries,
  /// adds unselected unvisited candidates, and keeps the best `capacity`.
  /// `selected` indexes `scored`; empty when the agent stopped.
  void update_after_prediction(std::span<const Candidate> scored, std::span<const double> scores,
                               std::optional<std::size_t> selected, Vec3 agent_position,
                               int step);

 private:
  std::size_t capacity_;
  Vec3 origin_;
  double s_h_;
  double s_v_;
  std::vector<PoolEntry> entries_;
  std::set<PoolCell> visited_;
  std::uint64_t next_sequence_ = 0;
};

}  // namespace avln
