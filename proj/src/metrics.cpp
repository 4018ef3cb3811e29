#include "avln/metrics.hpp"

#include <algorithm>
#include <cstdio>

#include "avln/simd.hpp"

namespace avln {

DtwRow::DtwRow(const Path& reference) {
  const std::size_t m = reference.size();
  xs_.reserve(m);
  ys_.reserve(m);
  zs_.reserve(m);
  for (const Vec3& p : reference.points()) {
    xs_.push_back(p.x);
    ys_.push_back(p.y);
    zs_.push_back(p.z);
  }
  row_.assign(m, 0.0);
  scratch_.assign(m, 0.0);
  dist_.assign(m, 0.0);
}

void DtwRow::advance(Vec3 p, std::span<const double> prev, std::span<double> next) const {
  simd::distances(p.x, p.y, p.z, xs_, ys_, zs_, dist_);
  const std::size_t m = xs_.size();
  if (query_size_ == 0) {
    next[0] = dist_[0];
    for (std::size_t j = 1; j < m; ++j) next[j] = dist_[j] + next[j - 1];
    return;
  }
  next[0] = dist_[0] + prev[0];
  for (std::size_t j = 1; j < m; ++j)
    next[j] = dist_[j] + std::min({prev[j - 1], prev[j], next[j - 1]});
}

void DtwRow::push(Vec3 p) {
  advance(p, row_, scratch_);
  row_.swap(scratch_);
  ++query_size_;
}

double DtwRow::cost() const {
  if (query_size_ == 0) throw InvalidArgument("DTW of an empty query");
  return row_.back();
}

double DtwRow::cost_if_appended(Vec3 p) const {
  advance(p, row_, scratch_);
  return scratch_.back();
}

double dtw(const Path& p, const Path& q) {
  DtwRow row(q);
  for (const Vec3& v : p.points()) row.push(v);
  return row.cost();
}

double ndtw_from_cost(double cost, std::size_t reference_points, double d_th) {
  if (!(d_th > 0.0)) throw InvalidArgument("nDTW threshold must be positive");
  return std::exp(-cost / (static_cast<double>(reference_points) * d_th));
}

double ndtw(const Path& p, const Path& reference, double d_th) {
  return ndtw_from_cost(dtw(p, reference), reference.size(), d_th);
}

MetricsReport evaluate_episode(const Path& executed, const Path& gt, const StepConfig& cfg) {
  MetricsReport r;
  const Vec3 goal = gt.back();
  r.ne = distance(executed.back(), goal);
  r.success = r.ne <= cfg.success_radius;
  double closest = r.ne;
  for (const Vec3& p : executed.points()) closest = std::min(closest, distance(p, goal));
  r.oracle_success = closest <= cfg.success_radius;
  r.ndtw = ndtw(executed, gt, cfg.success_radius);
  r.sdtw = r.success ? r.ndtw : 0.0;
  return r;
}

AggregateMetrics aggregate(std::span<const MetricsReport> reports) {
  AggregateMetrics a;
  a.episodes = reports.size();
  if (reports.empty()) return a;
  for (const MetricsReport& r : reports) {
    a.ne += r.ne;
    a.sr += r.success ? 1.0 : 0.0;
    a.osr += r.oracle_success ? 1.0 : 0.0;
    a.ndtw += r.ndtw;
    a.sdtw += r.sdtw;
  }
  const double n = static_cast<double>(reports.size());
  a.ne /= n;
  a.sr /= n;
  a.osr /= n;
  a.ndtw /= n;
  a.sdtw /= n;
  return a;
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", fraction * 100.0);
  return buf;
}

}  // namespace avln
