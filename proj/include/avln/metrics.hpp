#pragma once

// Trajectory metrics: DTW, nDTW, navigation error, success, oracle success
// and success-gated nDTW.

#include <span>
#include <string>
#include <vector>

#include "avln/core.hpp"

namespace avln {

/// Incremental DTW against a fixed reference path. Query points are pushed one
/// at a time; the cumulative-cost row for the current query prefix is kept so
/// that extending by one more point costs O(|reference|).
class DtwRow {
 public:
  explicit DtwRow(const Path& reference);

  void push(Vec3 p);
  std::size_t query_size() const { return query_size_; }
  std::size_t reference_size() const { return xs_.size(); }

  /// DTW cost of the pushed query against the reference. Requires one push.
  double cost() const;

  /// DTW cost if `p` were pushed next; does not modify the row.
  double cost_if_appended(Vec3 p) const;

 private:
  void advance(Vec3 p, std::span<const double> prev, std::span<double> next) const;

  std::vector<double> xs_, ys_, zs_;
  std::vector<double> row_;
  mutable std::vector<double> scratch_;
  mutable std::vector<double> dist_;
  std::size_t query_size_ = 0;
};

/// Classic boundary-matched DTW with Euclidean point cost and
/// {match, insert, delete} steps.
double dtw(const Path& p, const Path& q);

/// exp(-cost / (reference_points * d_th)).
double ndtw_from_cost(double cost, std::size_t reference_points, double d_th);

double ndtw(const Path& p, const Path& reference, double d_th = 20.0);

struct MetricsReport {
  double ne = 0.0;
  bool success = false;
  bool oracle_success = false;
  double ndtw = 0.0;
  double sdtw = 0.0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

MetricsReport evaluate_episode(const Path& executed, const Path& gt, const StepConfig& cfg);

struct AggregateMetrics {
  std::size_t episodes = 0;
  double ne = 0.0;    // mean meters
  double sr = 0.0;    // fraction
  double osr = 0.0;   // fraction
  double ndtw = 0.0;  // mean
  double sdtw = 0.0;  // mean

  friend bool operator==(const AggregateMetrics&, const AggregateMetrics&) = default;
};

/// Means in input order. Empty input gives an all-zero aggregate.
AggregateMetrics aggregate(std::span<const MetricsReport> reports);

/// Fraction rendered as a percentage with one decimal, e.g. 0.075 -> "7.5".
std::string format_percent(double fraction);

}  // namespace avln
