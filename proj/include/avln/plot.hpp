#pragma once

// Static top-down SVG of a scene with ground-truth and executed paths.

#include <optional>
#include <string>
#include <vector>

#include "avln/env.hpp"
#include "avln/runner.hpp"

namespace avln {

struct PlotInput {
  const Scene* scene = nullptr;
  std::optional<Path> gt;
  std::vector<Vec3> executed;
  double success_radius = 20.0;
  std::optional<BevSnapshot> bev;  // drawn as cell outlines shaded by state norm
  std::string title;
};

/// Building heights in gray, ground truth in green, executed path in blue,
/// the goal's success radius as a circle.
std::string render_svg(const PlotInput& in, double pixels_per_meter = 2.0);

}  // namespace avln
