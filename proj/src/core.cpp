#include "avln/core.hpp"

#include <array>
#include <numbers>

namespace avln {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

constexpr std::array<std::string_view, 8> kActionNames = {
    "MoveForward", "TurnLeft", "TurnRight", "Ascend", "Descend", "MoveLeft", "MoveRight", "Stop"};

}  // namespace

double wrap_degrees(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0.0) w += 360.0;
  // fmod of a tiny negative can round back up to 360.
  if (w >= 360.0) w = 0.0;
  return w;
}

double wrap_signed_degrees(double deg) {
  double w = wrap_degrees(deg);
  if (w >= 180.0) w -= 360.0;
  return w;
}

Vec3 Heading::forward() const {
  if (degrees_ == 0.0) return {1.0, 0.0, 0.0};
  if (degrees_ == 90.0) return {0.0, -1.0, 0.0};
  if (degrees_ == 180.0) return {-1.0, 0.0, 0.0};
  if (degrees_ == 270.0) return {0.0, 1.0, 0.0};
  const double r = degrees_ * kDegToRad;
  return {std::cos(r), -std::sin(r), 0.0};
}

std::string_view to_string(Action a) { return kActionNames[static_cast<std::size_t>(a)]; }

Action action_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kActionNames.size(); ++i) {
    if (kActionNames[i] == s) return static_cast<Action>(i);
  }
  throw InvalidArgument("unknown action: " + std::string(s));
}

void StepConfig::validate() const {
  if (!(horizontal_step > 0.0)) throw InvalidArgument("horizontal_step must be positive");
  if (!(vertical_step > 0.0)) throw InvalidArgument("vertical_step must be positive");
  if (!(turn_increment > 0.0) || turn_increment > 360.0)
    throw InvalidArgument("turn_increment must be in (0, 360]");
  const double turns = 360.0 / turn_increment;
  if (turns != std::floor(turns)) throw InvalidArgument("turn_increment must divide 360");
  if (!(success_radius > 0.0)) throw InvalidArgument("success_radius must be positive");
  if (max_steps <= 0) throw InvalidArgument("max_steps must be positive");
}

Path::Path(std::vector<Vec3> points) : points_(std::move(points)) {
  if (points_.empty()) throw InvalidArgument("a path needs at least one point");
}

Path Path::with_appended(Vec3 p) const {
  Path out = *this;
  out.points_.push_back(p);
  return out;
}

Pose apply_action(const Pose& pose, Action action, const StepConfig& cfg) {
  Pose next = pose;
  switch (action) {
    case Action::MoveForward:
      next.position = pose.position + pose.heading.forward() * cfg.horizontal_step;
      break;
    case Action::TurnLeft:
      next.heading = pose.heading.rotated(-cfg.turn_increment);
      break;
    case Action::TurnRight:
      next.heading = pose.heading.rotated(cfg.turn_increment);
      break;
    case Action::Ascend:
      next.position.z = pose.position.z + cfg.vertical_step;
      break;
    case Action::Descend:
      next.position.z = pose.position.z - cfg.vertical_step;
      break;
    case Action::MoveLeft:
      next.position = pose.position + pose.heading.rotated(-90.0).forward() * cfg.horizontal_step;
      break;
    case Action::MoveRight:
      next.position = pose.position + pose.heading.rotated(90.0).forward() * cfg.horizontal_step;
      break;
    case Action::Stop:
      throw InvalidArgument("Stop is not a motion; the caller ends the episode");
  }
  return next;
}

double bearing_of(Vec3 d) {
  // Axis-aligned cases are exact so that grid motion stays on the grid.
  if (d.y == 0.0) return d.x > 0.0 ? 0.0 : 180.0;
  if (d.x == 0.0) return d.y < 0.0 ? 90.0 : 270.0;
  return wrap_degrees(std::atan2(-d.y, d.x) * kRadToDeg);
}

std::optional<double> relative_heading(const Pose& pose, Vec3 target) {
  const Vec3 d = target - pose.position;
  if (d.x == 0.0 && d.y == 0.0) return std::nullopt;
  return wrap_signed_degrees(bearing_of(d) - pose.heading.degrees());
}

}  // namespace avln
