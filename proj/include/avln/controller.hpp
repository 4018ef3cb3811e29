#pragma once

// Low-level control: drive the agent from its pose to a candidate position
// with primitive actions, climbing over anything in the way.

#include <vector>

#include "avln/core.hpp"
#include "avln/env.hpp"

namespace avln {

struct ControlOutcome {
  std::vector<Action> actions;
  std::vector<Pose> poses;  // pose after each action
  Pose final_pose;
  bool reached = false;
  int ascents_for_avoidance = 0;
};

/// Thrown when an avoidance climb is itself blocked or would exceed the scene
/// height. Carries the actions executed so far.
class StuckError : public Error {
 public:
  StuckError(const std::string& what, ControlOutcome partial)
      : Error(what), partial_(std::move(partial)) {}
  const ControlOutcome& partial() const { return partial_; }

 private:
  ControlOutcome partial_;
};

/// Horizontal distance <= s_h / 2 and vertical distance <= s_v / 2.
bool within_half_step(Vec3 position, Vec3 target, const StepConfig& cfg);

/// Repeats turn / forward / vertical until within half a step of `target` on
/// both axes, the budget of primitive actions runs out, or no action can make
/// progress (target unreachable). Never emits MoveLeft, MoveRight or Stop.
ControlOutcome go_to(const Scene& scene, const Pose& start, Vec3 target, const StepConfig& cfg,
                     int budget);

}  // namespace avln
