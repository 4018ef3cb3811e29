#include "avln/controller.hpp"

#include <cmath>

namespace avln {

bool within_half_step(Vec3 position, Vec3 target, const StepConfig& cfg) {
  const Vec3 d = target - position;
  return d.horizontal_norm() <= cfg.horizontal_step / 2.0 &&
         std::abs(d.z) <= cfg.vertical_step / 2.0;
}

namespace {

class Driver {
 public:
  Driver(const Scene& scene, const Pose& start, const StepConfig& cfg, int budget)
      : scene_(scene), cfg_(cfg), budget_(budget), pose_(start) {}

  bool has_budget() const { return used_ < budget_; }
  int budget_left() const { return budget_ - used_; }
  const Pose& pose() const { return pose_; }

  void emit(Action a, const Pose& next) {
    out_.actions.push_back(a);
    out_.poses.push_back(next);
    pose_ = next;
    ++used_;
  }

  /// Emits `a` unless the move collides; returns false when blocked.
  bool try_move(Action a) {
    const Pose next = apply_action(pose_, a, cfg_);
    if (segment_blocked(scene_, pose_.position, next.position)) return false;
    emit(a, next);
    return true;
  }

  void climb_to_avoid() {
    const double height = scene_.bounds().max.z - scene_.bounds().min.z;
    if ((out_.ascents_for_avoidance + 1) * cfg_.vertical_step > height)
      throw StuckError("avoidance climb exceeds scene height", finish());
    if (!try_move(Action::Ascend)) throw StuckError("avoidance climb blocked", finish());
    ++out_.ascents_for_avoidance;
    avoiding_ = true;
  }

  bool avoiding() const { return avoiding_; }
  void clear_avoiding() { avoiding_ = false; }

  ControlOutcome finish(Vec3 target) {
    out_.final_pose = pose_;
    out_.reached = within_half_step(pose_.position, target, cfg_);
    return std::move(out_);
  }

 private:
  ControlOutcome finish() {
    ControlOutcome partial = out_;
    partial.final_pose = pose_;
    partial.reached = false;
    return partial;
  }

  const Scene& scene_;
  const StepConfig& cfg_;
  int budget_;
  int used_ = 0;
  Pose pose_;
  bool avoiding_ = false;
  ControlOutcome out_;
};

}  // namespace

ControlOutcome go_to(const Scene& scene, const Pose& start, Vec3 target, const StepConfig& cfg,
                     int budget) {
  if (budget <= 0) throw InvalidArgument("go_to budget must be positive");
  if (!scene.bounds().contains(start.position)) throw OutOfBounds("go_to start outside scene");

  const double half_h = cfg.horizontal_step / 2.0;
  const double half_v = cfg.vertical_step / 2.0;
  const double half_turn = cfg.turn_increment / 2.0;
  Driver drv(scene, start, cfg, budget);

  // Set once no forward step can bring the agent horizontally closer.
  bool settled = false;
  auto horizontal_left = [&] { return (target - drv.pose().position).horizontal_norm(); };
  auto wants_horizontal = [&] { return !settled && horizontal_left() > half_h; };
  auto turn = [&](Action a) { drv.emit(a, apply_action(drv.pose(), a, cfg)); };

  while (!within_half_step(drv.pose().position, target, cfg) && drv.has_budget()) {
    bool acted = false;

    // Turn only while a forward move is still wanted.
    while (wants_horizontal() && drv.has_budget()) {
      const auto rel = relative_heading(drv.pose(), target);
      if (!rel || std::abs(*rel) < half_turn) break;
      turn(*rel > 0.0 ? Action::TurnRight : Action::TurnLeft);
      acted = true;
    }
    if (!drv.has_budget()) break;

    if (wants_horizontal()) {
      const double now = horizontal_left();
      const Vec3 ahead = apply_action(drv.pose(), Action::MoveForward, cfg).position;
      if ((target - ahead).horizontal_norm() >= now) {
        // Off-lattice target close by: the bearing step overshoots. Look for
        // the heading whose step lands inside the half-step disc.
        int best_turns = 0;
        double best = now;
        const int n = static_cast<int>(std::lround(360.0 / cfg.turn_increment));
        for (int k = -n / 2 + 1; k <= n / 2; ++k) {
          const Heading h = drv.pose().heading.rotated(k * cfg.turn_increment);
          const double d = (target - (drv.pose().position + h.forward() * cfg.horizontal_step))
                               .horizontal_norm();
          if (d < best || (d == best && std::abs(k) < std::abs(best_turns))) {
            best = d;
            best_turns = k;
          }
        }
        if (best <= half_h && drv.budget_left() > std::abs(best_turns)) {
          for (int k = 0; k < std::abs(best_turns); ++k)
            turn(best_turns > 0 ? Action::TurnRight : Action::TurnLeft);
        } else {
          settled = true;
        }
        acted = true;
      }
      if (!settled) {
        if (drv.try_move(Action::MoveForward))
          drv.clear_avoiding();
        else
          drv.climb_to_avoid();
        acted = true;
      }
    }
    if (!drv.has_budget()) break;

    const double dz = target.z - drv.pose().position.z;
    if (std::abs(dz) > half_v) {
      if (dz > 0.0) {
        acted = drv.try_move(Action::Ascend) || acted;
      } else if (!drv.avoiding()) {
        if (!drv.try_move(Action::Descend)) drv.climb_to_avoid();
        acted = true;
      }
    }

    if (!acted) break;
  }
  return drv.finish(target);
}

}  // namespace avln
