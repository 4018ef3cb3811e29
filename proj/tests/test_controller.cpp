#include <doctest.h>

#include <algorithm>

#include "avln/controller.hpp"
#include "avln/rng.hpp"

using namespace avln;

namespace {

const StepConfig kCfg{};

const Scene& open_air() {
  static const Scene s = Scene::empty("air", 5.0, {-500, -500, 0}, {200, 200, 40});
  return s;
}

int count(const ControlOutcome& o, Action a) {
  return static_cast<int>(std::count(o.actions.begin(), o.actions.end(), a));
}

}  // namespace

TEST_CASE("aligned single step") {
  const auto o = go_to(open_air(), Pose{{0, 0, 10}, Heading(0)}, {5, 0, 10}, kCfg, 100);
  CHECK(o.actions == std::vector<Action>{Action::MoveForward});
  CHECK(o.reached);
  CHECK(o.final_pose.position == Vec3{5, 0, 10});
  CHECK(o.poses.size() == 1);
}

TEST_CASE("a target 90 degrees to the left takes six turns then a step") {
  const auto o = go_to(open_air(), Pose{{0, 0, 10}, Heading(0)}, {0, 5, 10}, kCfg, 100);
  std::vector<Action> expected(6, Action::TurnLeft);
  expected.push_back(Action::MoveForward);
  CHECK(o.actions == expected);
  CHECK(o.reached);
  const auto r = go_to(open_air(), Pose{{0, 0, 10}, Heading(0)}, {0, -5, 10}, kCfg, 100);
  CHECK(count(r, Action::TurnRight) == 6);
  CHECK(r.actions.back() == Action::MoveForward);
}

TEST_CASE("forward comes before the vertical move") {
  const auto o = go_to(open_air(), Pose{{0, 0, 10}, Heading(0)}, {5, 0, 12}, kCfg, 100);
  CHECK(o.actions == std::vector<Action>{Action::MoveForward, Action::Ascend});
  CHECK(o.reached);
  const auto up = go_to(open_air(), Pose{{0, 0, 10}, Heading(0)}, {0, 0, 16}, kCfg, 100);
  CHECK(up.actions == std::vector<Action>(3, Action::Ascend));
  const auto down = go_to(open_air(), Pose{{0, 0, 10}, Heading(0)}, {0, 0, 6}, kCfg, 100);
  CHECK(down.actions == std::vector<Action>(2, Action::Descend));
}

TEST_CASE("already within half a step does nothing") {
  const auto o = go_to(open_air(), Pose{{0, 0, 10}, Heading(0)}, {2.5, 0, 11}, kCfg, 100);
  CHECK(o.actions.empty());
  CHECK(o.reached);
  CHECK(within_half_step({0, 0, 10}, {2.5, 0, 11}, kCfg));
  CHECK_FALSE(within_half_step({0, 0, 10}, {2.51, 0, 10}, kCfg));
  CHECK_FALSE(within_half_step({0, 0, 10}, {0, 0, 11.01}, kCfg));
}

TEST_CASE("budget exhaustion returns a partial outcome") {
  const auto o = go_to(open_air(), Pose{{0, 0, 10}, Heading(0)}, {100, 0, 10}, kCfg, 7);
  CHECK(o.actions.size() == 7);
  CHECK_FALSE(o.reached);
  CHECK(o.final_pose.position == Vec3{35, 0, 10});
  CHECK_THROWS_AS(go_to(open_air(), Pose{{0, 0, 10}, Heading(0)}, {5, 0, 10}, kCfg, 0),
                  InvalidArgument);
}

TEST_CASE("lattice targets stay inside the action bound") {
  Rng rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const Pose start{{rng.uniform(-100, 100), rng.uniform(-100, 100), 20 + 2.0 * rng.below(20)},
                     Heading(15.0 * static_cast<double>(rng.below(24)))};
    const double moves = static_cast<double>(rng.below(12));
    const double climbs = static_cast<double>(rng.below(21)) - 10.0;
    const Vec3 target = start.position +
                        Heading(15.0 * static_cast<double>(rng.below(24))).forward() * (5.0 * moves) +
                        Vec3{0, 0, 2.0 * climbs};
    const auto o = go_to(open_air(), start, target, kCfg, 1000);
    const Vec3 d = target - start.position;
    const double bound = d.horizontal_norm() / 5.0 + std::abs(d.z) / 2.0 + 12 + 1;
    CHECK(o.reached);
    CHECK(static_cast<double>(o.actions.size()) <= bound);
    CHECK(count(o, Action::MoveLeft) + count(o, Action::MoveRight) + count(o, Action::Stop) == 0);
    CHECK(o.ascents_for_avoidance == 0);
  }
}

TEST_CASE("off-lattice targets are reached and the reached flag is honest") {
  Rng rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    const Pose start{{rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(20, 150)},
                     Heading(15.0 * static_cast<double>(rng.below(24)))};
    const Vec3 target{rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(20, 150)};
    const auto o = go_to(open_air(), start, target, kCfg, 1000);
    CHECK(o.reached == within_half_step(o.final_pose.position, target, kCfg));
    CHECK(count(o, Action::MoveLeft) + count(o, Action::MoveRight) == 0);
    CHECK(o.poses.size() == o.actions.size());
    // Horizontal distance never grows once the agent has started moving.
    double last = 1e18;
    for (std::size_t i = 0; i < o.actions.size(); ++i) {
      if (o.actions[i] != Action::MoveForward) continue;
      const double h = (target - o.poses[i].position).horizontal_norm();
      CHECK(h <= last + 1e-9);
      last = h;
    }
  }
}

TEST_CASE("a wall ahead is climbed over") {
  // Wall of voxels x in [10, 15), full width, up to z = 30.
  SceneBuilder b(5.0, {0, 0, 0}, {10, 4, 20});
  b.fill({2, 0, 0}, {3, 4, 6});
  const Scene s = std::move(b).build("wall");
  const auto o = go_to(s, Pose{{2.5, 10, 12}, Heading(0)}, {27.5, 10, 12}, kCfg, 200);
  CHECK(o.reached);
  CHECK(o.ascents_for_avoidance > 0);
  CHECK(count(o, Action::Ascend) >= o.ascents_for_avoidance);
  for (const Pose& p : o.poses) CHECK_FALSE(is_occupied(s, p.position));
}

TEST_CASE("a climb through the ceiling is stuck") {
  // Wall reaching the top of a low scene.
  SceneBuilder b(5.0, {0, 0, 0}, {10, 4, 4});
  b.fill({2, 0, 0}, {3, 4, 4});
  const Scene s = std::move(b).build("ceiling");
  try {
    go_to(s, Pose{{2.5, 10, 7}, Heading(0)}, {27.5, 10, 7}, kCfg, 200);
    FAIL("expected StuckError");
  } catch (const StuckError& e) {
    CHECK_FALSE(e.partial().reached);
    CHECK(e.partial().actions.size() == e.partial().poses.size());
  }
}

TEST_CASE("a target straddled by two lattice points does not ping-pong") {
  // Both (0, 0) and (5, 0) sit just over half a step away.
  const Vec3 target{2.5, 0.3, 10};
  const auto o = go_to(open_air(), Pose{{0, 0, 10}, Heading(0)}, target, kCfg, 1000);
  CHECK_FALSE(o.reached);
  CHECK(o.actions.size() <= 2);
  const auto back = go_to(open_air(), Pose{{5, 0, 10}, Heading(180)}, target, kCfg, 1000);
  CHECK_FALSE(back.reached);
  CHECK(back.actions.size() <= 2);

  // A nearby off-bearing heading can still land inside the disc.
  const Vec3 near{2.0, 2.0, 10};
  const auto r = go_to(open_air(), Pose{{0, 0, 10}, Heading(0)}, near, kCfg, 1000);
  CHECK(r.reached);
  CHECK(r.actions.size() <= 8);
}
