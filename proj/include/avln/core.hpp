#pragma once

// Domain types shared by every module: vectors, headings, the discrete action
// alphabet, step configuration, poses and paths.
//
// Frame: right-handed, z up, 1 unit = 1 meter. Heading 0 deg points along +x
// and grows clockwise when viewed from above, so heading 90 deg points along -y.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace avln {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
  friend constexpr bool operator==(Vec3 a, Vec3 b) = default;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double horizontal_norm() const { return std::sqrt(x * x + y * y); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

/// Elementwise product.
constexpr Vec3 hadamard(Vec3 a, Vec3 b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }

inline double distance(Vec3 a, Vec3 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Wraps any angle in degrees into [0, 360).
double wrap_degrees(double deg);

/// Wraps any angle in degrees into [-180, 180).
double wrap_signed_degrees(double deg);

class Heading {
 public:
  constexpr Heading() = default;
  explicit Heading(double degrees) : degrees_(wrap_degrees(degrees)) {}

  double degrees() const { return degrees_; }

  /// Horizontal unit vector for this heading. Exact for multiples of 90 deg.
  Vec3 forward() const;

  Heading rotated(double delta_degrees) const { return Heading(degrees_ + delta_degrees); }

  friend bool operator==(Heading a, Heading b) = default;

 private:
  double degrees_ = 0.0;
};

enum class Action { MoveForward, TurnLeft, TurnRight, Ascend, Descend, MoveLeft, MoveRight, Stop };

std::string_view to_string(Action a);
Action action_from_string(std::string_view s);

struct StepConfig {
  double horizontal_step = 5.0;
  double vertical_step = 2.0;
  double turn_increment = 15.0;
  double success_radius = 20.0;
  int max_steps = 1000;

  /// Throws InvalidArgument unless every field is in range.
  void validate() const;
};

struct Pose {
  Vec3 position;
  Heading heading;

  friend bool operator==(const Pose&, const Pose&) = default;
};

class Path {
 public:
  explicit Path(std::vector<Vec3> points);
  Path(std::initializer_list<Vec3> points) : Path(std::vector<Vec3>(points)) {}

  const std::vector<Vec3>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  const Vec3& operator[](std::size_t i) const { return points_[i]; }
  const Vec3& front() const { return points_.front(); }
  const Vec3& back() const { return points_.back(); }

  void push_back(Vec3 p) { points_.push_back(p); }
  Path with_appended(Vec3 p) const;

  friend bool operator==(const Path&, const Path&) = default;

 private:
  std::vector<Vec3> points_;
};

/// Applies one primitive action without collision checking. Rejects Stop.
Pose apply_action(const Pose& pose, Action action, const StepConfig& cfg);

/// Signed smallest rotation (degrees, [-180, 180)) that takes the heading onto
/// the horizontal bearing of `target`. Positive means turn right. Empty when
/// the target has no horizontal offset from the pose.
std::optional<double> relative_heading(const Pose& pose, Vec3 target);

/// Bearing in [0, 360) of a horizontal displacement under the frame convention.
double bearing_of(Vec3 displacement);

}  // namespace avln
