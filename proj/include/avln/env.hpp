#pragma once

// Voxel-city environments: occupancy queries, segment collision, six-view
// skybox observations with deterministic features, a procedural city
// generator, and the AVGRID1 scene container.

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "avln/core.hpp"

namespace avln {

class OutOfBounds : public Error {
 public:
  using Error::Error;
};

struct Bounds {
  Vec3 min;
  Vec3 max;

  /// Closed-low, open-high containment.
  bool contains(Vec3 p) const {
    return p.x >= min.x && p.x < max.x && p.y >= min.y && p.y < max.y && p.z >= min.z &&
           p.z < max.z;
  }
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

struct VoxelDims {
  std::uint32_t nx = 0;
  std::uint32_t ny = 0;
  std::uint32_t nz = 0;

  std::uint64_t count() const { return std::uint64_t{nx} * ny * nz; }
  friend bool operator==(const VoxelDims&, const VoxelDims&) = default;
};

struct CityParams {
  std::uint64_t seed = 0;
  double extent = 400.0;          // x/y side length in meters
  double building_density = 0.15;  // probability that a block holds a building
  double max_height = 60.0;
  double voxel_size = 2.0;
  double block_size = 30.0;
  double street_width = 10.0;
  double headroom = 40.0;  // free air above the tallest allowed building
  std::uint32_t feature_dim = 64;
  std::string scene_id;  // defaults to "city-<seed>"

  friend bool operator==(const CityParams&, const CityParams&) = default;
};

/// Feature layout constants.
inline constexpr int kWindowVoxels = 9;
inline constexpr double kMaxDepthRange = 100.0;
inline constexpr std::uint32_t kFeatureTail = 7;  // depth + 6-way direction tag

/// Immutable voxel occupancy scene.
class Scene {
 public:
  /// `occupancy` holds one bit per voxel, index x + nx * (y + ny * z).
  Scene(std::string scene_id, double voxel_size, Vec3 origin, VoxelDims dims,
        std::vector<std::uint64_t> occupancy, std::uint32_t feature_dim,
        std::uint64_t feature_seed);

  /// All-free scene of the given size.
  static Scene empty(std::string scene_id, double voxel_size, Vec3 origin, VoxelDims dims,
                     std::uint32_t feature_dim = 64, std::uint64_t feature_seed = 0);

  const std::string& scene_id() const { return scene_id_; }
  double voxel_size() const { return voxel_size_; }
  const VoxelDims& dims() const { return dims_; }
  const Bounds& bounds() const { return bounds_; }
  std::uint32_t feature_dim() const { return feature_dim_; }
  std::uint64_t feature_seed() const { return feature_seed_; }
  const std::vector<std::uint64_t>& occupancy_words() const { return occupancy_; }

  /// Voxel lookup; indices outside the grid read as solid.
  bool voxel(std::int64_t ix, std::int64_t iy, std::int64_t iz) const;

  /// Voxel index containing p (floor convention), without range checking.
  std::array<std::int64_t, 3> voxel_index(Vec3 p) const;

  /// Row-major (feature_dim - 7) x 729 random sign matrix, scaled by 1/27.
  const std::vector<double>& projection() const { return *projection_; }

  const std::optional<CityParams>& generator() const { return generator_; }
  void set_generator(CityParams params) { generator_ = std::move(params); }

  /// Occupancy and header equality; generator metadata is ignored.
  bool same_contents(const Scene& other) const;

 private:
  std::string scene_id_;
  double voxel_size_;
  VoxelDims dims_;
  Bounds bounds_;
  std::vector<std::uint64_t> occupancy_;
  std::uint32_t feature_dim_;
  std::uint64_t feature_seed_;
  std::shared_ptr<const std::vector<double>> projection_;
  std::optional<CityParams> generator_;
};

/// Mutable occupancy grid used to assemble scenes.
class SceneBuilder {
 public:
  SceneBuilder(double voxel_size, Vec3 origin, VoxelDims dims);

  void set(std::uint32_t ix, std::uint32_t iy, std::uint32_t iz, bool solid = true);
  /// Marks every voxel whose index lies in [lo, hi) on each axis.
  void fill(std::array<std::uint32_t, 3> lo, std::array<std::uint32_t, 3> hi);

  Scene build(std::string scene_id, std::uint32_t feature_dim = 64,
              std::uint64_t feature_seed = 0) &&;

 private:
  double voxel_size_;
  Vec3 origin_;
  VoxelDims dims_;
  std::vector<std::uint64_t> words_;
};

enum class ViewDirection { Front, Left, Right, Back, Up, Down };

inline constexpr std::array<ViewDirection, 6> kAllViews = {
    ViewDirection::Front, ViewDirection::Left, ViewDirection::Right,
    ViewDirection::Back,  ViewDirection::Up,   ViewDirection::Down};

std::string_view to_string(ViewDirection v);
ViewDirection view_from_string(std::string_view s);
bool is_horizontal(ViewDirection v);

/// Unit orientation of a view for the given pose.
Vec3 view_orientation(const Pose& pose, ViewDirection v);
/// Relative heading of a view: Front 0, Right 90, Back 180, Left -90, Up/Down 0.
double view_relative_heading(ViewDirection v);
/// Relative elevation: Up 90, Down -90, otherwise 0.
double view_relative_elevation(ViewDirection v);

struct Observation {
  ViewDirection direction;
  Vec3 orientation;
  std::vector<double> feature;
  double relative_heading;
  double relative_elevation;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct Skybox {
  Pose pose;
  std::array<Observation, 6> observations;  // in kAllViews order

  const Observation& at(ViewDirection v) const {
    return observations[static_cast<std::size_t>(v)];
  }
  friend bool operator==(const Skybox&, const Skybox&) = default;
};

/// True iff the voxel containing `point` is solid. Outside the bounds is solid.
bool is_occupied(const Scene& scene, Vec3 point);

/// True iff any sample along [a, b] at spacing <= voxel_size / 2 is occupied.
bool segment_blocked(const Scene& scene, Vec3 a, Vec3 b);

/// Feature descriptor of one view direction from `position`.
std::vector<double> view_feature(const Scene& scene, Vec3 position, Vec3 orientation,
                                 ViewDirection tag);

/// Six observations at `pose`. Throws OutOfBounds when the pose is outside.
Skybox get_skybox(const Scene& scene, const Pose& pose);

/// Deterministic Manhattan-style block city with a solid ground layer.
Scene generate_city(const CityParams& params);

/// Writes the AVGRID1 container to `path` and a JSON manifest to `path` + ".json".
void save_scene(const Scene& scene, const std::filesystem::path& path);

/// Reads a scene written by save_scene. The manifest is optional.
Scene load_scene(const std::filesystem::path& path);

}  // namespace avln
