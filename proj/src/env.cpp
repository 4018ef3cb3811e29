#include "avln/env.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "avln/rng.hpp"
#include "avln/simd.hpp"

namespace avln {

namespace {

constexpr int kWindowCells = kWindowVoxels * kWindowVoxels * kWindowVoxels;

std::shared_ptr<const std::vector<double>> make_projection(std::uint32_t feature_dim,
                                                           std::uint64_t seed) {
  const std::size_t rows = feature_dim - kFeatureTail;
  auto m = std::make_shared<std::vector<double>>(rows * kWindowCells);
  const double scale = 1.0 / std::sqrt(static_cast<double>(kWindowCells));
  Rng rng(hash_combine(seed, 0x70726f6aULL));
  for (double& v : *m) v = (rng.next_u64() & 1U) ? scale : -scale;
  return m;
}

}  // namespace

Scene::Scene(std::string scene_id, double voxel_size, Vec3 origin, VoxelDims dims,
             std::vector<std::uint64_t> occupancy, std::uint32_t feature_dim,
             std::uint64_t feature_seed)
    : scene_id_(std::move(scene_id)),
      voxel_size_(voxel_size),
      dims_(dims),
      occupancy_(std::move(occupancy)),
      feature_dim_(feature_dim),
      feature_seed_(feature_seed) {
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size))
    throw InvalidArgument("voxel_size must be positive");
  if (dims.nx == 0 || dims.ny == 0 || dims.nz == 0)
    throw InvalidArgument("scene dimensions must be positive");
  if (!origin.finite()) throw InvalidArgument("scene origin must be finite");
  if (occupancy_.size() != (dims.count() + 63) / 64)
    throw InvalidArgument("occupancy size does not match dimensions");
  if (feature_dim <= kFeatureTail)
    throw InvalidArgument("feature_dim must exceed " + std::to_string(kFeatureTail));
  bounds_.min = origin;
  bounds_.max = origin + Vec3{dims.nx * voxel_size, dims.ny * voxel_size, dims.nz * voxel_size};
  projection_ = make_projection(feature_dim_, feature_seed_);
}

Scene Scene::empty(std::string scene_id, double voxel_size, Vec3 origin, VoxelDims dims,
                   std::uint32_t feature_dim, std::uint64_t feature_seed) {
  return Scene(std::move(scene_id), voxel_size, origin, dims,
               std::vector<std::uint64_t>((dims.count() + 63) / 64, 0), feature_dim,
               feature_seed);
}

bool Scene::voxel(std::int64_t ix, std::int64_t iy, std::int64_t iz) const {
  if (ix < 0 || iy < 0 || iz < 0 || ix >= dims_.nx || iy >= dims_.ny || iz >= dims_.nz)
    return true;
  const std::uint64_t i = static_cast<std::uint64_t>(ix) +
                          dims_.nx * (static_cast<std::uint64_t>(iy) +
                                      std::uint64_t{dims_.ny} * static_cast<std::uint64_t>(iz));
  return (occupancy_[i >> 6] >> (i & 63)) & 1U;
}

std::array<std::int64_t, 3> Scene::voxel_index(Vec3 p) const {
  const Vec3 rel = p - bounds_.min;
  return {static_cast<std::int64_t>(std::floor(rel.x / voxel_size_)),
          static_cast<std::int64_t>(std::floor(rel.y / voxel_size_)),
          static_cast<std::int64_t>(std::floor(rel.z / voxel_size_))};
}

bool Scene::same_contents(const Scene& o) const {
  return scene_id_ == o.scene_id_ && voxel_size_ == o.voxel_size_ && dims_ == o.dims_ &&
         bounds_ == o.bounds_ && occupancy_ == o.occupancy_ && feature_dim_ == o.feature_dim_ &&
         feature_seed_ == o.feature_seed_;
}

SceneBuilder::SceneBuilder(double voxel_size, Vec3 origin, VoxelDims dims)
    : voxel_size_(voxel_size), origin_(origin), dims_(dims), words_((dims.count() + 63) / 64, 0) {}

void SceneBuilder::set(std::uint32_t ix, std::uint32_t iy, std::uint32_t iz, bool solid) {
  if (ix >= dims_.nx || iy >= dims_.ny || iz >= dims_.nz)
    throw OutOfBounds("voxel index outside the grid");
  const std::uint64_t i = ix + std::uint64_t{dims_.nx} * (iy + std::uint64_t{dims_.ny} * iz);
  if (solid)
    words_[i >> 6] |= std::uint64_t{1} << (i & 63);
  else
    words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
}

void SceneBuilder::fill(std::array<std::uint32_t, 3> lo, std::array<std::uint32_t, 3> hi) {
  for (std::uint32_t z = lo[2]; z < std::min(hi[2], dims_.nz); ++z)
    for (std::uint32_t y = lo[1]; y < std::min(hi[1], dims_.ny); ++y)
      for (std::uint32_t x = lo[0]; x < std::min(hi[0], dims_.nx); ++x) set(x, y, z);
}

Scene SceneBuilder::build(std::string scene_id, std::uint32_t feature_dim,
                          std::uint64_t feature_seed) && {
  return Scene(std::move(scene_id), voxel_size_, origin_, dims_, std::move(words_), feature_dim,
               feature_seed);
}

std::string_view to_string(ViewDirection v) {
  switch (v) {
    case ViewDirection::Front: return "Front";
    case ViewDirection::Left: return "Left";
    case ViewDirection::Right: return "Right";
    case ViewDirection::Back: return "Back";
    case ViewDirection::Up: return "Up";
    case ViewDirection::Down: return "Down";
  }
  return "?";
}

ViewDirection view_from_string(std::string_view s) {
  for (ViewDirection v : kAllViews)
    if (to_string(v) == s) return v;
  throw InvalidArgument("unknown view direction: " + std::string(s));
}

bool is_horizontal(ViewDirection v) { return v != ViewDirection::Up && v != ViewDirection::Down; }

double view_relative_heading(ViewDirection v) {
  switch (v) {
    case ViewDirection::Left: return -90.0;
    case ViewDirection::Right: return 90.0;
    case ViewDirection::Back: return 180.0;
    default: return 0.0;
  }
}

double view_relative_elevation(ViewDirection v) {
  if (v == ViewDirection::Up) return 90.0;
  if (v == ViewDirection::Down) return -90.0;
  return 0.0;
}

Vec3 view_orientation(const Pose& pose, ViewDirection v) {
  if (v == ViewDirection::Up) return {0.0, 0.0, 1.0};
  if (v == ViewDirection::Down) return {0.0, 0.0, -1.0};
  return pose.heading.rotated(view_relative_heading(v)).forward();
}

bool is_occupied(const Scene& scene, Vec3 point) {
  if (!scene.bounds().contains(point)) return true;
  const auto idx = scene.voxel_index(point);
  return scene.voxel(idx[0], idx[1], idx[2]);
}

bool segment_blocked(const Scene& scene, Vec3 a, Vec3 b) {
  // Walk from the lexicographically smaller endpoint so (a, b) and (b, a)
  // visit bit-identical samples.
  if (std::tie(b.x, b.y, b.z) < std::tie(a.x, a.y, a.z)) std::swap(a, b);
  const double len = distance(a, b);
  const double spacing = scene.voxel_size() / 2.0;
  const auto n = static_cast<std::int64_t>(std::ceil(len / spacing));
  const Vec3 d = b - a;
  for (std::int64_t k = 0; k <= n; ++k) {
    const Vec3 p = k == n ? b : a + d * (static_cast<double>(k) / static_cast<double>(n));
    if (is_occupied(scene, p)) return true;
  }
  return false;
}

std::vector<double> view_feature(const Scene& scene, Vec3 position, Vec3 orientation,
                                 ViewDirection tag) {
  const double v = scene.voxel_size();
  const Vec3 center = position + orientation * (kWindowVoxels * v);
  const auto c = scene.voxel_index(center);
  constexpr int half = kWindowVoxels / 2;

  std::vector<double> bits(kWindowCells);
  std::size_t i = 0;
  for (int dz = -half; dz <= half; ++dz)
    for (int dy = -half; dy <= half; ++dy)
      for (int dx = -half; dx <= half; ++dx)
        bits[i++] = scene.voxel(c[0] + dx, c[1] + dy, c[2] + dz) ? 1.0 : 0.0;

  const std::size_t rows = scene.feature_dim() - kFeatureTail;
  std::vector<double> f(scene.feature_dim(), 0.0);
  simd::gemv(scene.projection(), rows, kWindowCells, bits, std::span<double>(f.data(), rows));

  double depth = 1.0;
  const double step = v / 2.0;
  const auto samples = static_cast<int>(kMaxDepthRange / step);
  for (int k = 1; k <= samples; ++k) {
    const double s = k * step;
    if (is_occupied(scene, position + orientation * s)) {
      depth = s / kMaxDepthRange;
      break;
    }
  }
  f[rows] = depth;
  f[rows + 1 + static_cast<std::size_t>(tag)] = 1.0;

  const double norm = std::sqrt(simd::dot(f, f));
  for (double& x : f) x /= norm;
  return f;
}

Skybox get_skybox(const Scene& scene, const Pose& pose) {
  if (!pose.position.finite() || !scene.bounds().contains(pose.position))
    throw OutOfBounds("pose outside scene bounds");
  Skybox box{pose, {}};
  for (ViewDirection v : kAllViews) {
    const Vec3 d = view_orientation(pose, v);
    box.observations[static_cast<std::size_t>(v)] =
        Observation{v, d, view_feature(scene, pose.position, d, v), view_relative_heading(v),
                    view_relative_elevation(v)};
  }
  return box;
}

}  // namespace avln
