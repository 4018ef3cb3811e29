#include <cmath>

#include "avln/env.hpp"
#include "avln/rng.hpp"

namespace avln {

Scene generate_city(const CityParams& p) {
  if (!(p.extent > 0.0) || !std::isfinite(p.extent)) throw InvalidArgument("extent must be positive");
  if (!(p.building_density >= 0.0 && p.building_density <= 1.0))
    throw InvalidArgument("building_density must be in [0, 1]");
  if (!(p.voxel_size > 0.0)) throw InvalidArgument("voxel_size must be positive");
  if (!(p.max_height >= 2.0 * p.voxel_size))
    throw InvalidArgument("max_height must be at least two voxels");
  if (!(p.block_size >= p.voxel_size) || !(p.street_width >= 0.0) || !(p.headroom >= 0.0))
    throw InvalidArgument("block_size, street_width or headroom out of range");

  const double v = p.voxel_size;
  const auto nxy = static_cast<std::uint32_t>(std::ceil(p.extent / v));
  const auto nz = static_cast<std::uint32_t>(std::ceil((p.max_height + p.headroom) / v)) + 1;
  SceneBuilder builder(v, Vec3{0.0, 0.0, 0.0}, VoxelDims{nxy, nxy, nz});

  // Ground layer: everything with z below one voxel is solid.
  builder.fill({0, 0, 0}, {nxy, nxy, 1});

  const double pitch = p.block_size + p.street_width;
  const auto blocks = static_cast<std::uint32_t>(std::floor(p.extent / pitch));
  const auto max_layers = static_cast<std::uint64_t>(std::floor(p.max_height / v));
  Rng rng(hash_combine(p.seed, 0x63697479ULL));
  for (std::uint32_t bx = 0; bx < blocks; ++bx) {
    for (std::uint32_t by = 0; by < blocks; ++by) {
      // Always draw both values so the layout of one block never shifts others.
      const bool build = rng.uniform() < p.building_density;
      const std::uint64_t layers = 2 + rng.below(max_layers - 1);
      if (!build) continue;
      const double x0 = bx * pitch + p.street_width / 2.0;
      const double y0 = by * pitch + p.street_width / 2.0;
      const auto lo = [&](double m) { return static_cast<std::uint32_t>(std::ceil(m / v)); };
      builder.fill({lo(x0), lo(y0), 0},
                   {lo(x0 + p.block_size), lo(y0 + p.block_size), static_cast<std::uint32_t>(layers)});
    }
  }

  std::string id = p.scene_id.empty() ? "city-" + std::to_string(p.seed) : p.scene_id;
  Scene scene = std::move(builder).build(id, p.feature_dim, hash_combine(p.seed, 0x66656174ULL));
  CityParams recorded = p;
  recorded.scene_id = id;
  scene.set_generator(recorded);
  return scene;
}

}  // namespace avln
