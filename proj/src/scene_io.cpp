// AVGRID1 container, all fields little-endian:
//
//   offset  size  field
//        0     8  magic "AVGRID1\0"
//        8     8  voxel_size (f64)
//       16    12  dims nx, ny, nz (u32 each)
//       28    48  bounds min x, y, z then max x, y, z (f64 each)
//       76     8  feature_seed (u64)
//       84     4  feature_dim (u32)
//       88     -  occupancy, ceil(nx*ny*nz / 8) bytes; voxel i = x + nx*(y + ny*z)
//                 is bit (i % 8) of byte i / 8
//
// The manifest `<file>.json` carries scene_id and generator parameters.

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "avln/env.hpp"

namespace avln {

namespace {

constexpr char kMagic[8] = {'A', 'V', 'G', 'R', 'I', 'D', '1', '\0'};
constexpr std::size_t kHeaderSize = 88;

template <typename T>
void put_le(std::string& out, T value) {
  std::uint64_t bits = 0;
  if constexpr (std::is_same_v<T, double>)
    bits = std::bit_cast<std::uint64_t>(value);
  else
    bits = static_cast<std::uint64_t>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(const std::string& in, std::size_t offset) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    bits |= std::uint64_t{static_cast<unsigned char>(in[offset + i])} << (8 * i);
  if constexpr (std::is_same_v<T, double>)
    return std::bit_cast<double>(bits);
  else
    return static_cast<T>(bits);
}

std::filesystem::path manifest_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

nlohmann::json city_to_json(const CityParams& p) {
  return {{"seed", p.seed},
          {"extent", p.extent},
          {"building_density", p.building_density},
          {"max_height", p.max_height},
          {"voxel_size", p.voxel_size},
          {"block_size", p.block_size},
          {"street_width", p.street_width},
          {"headroom", p.headroom},
          {"feature_dim", p.feature_dim}};
}

CityParams city_from_json(const nlohmann::json& j, const std::string& scene_id) {
  CityParams p;
  p.seed = j.at("seed").get<std::uint64_t>();
  p.extent = j.at("extent").get<double>();
  p.building_density = j.at("building_density").get<double>();
  p.max_height = j.at("max_height").get<double>();
  p.voxel_size = j.at("voxel_size").get<double>();
  p.block_size = j.at("block_size").get<double>();
  p.street_width = j.at("street_width").get<double>();
  p.headroom = j.at("headroom").get<double>();
  p.feature_dim = j.at("feature_dim").get<std::uint32_t>();
  p.scene_id = scene_id;
  return p;
}

}  // namespace

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  std::string buf;
  buf.append(kMagic, sizeof(kMagic));
  put_le(buf, scene.voxel_size());
  put_le(buf, scene.dims().nx);
  put_le(buf, scene.dims().ny);
  put_le(buf, scene.dims().nz);
  const Bounds& b = scene.bounds();
  for (double v : {b.min.x, b.min.y, b.min.z, b.max.x, b.max.y, b.max.z}) put_le(buf, v);
  put_le(buf, scene.feature_seed());
  put_le(buf, scene.feature_dim());

  const std::uint64_t nbytes = (scene.dims().count() + 7) / 8;
  const auto& words = scene.occupancy_words();
  for (std::uint64_t i = 0; i < nbytes; ++i)
    buf.push_back(static_cast<char>((words[i / 8] >> (8 * (i % 8))) & 0xFF));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write scene file: " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));

  nlohmann::json manifest = {{"format", "AVGRID1"}, {"scene_id", scene.scene_id()}};
  manifest["generator"] = scene.generator() ? city_to_json(*scene.generator()) : nlohmann::json();
  std::ofstream mout(manifest_path(path));
  if (!mout) throw Error("cannot write scene manifest: " + manifest_path(path).string());
  mout << manifest.dump(2) << '\n';
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read scene file: " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < kHeaderSize || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
    throw Error("not an AVGRID1 scene: " + path.string());

  const auto voxel = get_le<double>(buf, 8);
  const VoxelDims dims{get_le<std::uint32_t>(buf, 16), get_le<std::uint32_t>(buf, 20),
                       get_le<std::uint32_t>(buf, 24)};
  const Vec3 min{get_le<double>(buf, 28), get_le<double>(buf, 36), get_le<double>(buf, 44)};
  const Vec3 max{get_le<double>(buf, 52), get_le<double>(buf, 60), get_le<double>(buf, 68)};
  const auto seed = get_le<std::uint64_t>(buf, 76);
  const auto fdim = get_le<std::uint32_t>(buf, 84);

  const std::uint64_t nbytes = (dims.count() + 7) / 8;
  if (buf.size() != kHeaderSize + nbytes) throw Error("truncated scene file: " + path.string());
  std::vector<std::uint64_t> words((dims.count() + 63) / 64, 0);
  for (std::uint64_t i = 0; i < nbytes; ++i)
    words[i / 8] |= std::uint64_t{static_cast<unsigned char>(buf[kHeaderSize + i])} << (8 * (i % 8));

  std::string scene_id = path.stem().string();
  std::optional<CityParams> generator;
  if (std::ifstream min_in(manifest_path(path)); min_in) {
    const auto manifest = nlohmann::json::parse(min_in);
    scene_id = manifest.at("scene_id").get<std::string>();
    if (manifest.contains("generator") && !manifest["generator"].is_null())
      generator = city_from_json(manifest["generator"], scene_id);
  }

  Scene scene(scene_id, voxel, min, dims, std::move(words), fdim, seed);
  if (!(scene.bounds().max == max)) throw Error("scene bounds disagree with dimensions");
  if (generator) scene.set_generator(*generator);
  return scene;
}

}  // namespace avln
