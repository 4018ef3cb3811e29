#include <cmath>
#include <fstream>
#include <tuple>

#include <json.hpp>

#include "avln/rng.hpp"
#include "avln/runner.hpp"

namespace avln {

namespace {

using json = nlohmann::json;

constexpr std::string_view kEpisodeFormat = "avln-episodes";
constexpr int kEpisodeVersion = 1;

// Axis steps for headings 0, 90, 180, 270 under the frame convention.
constexpr int kDirX[4] = {1, 0, -1, 0};
constexpr int kDirY[4] = {0, -1, 0, 1};

struct Move {
  enum Kind { Forward, Left, Right, Up, Down } kind;
};

struct Walk {
  std::vector<Vec3> points;
  std::vector<Move::Kind> moves;
  int start_dir = 0;
};

bool near_building(const Scene& scene, Vec3 p, double radius) {
  const double v = scene.voxel_size();
  const int r = static_cast<int>(std::ceil(radius / v));
  const auto c = scene.voxel_index(p);
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) {
      const std::int64_t x = c[0] + dx, y = c[1] + dy;
      if (x < 0 || y < 0 || x >= scene.dims().nx || y >= scene.dims().ny) continue;
      // Ground layer does not count as a landmark.
      for (std::int64_t z = 1; z <= c[2]; ++z)
        if (scene.voxel(x, y, z)) return true;
    }
  return false;
}

std::vector<std::string> describe(const Scene& scene, const Walk& w) {
  static const char* kCounts[] = {"one", "two", "three", "four", "five", "six", "seven", "eight"};
  std::vector<std::string> tokens;
  auto count_word = [&](int n) {
    return n <= 8 ? std::string(kCounts[n - 1]) : std::to_string(n);
  };
  std::size_t i = 0;
  while (i < w.moves.size()) {
    const Move::Kind k = w.moves[i];
    if (k == Move::Left || k == Move::Right) {
      tokens.insert(tokens.end(), {"turn", k == Move::Left ? "left" : "right"});
      if (near_building(scene, w.points[i], 10.0))
        tokens.insert(tokens.end(), {"at", "the", "building"});
      tokens.push_back("and");
    }
    std::size_t j = i + 1;
    const bool horizontal = k == Move::Forward || k == Move::Left || k == Move::Right;
    while (j < w.moves.size() &&
           (horizontal ? w.moves[j] == Move::Forward : w.moves[j] == k))
      ++j;
    const int n = static_cast<int>(j - i);
    if (horizontal)
      tokens.insert(tokens.end(), {"fly", "forward", count_word(n), n == 1 ? "step" : "steps"});
    else
      tokens.insert(tokens.end(),
                    {k == Move::Up ? "ascend" : "descend", count_word(n), n == 1 ? "level" : "levels"});
    tokens.push_back("then");
    i = j;
  }
  tokens.push_back("stop");
  if (near_building(scene, w.points.back(), 10.0))
    tokens.insert(tokens.end(), {"near", "the", "building"});
  else
    tokens.insert(tokens.end(), {"in", "open", "space"});
  return tokens;
}

std::optional<Walk> try_walk(const Scene& scene, const DatasetParams& dp, const StepConfig& cfg,
                             Rng& rng) {
  const Bounds& b = scene.bounds();
  const double margin = 2.0 * cfg.success_radius;
  const double sh = cfg.horizontal_step;
  const double sv = cfg.vertical_step;
  const auto nx = static_cast<std::uint64_t>((b.max.x - b.min.x - 2 * margin) / sh);
  const auto ny = static_cast<std::uint64_t>((b.max.y - b.min.y - 2 * margin) / sh);
  const double top = std::min(dp.max_altitude, b.max.z - b.min.z - sv);
  const auto nz = static_cast<std::uint64_t>((top - dp.min_altitude) / sv) + 1;
  if (nx == 0 || ny == 0 || top < dp.min_altitude) throw Error("scene too small for episodes");

  auto segment = [&] {
    return dp.min_segment +
           static_cast<int>(rng.below(static_cast<std::uint64_t>(dp.max_segment - dp.min_segment + 1)));
  };

  Walk w;
  Vec3 p{b.min.x + margin + sh * static_cast<double>(rng.below(nx)),
         b.min.y + margin + sh * static_cast<double>(rng.below(ny)),
         b.min.z + dp.min_altitude + sv * static_cast<double>(rng.below(nz))};
  if (is_occupied(scene, p)) return std::nullopt;
  w.start_dir = static_cast<int>(rng.below(4));
  w.points.push_back(p);
  // Horizontal moves made before reaching each point.
  std::vector<int> hcount{0};

  // A new point must stay 2 s_h clear of the path from three horizontal moves
  // back, so legs never run alongside earlier legs.
  auto clear_of_path = [&](Vec3 q, int h) {
    for (std::size_t k = 0; k < w.points.size(); ++k) {
      if (hcount[k] > h - 3) break;
      if ((q - w.points[k]).horizontal_norm() < 2.0 * sh) return false;
    }
    return true;
  };

  const int moves = dp.min_moves + static_cast<int>(rng.below(
                                       static_cast<std::uint64_t>(dp.max_moves - dp.min_moves + 1)));
  int dir = w.start_dir;
  int left_in_segment = segment();
  for (int m = 0; m < moves; ++m) {
    bool placed = false;
    for (int attempt = 0; attempt < 8 && !placed; ++attempt) {
      Move::Kind kind = Move::Forward;
      int ndir = dir;
      Vec3 q = p;
      const bool retry = attempt > 0;
      if (rng.bernoulli(dp.vertical_probability)) {
        kind = rng.bernoulli(0.5) ? Move::Up : Move::Down;
        q.z += kind == Move::Up ? sv : -sv;
        if (q.z - b.min.z < dp.min_altitude || q.z - b.min.z > top) continue;
      } else {
        if (left_in_segment == 0 || retry) {
          kind = rng.bernoulli(0.5) ? Move::Left : Move::Right;
          ndir = (dir + (kind == Move::Left ? 3 : 1)) % 4;
        }
        q.x += sh * kDirX[ndir];
        q.y += sh * kDirY[ndir];
        if (q.x < b.min.x + margin || q.x > b.max.x - margin || q.y < b.min.y + margin ||
            q.y > b.max.y - margin)
          continue;
        if (!clear_of_path(q, hcount.back() + 1)) continue;
      }
      if (segment_blocked(scene, p, q)) continue;
      const bool horizontal = kind != Move::Up && kind != Move::Down;
      w.points.push_back(q);
      w.moves.push_back(kind);
      hcount.push_back(hcount.back() + (horizontal ? 1 : 0));
      if (kind == Move::Left || kind == Move::Right) left_in_segment = segment();
      if (horizontal) --left_in_segment;
      p = q;
      dir = ndir;
      placed = true;
    }
    if (!placed) return std::nullopt;
  }
  if (distance(w.points.front(), w.points.back()) < 2.0 * cfg.success_radius) return std::nullopt;
  return w;
}

json pose_json(const Pose& p) {
  return {{"position", {p.position.x, p.position.y, p.position.z}},
          {"heading", p.heading.degrees()}};
}

Vec3 vec_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

}  // namespace

std::vector<Episode> generate_dataset(const Scene& scene, const DatasetParams& dp,
                                      const StepConfig& cfg) {
  cfg.validate();
  if (dp.min_moves < 1 || dp.max_moves < dp.min_moves)
    throw InvalidArgument("path length range must satisfy 1 <= min <= max");
  if (dp.min_segment < 1 || dp.max_segment < dp.min_segment)
    throw InvalidArgument("segment range must satisfy 1 <= min <= max");
  if (dp.max_attempts < 1) throw InvalidArgument("max_attempts must be positive");
  std::vector<Episode> out;
  out.reserve(dp.episodes);
  for (std::size_t i = 0; i < dp.episodes; ++i) {
    Rng rng(hash_combine(hash_combine(dp.seed, hash_string(scene.scene_id())), i));
    std::optional<Walk> walk;
    for (int a = 0; a < dp.max_attempts && !walk; ++a) walk = try_walk(scene, dp, cfg, rng);
    if (!walk)
      throw Error("could not place episode " + std::to_string(i) + " after " +
                  std::to_string(dp.max_attempts) + " attempts");
    Episode e;
    char id[32];
    std::snprintf(id, sizeof id, "-e%05zu", i);
    e.episode_id = scene.scene_id() + id;
    e.scene_id = scene.scene_id();
    e.start_pose = Pose{walk->points.front(), Heading(90.0 * walk->start_dir)};
    e.instruction = describe(scene, *walk);
    e.gt_path = Path(walk->points);
    out.push_back(std::move(e));
  }
  return out;
}

void save_episodes(const std::vector<Episode>& episodes, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write episode file: " + path.string());
  out << json{{"format", kEpisodeFormat}, {"version", kEpisodeVersion}, {"count", episodes.size()}}
             .dump()
      << '\n';
  for (const Episode& e : episodes) {
    json pts = json::array();
    for (const Vec3& p : e.gt_path.points()) pts.push_back({p.x, p.y, p.z});
    out << json{{"episode_id", e.episode_id},
                {"scene_id", e.scene_id},
                {"start", pose_json(e.start_pose)},
                {"instruction", e.instruction},
                {"gt_path", pts}}
               .dump()
        << '\n';
  }
  if (!out) throw Error("failed writing episode file: " + path.string());
}

std::vector<Episode> load_episodes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read episode file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error("episode file is empty: " + path.string());
  const json header = json::parse(line);
  if (header.value("format", "") != kEpisodeFormat || header.value("version", 0) != kEpisodeVersion)
    throw Error("not an episode file: " + path.string());
  std::vector<Episode> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    Episode e;
    e.episode_id = j.at("episode_id").get<std::string>();
    e.scene_id = j.at("scene_id").get<std::string>();
    e.start_pose = Pose{vec_from(j.at("start").at("position")),
                        Heading(j.at("start").at("heading").get<double>())};
    e.instruction = j.at("instruction").get<std::vector<std::string>>();
    std::vector<Vec3> pts;
    for (const json& p : j.at("gt_path")) pts.push_back(vec_from(p));
    e.gt_path = Path(std::move(pts));
    if (e.gt_path.front() != e.start_pose.position)
      throw Error("episode " + e.episode_id + ": path does not start at the start pose");
    out.push_back(std::move(e));
  }
  if (out.size() != header.value("count", out.size()))
    throw Error("episode count does not match header in " + path.string());
  return out;
}

}  // namespace avln
