#include "avln/bevmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "avln/rng.hpp"
#include "avln/simd.hpp"

namespace avln {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Largest double below 1; tanh and the gate blend can round onto +-1.
constexpr double kOpenBound = 1.0 - 0x1.0p-53;

// Forward and right unit steps (in cell coordinates) per cardinal quadrant.
constexpr std::int64_t kForward[4][2] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};

int quadrant(const Pose& pose) {
  return static_cast<int>(std::lround(pose.heading.degrees() / 90.0)) % 4;
}

}  // namespace

GruCell::GruCell(Weights w) : w_(std::move(w)) {
  const std::size_t h3 = 3 * w_.hidden_dim;
  if (w_.input_dim == 0 || w_.hidden_dim == 0) throw InvalidArgument("GRU dimensions must be positive");
  if (w_.w_ih.size() != h3 * w_.input_dim || w_.w_hh.size() != h3 * w_.hidden_dim ||
      w_.b_ih.size() != h3 || w_.b_hh.size() != h3)
    throw InvalidArgument("GRU weight shapes do not match dimensions");
}

GruCell GruCell::seeded(std::size_t input_dim, std::size_t hidden_dim, std::uint64_t seed) {
  Weights w{input_dim, hidden_dim, {}, {}, {}, {}};
  const double k = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  Rng rng(hash_combine(seed, 0x677275ULL));
  auto fill = [&](std::vector<double>& v, std::size_t n) {
    v.resize(n);
    for (double& x : v) x = rng.uniform(-k, k);
  };
  fill(w.w_ih, 3 * hidden_dim * input_dim);
  fill(w.w_hh, 3 * hidden_dim * hidden_dim);
  fill(w.b_ih, 3 * hidden_dim);
  fill(w.b_hh, 3 * hidden_dim);
  return GruCell(std::move(w));
}

GruCell GruCell::zeros(std::size_t input_dim, std::size_t hidden_dim) {
  const std::size_t h3 = 3 * hidden_dim;
  return GruCell(Weights{input_dim, hidden_dim, std::vector<double>(h3 * input_dim, 0.0),
                         std::vector<double>(h3 * hidden_dim, 0.0), std::vector<double>(h3, 0.0),
                         std::vector<double>(h3, 0.0)});
}

std::vector<double> GruCell::step(std::span<const double> hidden,
                                  std::span<const double> input) const {
  const std::size_t H = w_.hidden_dim;
  if (hidden.size() != H || input.size() != w_.input_dim)
    throw InvalidArgument("GRU input or hidden dimension mismatch");

  std::vector<double> gi(3 * H), gh(3 * H);
  simd::gemv(w_.w_ih, 3 * H, w_.input_dim, input, gi);
  simd::gemv(w_.w_hh, 3 * H, H, hidden, gh);

  std::vector<double> out(H);
  for (std::size_t k = 0; k < H; ++k) {
    const double r = sigmoid((gi[k] + w_.b_ih[k]) + (gh[k] + w_.b_hh[k]));
    const double z = sigmoid((gi[H + k] + w_.b_ih[H + k]) + (gh[H + k] + w_.b_hh[H + k]));
    const double n =
        std::tanh((gi[2 * H + k] + w_.b_ih[2 * H + k]) + r * (gh[2 * H + k] + w_.b_hh[2 * H + k]));
    const double h = (1.0 - z) * n + z * hidden[k];
    out[k] = std::clamp(h, -kOpenBound, kOpenBound);
  }
  return out;
}

void GruCell::save(const std::filesystem::path& path) const {
  nlohmann::json j = {{"format", "avln-gru"}, {"version", 1},
                      {"input_dim", w_.input_dim}, {"hidden_dim", w_.hidden_dim},
                      {"w_ih", w_.w_ih}, {"w_hh", w_.w_hh},
                      {"b_ih", w_.b_ih}, {"b_hh", w_.b_hh}};
  std::ofstream out(path);
  if (!out) throw Error("cannot write GRU weights: " + path.string());
  out << j.dump() << '\n';
}

GruCell GruCell::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read GRU weights: " + path.string());
  const auto j = nlohmann::json::parse(in);
  Weights w;
  w.input_dim = j.at("input_dim").get<std::size_t>();
  w.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  w.w_ih = j.at("w_ih").get<std::vector<double>>();
  w.w_hh = j.at("w_hh").get<std::vector<double>>();
  w.b_ih = j.at("b_ih").get<std::vector<double>>();
  w.b_hh = j.at("b_hh").get<std::vector<double>>();
  return GruCell(std::move(w));
}

BevMap::BevMap(Vec3 origin, double cell_size, std::shared_ptr<const GruCell> gru)
    : origin_(origin), cell_size_(cell_size), gru_(std::move(gru)) {
  if (!(cell_size > 0.0)) throw InvalidArgument("BEV cell size must be positive");
  if (!gru_) throw InvalidArgument("BEV map needs a GRU cell");
}

GridCell BevMap::cell_of(Vec3 p) const {
  return {static_cast<std::int64_t>(std::round((p.x - origin_.x) / cell_size_)),
          static_cast<std::int64_t>(std::round((p.y - origin_.y) / cell_size_))};
}

const std::vector<double>& BevMap::update(Vec3 position, std::span<const double> feature) {
  if (feature.size() != gru_->input_dim()) throw InvalidArgument("BEV feature dimension mismatch");
  for (double f : feature)
    if (!std::isfinite(f)) throw InvalidArgument("BEV feature must be finite");
  auto [it, inserted] = cells_.try_emplace(cell_of(position), gru_->hidden_dim(), 0.0);
  it->second = gru_->step(it->second, feature);
  return it->second;
}

const std::vector<double>* BevMap::find(GridCell c) const {
  const auto it = cells_.find(c);
  return it == cells_.end() ? nullptr : &it->second;
}

LocalMap BevMap::local_map(const Pose& agent, int size) const {
  if (size <= 0 || size % 2 == 0) throw InvalidArgument("local map size must be odd and positive");
  const std::size_t H = hidden_dim();
  LocalMap m{size, H, std::vector<double>(static_cast<std::size_t>(size) * size * H, 0.0)};
  const GridCell centre = cell_of(agent.position);
  const int q = quadrant(agent);
  const auto* f = kForward[q];
  const auto* r = kForward[(q + 1) % 4];
  const int c = size / 2;
  for (int row = 0; row < size; ++row) {
    for (int col = 0; col < size; ++col) {
      const std::int64_t ahead = c - row;
      const std::int64_t right = col - c;
      const GridCell cell{centre.u + ahead * f[0] + right * r[0],
                          centre.v + ahead * f[1] + right * r[1]};
      if (const auto* h = find(cell)) {
        std::copy(h->begin(), h->end(),
                  m.data.begin() + (static_cast<std::size_t>(row) * size + col) * H);
      }
    }
  }
  return m;
}

std::optional<std::pair<int, int>> BevMap::local_index(const Pose& agent, Vec3 p, int size) const {
  const GridCell centre = cell_of(agent.position);
  const GridCell cell = cell_of(p);
  const int q = quadrant(agent);
  const auto* f = kForward[q];
  const auto* r = kForward[(q + 1) % 4];
  const std::int64_t du = cell.u - centre.u;
  const std::int64_t dv = cell.v - centre.v;
  // f and r are orthonormal, so projections recover (ahead, right).
  const std::int64_t ahead = du * f[0] + dv * f[1];
  const std::int64_t right = du * r[0] + dv * r[1];
  const int c = size / 2;
  const std::int64_t row = c - ahead;
  const std::int64_t col = c + right;
  if (row < 0 || col < 0 || row >= size || col >= size) return std::nullopt;
  return std::make_pair(static_cast<int>(row), static_cast<int>(col));
}

}  // namespace avln
