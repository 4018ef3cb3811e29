#pragma once

// Bird's-eye-view grid feature map. Cells sit on the horizontal motion grid
// around the episode start; each cell's feature is folded in by a GRU cell.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "avln/core.hpp"

namespace avln {

/// Gated recurrent unit with the PyTorch GRUCell parameter layout:
/// rows of the input and hidden weight matrices are stacked as [reset; update; new].
class GruCell {
 public:
  struct Weights {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    std::vector<double> w_ih;  // 3H x D
    std::vector<double> w_hh;  // 3H x H
    std::vector<double> b_ih;  // 3H
    std::vector<double> b_hh;  // 3H
  };

  explicit GruCell(Weights w);

  /// Uniform(-1/sqrt(H), 1/sqrt(H)) initialization from `seed`.
  static GruCell seeded(std::size_t input_dim, std::size_t hidden_dim, std::uint64_t seed);
  static GruCell zeros(std::size_t input_dim, std::size_t hidden_dim);

  std::size_t input_dim() const { return w_.input_dim; }
  std::size_t hidden_dim() const { return w_.hidden_dim; }
  const Weights& weights() const { return w_; }

  /// h' = (1 - z) * n + z * h, kept inside the open interval (-1, 1).
  std::vector<double> step(std::span<const double> hidden, std::span<const double> input) const;

  void save(const std::filesystem::path& path) const;
  static GruCell load(const std::filesystem::path& path);

 private:
  Weights w_;
};

struct GridCell {
  std::int64_t u = 0;
  std::int64_t v = 0;
  friend auto operator<=>(const GridCell&, const GridCell&) = default;
};

/// L x L x H tensor, row 0 is the row ahead of the agent.
struct LocalMap {
  int size = 0;
  std::size_t hidden_dim = 0;
  std::vector<double> data;

  std::span<const double> at(int row, int col) const {
    return {data.data() + (static_cast<std::size_t>(row) * size + col) * hidden_dim, hidden_dim};
  }
  friend bool operator==(const LocalMap&, const LocalMap&) = default;
};

class BevMap {
 public:
  BevMap(Vec3 origin, double cell_size, std::shared_ptr<const GruCell> gru);

  const Vec3& origin() const { return origin_; }
  double cell_size() const { return cell_size_; }
  std::size_t hidden_dim() const { return gru_->hidden_dim(); }
  const std::map<GridCell, std::vector<double>>& cells() const { return cells_; }

  /// Nearest grid cell, halves rounded away from zero; z is ignored.
  GridCell cell_of(Vec3 p) const;

  /// Folds `feature` into the cell nearest `position` and returns the new state.
  const std::vector<double>& update(Vec3 position, std::span<const double> feature);

  /// Stored state, or nullptr for an untouched cell.
  const std::vector<double>* find(GridCell c) const;

  /// Agent-centred L x L crop, rotated so the agent's nearest cardinal heading
  /// is the top row. Untouched cells are zero. L must be odd and positive.
  LocalMap local_map(const Pose& agent, int size) const;

  /// Row and column of `p` in local_map(agent, size), if inside the crop.
  std::optional<std::pair<int, int>> local_index(const Pose& agent, Vec3 p, int size) const;

 private:
  Vec3 origin_;
  double cell_size_;
  std::shared_ptr<const GruCell> gru_;
  std::map<GridCell, std::vector<double>> cells_;
};

}  // namespace avln
