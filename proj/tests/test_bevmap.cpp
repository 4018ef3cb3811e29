#include <doctest.h>

#include <filesystem>

#include "avln/bevmap.hpp"
#include "avln/rng.hpp"
#include "oracles.hpp"

using namespace avln;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double scale) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-scale, scale);
  return v;
}

std::shared_ptr<const GruCell> small_gru(std::uint64_t seed = 1) {
  return std::make_shared<const GruCell>(GruCell::seeded(8, 4, seed));
}

// Element (row, col) of the quarter-turn-right image of m.
bool rotated_right(const LocalMap& turned, const LocalMap& m) {
  const int c = m.size / 2;
  for (int row = 0; row < m.size; ++row)
    for (int col = 0; col < m.size; ++col) {
      const auto a = turned.at(row, col);
      const auto b = m.at(col, 2 * c - row);
      if (!std::equal(a.begin(), a.end(), b.begin())) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("cell_of rounds half away from zero") {
  const BevMap m({100, 200, 0}, 5.0, small_gru());
  CHECK(m.cell_of({100, 200, 50}) == GridCell{0, 0});
  CHECK(m.cell_of({107, 197, 0}) == GridCell{1, -1});
  CHECK(m.cell_of({102.5, 200, 0}) == GridCell{1, 0});
  CHECK(m.cell_of({97.5, 200, 0}) == GridCell{-1, 0});
}

TEST_CASE("zero GRU keeps a cell at zero") {
  BevMap m({0, 0, 0}, 5.0, std::make_shared<const GruCell>(GruCell::zeros(8, 4)));
  const std::vector<double> f(8, 0.7);
  for (int i = 0; i < 5; ++i) CHECK(m.update({0, 0, 0}, f) == std::vector<double>(4, 0.0));
}

TEST_CASE("GRU step matches the plain-loop reference") {
  Rng rng(51);
  const GruCell g = GruCell::seeded(8, 4, 9);
  std::vector<double> h(4, 0.0), ref(4, 0.0);
  for (int i = 0; i < 50; ++i) {
    const auto x = random_vec(rng, 8, 3.0);
    h = g.step(h, x);
    ref = oracle::gru_step(g.weights(), ref, x);
    for (std::size_t k = 0; k < 4; ++k) CHECK(h[k] == doctest::Approx(ref[k]).epsilon(1e-12));
  }
}

TEST_CASE("repeated updates are not idempotent and touch one cell") {
  BevMap m({0, 0, 0}, 5.0, small_gru());
  Rng rng(52);
  const auto f = random_vec(rng, 8, 1.0);
  const auto once = m.update({5, 0, 0}, f);
  const auto twice = m.update({5, 0, 0}, f);
  CHECK(once != twice);
  CHECK(m.cells().size() == 1);
  const auto gru = small_gru();
  const auto& w = gru->weights();
  const auto expected = oracle::gru_step(w, oracle::gru_step(w, std::vector<double>(4, 0.0), f), f);
  for (std::size_t k = 0; k < 4; ++k) CHECK(twice[k] == doctest::Approx(expected[k]).epsilon(1e-12));
  CHECK(m.find({1, 0}) != nullptr);
  CHECK(m.find({0, 0}) == nullptr);
}

TEST_CASE("hidden states stay inside (-1, 1) under extreme inputs") {
  // Large weights push the gates into saturation.
  GruCell::Weights w = small_gru(3)->weights();
  for (double& v : w.w_ih) v *= 200.0;
  for (double& v : w.w_hh) v *= 200.0;
  BevMap m({0, 0, 0}, 5.0, std::make_shared<const GruCell>(GruCell(w)));
  Rng rng(53);
  for (int i = 0; i < 2000; ++i) {
    const auto& h = m.update({rng.uniform(-20, 20), rng.uniform(-20, 20), 0}, random_vec(rng, 8, 50.0));
    for (double v : h) {
      CHECK(v > -1.0);
      CHECK(v < 1.0);
    }
  }
}

TEST_CASE("update validates the feature") {
  BevMap m({0, 0, 0}, 5.0, small_gru());
  CHECK_THROWS_AS(m.update({0, 0, 0}, std::vector<double>(3, 0.0)), InvalidArgument);
  std::vector<double> nan(8, 0.0);
  nan[2] = std::nan("");
  CHECK_THROWS_AS(m.update({0, 0, 0}, nan), InvalidArgument);
}

TEST_CASE("local map geometry") {
  BevMap m({0, 0, 0}, 5.0, small_gru());
  const Pose agent{{0, 0, 20}, Heading(0)};
  const LocalMap fresh = m.local_map(agent, 11);
  CHECK(fresh.data == std::vector<double>(11 * 11 * 4, 0.0));
  CHECK_THROWS_AS(m.local_map(agent, 10), InvalidArgument);

  // One Front update at heading 0 lands one row above the centre.
  Rng rng(54);
  m.update({5, 0, 20}, random_vec(rng, 8, 1.0));
  const LocalMap lm = m.local_map(agent, 11);
  for (int row = 0; row < 11; ++row)
    for (int col = 0; col < 11; ++col) {
      const auto cell = lm.at(row, col);
      const bool nonzero = std::any_of(cell.begin(), cell.end(), [](double v) { return v != 0.0; });
      CHECK(nonzero == (row == 4 && col == 5));
    }
  CHECK(m.local_index(agent, {5, 0, 20}, 11) == std::pair{4, 5});
  // Facing -y (heading 90) the same cell is on the agent's left.
  CHECK(m.local_index(Pose{{0, 0, 20}, Heading(90)}, {5, 0, 20}, 11) == std::pair{5, 4});
  CHECK_FALSE(m.local_index(agent, {100, 0, 20}, 11).has_value());
}

TEST_CASE("a quarter turn rotates the local map") {
  Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    BevMap m({0, 0, 0}, 5.0, small_gru(trial));
    for (int i = 0; i < 30; ++i)
      m.update({5.0 * static_cast<double>(rng.below(11)) - 25, 5.0 * static_cast<double>(rng.below(11)) - 25, 0},
               random_vec(rng, 8, 1.0));
    const Vec3 p{rng.uniform(-10, 10), rng.uniform(-10, 10), 0};
    for (int q = 0; q < 4; ++q) {
      const LocalMap a = m.local_map(Pose{p, Heading(90.0 * q)}, 7);
      const LocalMap b = m.local_map(Pose{p, Heading(90.0 * (q + 1))}, 7);
      CHECK(rotated_right(b, a));
    }
    // Headings snap to the nearest cardinal.
    CHECK(m.local_map(Pose{p, Heading(30)}, 7) == m.local_map(Pose{p, Heading(0)}, 7));
    CHECK(m.local_map(Pose{p, Heading(60)}, 7) == m.local_map(Pose{p, Heading(90)}, 7));
  }
}

TEST_CASE("GRU weights round-trip through a file") {
  const GruCell g = GruCell::seeded(8, 4, 77);
  const auto path = std::filesystem::temp_directory_path() / "avln_gru_test.json";
  g.save(path);
  const GruCell h = GruCell::load(path);
  CHECK(h.weights().w_ih == g.weights().w_ih);
  CHECK(h.weights().b_hh == g.weights().b_hh);
  CHECK(GruCell::seeded(8, 4, 77).weights().w_hh == g.weights().w_hh);
  CHECK(GruCell::seeded(8, 4, 78).weights().w_hh != g.weights().w_hh);
  CHECK_THROWS_AS(GruCell(GruCell::Weights{8, 4, {}, {}, {}, {}}), InvalidArgument);
}
