#include <doctest.h>

#include <bit>
#include <cmath>
#include <vector>

#include "avln/core.hpp"
#include "avln/env.hpp"
#include "avln/metrics.hpp"
#include "avln/rng.hpp"
#include "avln/simd.hpp"

using namespace avln;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-scale, scale);
  return v;
}

std::vector<simd::Isa> vector_isas() {
  std::vector<simd::Isa> out;
  for (simd::Isa isa : {simd::Isa::Avx2, simd::Isa::Neon})
    if (simd::isa_supported(isa)) out.push_back(isa);
  return out;
}

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

// Restores the process-wide variant when a test changes it.
struct IsaGuard {
  simd::Isa saved = simd::active_isa();
  ~IsaGuard() { simd::set_active_isa(saved); }
};

}  // namespace

TEST_CASE("scalar kernels match a plain loop with the striped reduction") {
  const auto& k = simd::kernels_for(simd::Isa::Scalar);
  Rng rng(5);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 64u}) {
    const auto a = random_vec(rng, n), b = random_vec(rng, n);
    double lanes[4] = {0, 0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) lanes[i % 4] += a[i] * b[i];
    CHECK(same_bits(k.dot(a.data(), b.data(), n), (lanes[0] + lanes[1]) + (lanes[2] + lanes[3])));
  }
}

TEST_CASE("vector kernels are bit-identical to scalar") {
  const auto isas = vector_isas();
  if (isas.empty()) MESSAGE("no vector variant on this host; only scalar checked");
  const auto& s = simd::kernels_for(simd::Isa::Scalar);
  Rng rng(7);
  for (simd::Isa isa : isas) {
    CAPTURE(simd::isa_name(isa));
    const auto& v = simd::kernels_for(isa);
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = rng.below(70);
      const auto a = random_vec(rng, n, 100.0), b = random_vec(rng, n, 100.0);
      CHECK(same_bits(s.dot(a.data(), b.data(), n), v.dot(a.data(), b.data(), n)));

      const std::size_t rows = 1 + rng.below(12);
      const auto m = random_vec(rng, rows * n);
      std::vector<double> y1(rows), y2(rows);
      s.gemv(m.data(), rows, n, a.data(), y1.data());
      v.gemv(m.data(), rows, n, a.data(), y2.data());
      for (std::size_t r = 0; r < rows; ++r) CHECK(same_bits(y1[r], y2[r]));

      const auto xs = random_vec(rng, n, 500.0), ys = random_vec(rng, n, 500.0),
                 zs = random_vec(rng, n, 50.0);
      std::vector<double> d1(n), d2(n);
      s.distances(1.5, -2.5, 3.0, xs.data(), ys.data(), zs.data(), n, d1.data());
      v.distances(1.5, -2.5, 3.0, xs.data(), ys.data(), zs.data(), n, d2.data());
      for (std::size_t i = 0; i < n; ++i) CHECK(same_bits(d1[i], d2[i]));
    }
  }
}

TEST_CASE("dispatch switches variants without changing results") {
  IsaGuard guard;
  Rng rng(9);
  const Scene scene = generate_city(CityParams{.seed = 4, .extent = 200.0});
  const Pose pose{{47.0, 52.0, 20.0}, Heading(30)};
  const Path a{{0, 0, 0}, {10, 3, 1}, {22, 8, 2}, {30, 30, 3}, {41, 30, 2}};
  const Path b{{1, 0, 0}, {12, 1, 0}, {29, 28, 4}, {40, 33, 1}};

  simd::set_active_isa(simd::Isa::Scalar);
  const Skybox ref = get_skybox(scene, pose);
  const double ref_dtw = dtw(a, b);
  for (simd::Isa isa : vector_isas()) {
    simd::set_active_isa(isa);
    CHECK(simd::active_isa() == isa);
    CHECK(get_skybox(scene, pose) == ref);
    CHECK(same_bits(dtw(a, b), ref_dtw));
  }
}

TEST_CASE("isa names and unsupported variants") {
  CHECK(simd::isa_from_string("scalar") == simd::Isa::Scalar);
  CHECK(simd::isa_name(simd::Isa::Avx2) == "avx2");
  CHECK_THROWS_AS(simd::isa_from_string("sse9"), InvalidArgument);
  CHECK(simd::isa_supported(simd::Isa::Scalar));
  for (simd::Isa isa : {simd::Isa::Avx2, simd::Isa::Neon})
    if (!simd::isa_supported(isa)) CHECK_THROWS_AS(simd::kernels_for(isa), InvalidArgument);
}

TEST_CASE("dispatched kernels check sizes") {
  std::vector<double> a(3), b(4);
  CHECK_THROWS_AS(simd::dot(a, b), InvalidArgument);
}
