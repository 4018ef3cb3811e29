#include <cmath>

#include "kernels.hpp"

namespace avln::simd::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lane[0] = lane[0] + a[i] * b[i];
    lane[1] = lane[1] + a[i + 1] * b[i + 1];
    lane[2] = lane[2] + a[i + 2] * b[i + 2];
    lane[3] = lane[3] + a[i + 3] * b[i + 3];
  }
  for (std::size_t k = 0; i < n; ++i, ++k) lane[k] = lane[k] + a[i] * b[i];
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

void distances(double px, double py, double pz, const double* xs, const double* ys,
               const double* zs, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = px - xs[i];
    const double dy = py - ys[i];
    const double dz = pz - zs[i];
    out[i] = std::sqrt((dx * dx + dy * dy) + dz * dz);
  }
}

}  // namespace avln::simd::scalar
