#include "kernels.hpp"

#if defined(__aarch64__)
#define AVLN_HAVE_NEON 1
#include <arm_neon.h>
#else
#define AVLN_HAVE_NEON 0
#endif

namespace avln::simd::neon {

#if AVLN_HAVE_NEON

bool compiled() { return true; }

// Two 2-wide registers hold lanes (0, 1) and (2, 3).
double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double lane[4];
  vst1q_f64(lane, lo);
  vst1q_f64(lane + 2, hi);
  for (std::size_t k = 0; i < n; ++i, ++k) lane[k] = lane[k] + a[i] * b[i];
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

void distances(double px, double py, double pz, const double* xs, const double* ys,
               const double* zs, std::size_t n, double* out) {
  const float64x2_t vx = vdupq_n_f64(px);
  const float64x2_t vy = vdupq_n_f64(py);
  const float64x2_t vz = vdupq_n_f64(pz);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t dx = vsubq_f64(vx, vld1q_f64(xs + i));
    const float64x2_t dy = vsubq_f64(vy, vld1q_f64(ys + i));
    const float64x2_t dz = vsubq_f64(vz, vld1q_f64(zs + i));
    const float64x2_t xy = vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy));
    vst1q_f64(out + i, vsqrtq_f64(vaddq_f64(xy, vmulq_f64(dz, dz))));
  }
  if (i < n) scalar::distances(px, py, pz, xs + i, ys + i, zs + i, n - i, out + i);
}

#else

bool compiled() { return false; }
double dot(const double* a, const double* b, std::size_t n) { return scalar::dot(a, b, n); }
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  scalar::gemv(a, rows, cols, x, y);
}
void distances(double px, double py, double pz, const double* xs, const double* ys,
               const double* zs, std::size_t n, double* out) {
  scalar::distances(px, py, pz, xs, ys, zs, n, out);
}

#endif

}  // namespace avln::simd::neon
