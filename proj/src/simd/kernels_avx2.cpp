#include "kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define AVLN_HAVE_AVX2 1
#include <immintrin.h>
#else
#define AVLN_HAVE_AVX2 0
#endif

namespace avln::simd::avx2 {

#if AVLN_HAVE_AVX2

bool compiled() { return true; }

__attribute__((target("avx2"))) double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, prod);
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (std::size_t k = 0; i < n; ++i, ++k) lane[k] = lane[k] + a[i] * b[i];
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

__attribute__((target("avx2"))) void gemv(const double* a, std::size_t rows, std::size_t cols,
                                          const double* x, double* y) {
  std::size_t r = 0;
  // Two rows per pass share the loads of x.
  for (; r + 2 <= rows; r += 2) {
    const double* a0 = a + r * cols;
    const double* a1 = a0 + cols;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= cols; i += 4) {
      const __m256d xv = _mm256_loadu_pd(x + i);
      acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a0 + i), xv));
      acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a1 + i), xv));
    }
    alignas(32) double l0[4];
    alignas(32) double l1[4];
    _mm256_store_pd(l0, acc0);
    _mm256_store_pd(l1, acc1);
    for (std::size_t k = 0; i < cols; ++i, ++k) {
      l0[k] = l0[k] + a0[i] * x[i];
      l1[k] = l1[k] + a1[i] * x[i];
    }
    y[r] = (l0[0] + l0[1]) + (l0[2] + l0[3]);
    y[r + 1] = (l1[0] + l1[1]) + (l1[2] + l1[3]);
  }
  for (; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

__attribute__((target("avx2"))) void distances(double px, double py, double pz, const double* xs,
                                               const double* ys, const double* zs, std::size_t n,
                                               double* out) {
  const __m256d vx = _mm256_set1_pd(px);
  const __m256d vy = _mm256_set1_pd(py);
  const __m256d vz = _mm256_set1_pd(pz);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(vx, _mm256_loadu_pd(xs + i));
    const __m256d dy = _mm256_sub_pd(vy, _mm256_loadu_pd(ys + i));
    const __m256d dz = _mm256_sub_pd(vz, _mm256_loadu_pd(zs + i));
    const __m256d xy = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    _mm256_storeu_pd(out + i, _mm256_sqrt_pd(_mm256_add_pd(xy, _mm256_mul_pd(dz, dz))));
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

}  // namespace avln::simd::avx2
