#pragma once

#include <cstddef>

namespace avln::simd {

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void distances(double px, double py, double pz, const double* xs, const double* ys,
               const double* zs, std::size_t n, double* out);
}  // namespace scalar

namespace avx2 {
bool compiled();
double dot(const double* a, const double* b, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void distances(double px, double py, double pz, const double* xs, const double* ys,
               const double* zs, std::size_t n, double* out);
}  // namespace avx2

namespace neon {
bool compiled();
double dot(const double* a, const double* b, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void distances(double px, double py, double pz, const double* xs, const double* ys,
               const double* zs, std::size_t n, double* out);
}  // namespace neon

}  // namespace avln::simd
