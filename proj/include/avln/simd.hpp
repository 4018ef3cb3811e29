#pragma once

// Data-parallel inner loops with a scalar reference and vector variants
// (AVX2 on x86-64, NEON on AArch64) chosen at runtime.
//
// Every variant accumulates in four interleaved lanes (element i goes to lane
// i % 4) and reduces as (l0 + l1) + (l2 + l3), using separate multiply and add.
// Results are therefore bit-identical across variants, which keeps episode
// outputs reproducible regardless of the host CPU.

#include <cstddef>
#include <span>
#include <string_view>

namespace avln::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);
Isa isa_from_string(std::string_view name);

/// True when the variant is compiled in and the CPU can run it.
bool isa_supported(Isa isa);

/// Best supported variant on this host.
Isa best_isa();

/// Variant used by the free functions below. Defaults to best_isa().
Isa active_isa();

/// Selects the variant process-wide. Throws InvalidArgument when unsupported.
void set_active_isa(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);

/// y = A x for a row-major `rows` x `cols` matrix.
void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y);

/// out[i] = Euclidean distance from p to (xs[i], ys[i], zs[i]).
void distances(double px, double py, double pz, std::span<const double> xs,
               std::span<const double> ys, std::span<const double> zs, std::span<double> out);

/// Direct access to one variant, bypassing dispatch. Used by equivalence tests.
struct Kernels {
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
  void (*distances)(double px, double py, double pz, const double* xs, const double* ys,
                    const double* zs, std::size_t n, double* out);
};

/// Throws InvalidArgument when the variant is unsupported.
const Kernels& kernels_for(Isa isa);

}  // namespace avln::simd
