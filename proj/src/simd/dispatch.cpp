#include <atomic>
#include <string>

#include "avln/core.hpp"
#include "avln/simd.hpp"
#include "kernels.hpp"

namespace avln::simd {

namespace {

constexpr Kernels kScalar{&scalar::dot, &scalar::gemv, &scalar::distances};
constexpr Kernels kAvx2{&avx2::dot, &avx2::gemv, &avx2::distances};
constexpr Kernels kNeon{&neon::dot, &neon::gemv, &neon::distances};

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

std::atomic<const Kernels*>& active_table() {
  static std::atomic<const Kernels*> table{&kernels_for(best_isa())};
  return table;
}

std::atomic<Isa>& active_tag() {
  static std::atomic<Isa> tag{best_isa()};
  return tag;
}

void check_sizes(bool ok, const char* what) {
  if (!ok) throw InvalidArgument(std::string("simd: size mismatch in ") + what);
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

Isa isa_from_string(std::string_view name) {
  if (name == "scalar") return Isa::Scalar;
  if (name == "avx2") return Isa::Avx2;
  if (name == "neon") return Isa::Neon;
  throw InvalidArgument("unknown instruction set: " + std::string(name));
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2: return avx2::compiled() && cpu_has_avx2();
    case Isa::Neon: return neon::compiled();
  }
  return false;
}

Isa best_isa() {
  if (isa_supported(Isa::Avx2)) return Isa::Avx2;
  if (isa_supported(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

const Kernels& kernels_for(Isa isa) {
  if (!isa_supported(isa))
    throw InvalidArgument("instruction set not supported here: " + std::string(isa_name(isa)));
  switch (isa) {
    case Isa::Avx2: return kAvx2;
    case Isa::Neon: return kNeon;
    case Isa::Scalar: break;
  }
  return kScalar;
}

Isa active_isa() { return active_tag().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  const Kernels& k = kernels_for(isa);
  active_table().store(&k, std::memory_order_relaxed);
  active_tag().store(isa, std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size() == b.size(), "dot");
  return active_table().load(std::memory_order_relaxed)->dot(a.data(), b.data(), a.size());
}

void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y) {
  check_sizes(a.size() == rows * cols && x.size() == cols && y.size() == rows, "gemv");
  active_table().load(std::memory_order_relaxed)->gemv(a.data(), rows, cols, x.data(), y.data());
}

void distances(double px, double py, double pz, std::span<const double> xs,
               std::span<const double> ys, std::span<const double> zs, std::span<double> out) {
  check_sizes(xs.size() == ys.size() && ys.size() == zs.size() && zs.size() == out.size(),
              "distances");
  active_table().load(std::memory_order_relaxed)
      ->distances(px, py, pz, xs.data(), ys.data(), zs.data(), xs.size(), out.data());
}

}  // namespace avln::simd
