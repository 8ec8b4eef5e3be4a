#pragma once

// Double-precision vector kernels used by the solver inner loops.
//
// Every kernel has a portable scalar reference implementation and, where the
// target supports it, an AVX2+FMA (x86-64) or NEON (aarch64) variant. The
// variant is chosen once at startup from CPUID; tests can pin a specific table
// with set_active_isa() and compare variants against the scalar reference.
// Reductions in the SIMD variants use a different summation order than the
// scalar loop, so results agree to rounding, not bit-for-bit.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace psyn::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[i] = min(max(x[i], lo), hi); out may alias x
  void (*clamp)(const double* x, double lo, double hi, double* out, std::size_t n);
  // max_i |a[i] - b[i]|
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
  // sum_i |a[i]|
  double (*abs_sum)(const double* a, std::size_t n);
  // sum_i a[i]
  double (*sum)(const double* a, std::size_t n);
};

const KernelTable& scalar_table();

/// Table for `isa`, or nullptr when the variant is not compiled in or the CPU
/// lacks the instructions.
const KernelTable* table_for(Isa isa);

/// Best available variants, in preference order, always ending with scalar.
std::vector<Isa> available_isas();

/// The table used by the library.
const KernelTable& active();

/// Pin the active table. Throws ConfigError if the variant is unavailable.
void set_active_isa(Isa isa);

// Convenience wrappers over active().
inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void clamp(std::span<const double> x, double lo, double hi, std::span<double> out) {
  active().clamp(x.data(), lo, hi, out.data(), x.size());
}
inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  return active().max_abs_diff(a.data(), b.data(), a.size());
}
inline double abs_sum(std::span<const double> a) { return active().abs_sum(a.data(), a.size()); }
inline double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }

}  // namespace psyn::kernels
