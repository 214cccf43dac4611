/**
 * Low-level array kernels for the Monte Carlo hot loops: elementwise 1-bit
 * sign mapping, conjugated complex dot product, complex axpy, and real dot
 * product.
 *
 * Each kernel has a scalar reference implementation and, on x86-64 hardware
 * that supports it, an AVX2 variant.  The active table is chosen once at
 * runtime: the ISAC_KERNELS environment variable ("scalar" or "avx2")
 * overrides CPU detection.  Variants are equivalence-tested against the
 * scalar reference; sign_pm1 is bit-exact by construction.
 */
#pragma once

#include <complex>
#include <cstddef>

namespace isac::simd {

struct KernelTable {
  /** dst[i] = (src[i] >= 0.0) ? +1.0 : -1.0 (so -0.0 maps to +1). */
  void (*sign_pm1)(const double* src, double* dst, std::size_t n);
  /** sum_i conj(a[i]) * b[i]. */
  std::complex<double> (*cdotc)(const std::complex<double>* a,
                                const std::complex<double>* b, std::size_t n);
  /** y[i] += alpha * x[i]. */
  void (*caxpy)(std::complex<double> alpha, const std::complex<double>* x,
                std::complex<double>* y, std::size_t n);
  /** sum_i a[i] * b[i]. */
  double (*dot)(const double* a, const double* b, std::size_t n);
  const char* name;
};

/** Scalar reference table; always available. */
const KernelTable& scalar_kernels();

/** AVX2 table, or nullptr when the build or the CPU lacks AVX2. */
const KernelTable* avx2_kernels();

/** Runtime-selected table (env override, then CPU detection). */
const KernelTable& kernels();

}  // namespace isac::simd
