#include "isac/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace isac::simd {

namespace {

void sign_pm1_scalar(const double* src, double* dst, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = (src[i] >= 0.0) ? 1.0 : -1.0;
}

std::complex<double> cdotc_scalar(const std::complex<double>* a,
                                  const std::complex<double>* b,
                                  std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

void caxpy_scalar(std::complex<double> alpha, const std::complex<double>* x,
                  std::complex<double>* y, std::size_t n) {
  const double cr = alpha.real(), ci = alpha.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] += std::complex<double>(cr * xr - ci * xi, cr * xi + ci * xr);
  }
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

const KernelTable kScalar{sign_pm1_scalar, cdotc_scalar, caxpy_scalar,
                          dot_scalar, "scalar"};

const KernelTable* select() {
  if (const char* env = std::getenv("ISAC_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return &kScalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_kernels() != nullptr)
      return avx2_kernels();
  }
  if (avx2_kernels() != nullptr) return avx2_kernels();
  return &kScalar;
}

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

#ifndef ISAC_BUILD_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

const KernelTable& kernels() {
  static const KernelTable* table = select();
  return *table;
}

}  // namespace isac::simd
