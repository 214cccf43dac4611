// AVX2 variants of the array kernels.  This translation unit is the only one
// compiled with -mavx2 -mfma; runtime CPU detection keeps it inert elsewhere.
#include "isac/kernels.hpp"

#ifdef ISAC_BUILD_AVX2

#include <immintrin.h>

namespace isac::simd {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

void sign_pm1_avx2(const double* src, double* dst, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d pos = _mm256_set1_pd(1.0);
  const __m256d neg = _mm256_set1_pd(-1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(src + i);
    const __m256d ge = _mm256_cmp_pd(x, zero, _CMP_GE_OQ);
    _mm256_storeu_pd(dst + i, _mm256_blendv_pd(neg, pos, ge));
  }
  for (; i < n; ++i) dst[i] = (src[i] >= 0.0) ? 1.0 : -1.0;
}

std::complex<double> cdotc_avx2(const std::complex<double>* a,
                                const std::complex<double>* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  const __m256d flip_odd = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    acc_re = _mm256_fmadd_pd(va, vb, acc_re);
    // swap re/im pairs of b and negate the (now odd) real parts, so the
    // products line up as [ar*bi, -ai*br, ...]
    const __m256d vb_swap =
        _mm256_xor_pd(_mm256_permute_pd(vb, 0x5), flip_odd);
    acc_im = _mm256_fmadd_pd(va, vb_swap, acc_im);
  }
  double re = hsum(acc_re);
  double im = hsum(acc_im);
  for (; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

void caxpy_avx2(std::complex<double> alpha, const std::complex<double>* x,
                std::complex<double>* y, std::size_t n) {
  double* py = reinterpret_cast<double*>(y);
  const double* px = reinterpret_cast<const double*>(x);
  const double cr = alpha.real(), ci = alpha.imag();
  const __m256d vcr = _mm256_set1_pd(cr);
  const __m256d vci = _mm256_set_pd(ci, -ci, ci, -ci);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(px + 2 * i);
    const __m256d vy = _mm256_loadu_pd(py + 2 * i);
    const __m256d vx_swap = _mm256_permute_pd(vx, 0x5);
    const __m256d r =
        _mm256_fmadd_pd(vcr, vx, _mm256_fmadd_pd(vci, vx_swap, vy));
    _mm256_storeu_pd(py + 2 * i, r);
  }
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] += std::complex<double>(cr * xr - ci * xi, cr * xi + ci * xr);
  }
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

const KernelTable kAvx2{sign_pm1_avx2, cdotc_avx2, caxpy_avx2, dot_avx2,
                        "avx2"};

}  // namespace

const KernelTable* avx2_kernels() {
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &kAvx2 : nullptr;
}

}  // namespace isac::simd

#endif  // ISAC_BUILD_AVX2
