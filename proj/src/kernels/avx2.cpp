// AVX2 + FMA kernels. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after a runtime cpuid check (see dispatch.cpp).

#include "stackreg/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace stackreg::kernels::detail {
namespace {

inline double hsum(__m256d v) noexcept {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum_avx2(const double* a, std::size_t n) noexcept {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + 4));
    }
    if (i + 4 <= n) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
        i += 4;
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i];
    return s;
}

double dot_avx2(const double* a, const double* b, std::size_t n) noexcept {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    if (i + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        i += 4;
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sqdist_avx2(const double* a, const double* b, std::size_t n) noexcept {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
        acc0 = _mm256_fmadd_pd(d0, d0, acc0);
        acc1 = _mm256_fmadd_pd(d1, d1, acc1);
    }
    if (i + 4 <= n) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc0 = _mm256_fmadd_pd(d0, d0, acc0);
        i += 4;
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double absdist_avx2(const double* a, const double* b, std::size_t n) noexcept {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
        acc0 = _mm256_add_pd(acc0, _mm256_andnot_pd(sign, d0));
        acc1 = _mm256_add_pd(acc1, _mm256_andnot_pd(sign, d1));
    }
    if (i + 4 <= n) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc0 = _mm256_add_pd(acc0, _mm256_andnot_pd(sign, d0));
        i += 4;
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += std::fabs(a[i] - b[i]);
    return s;
}

double centered_dot_avx2(const double* a, double ma, const double* b, double mb,
                         std::size_t n) noexcept {
    const __m256d vma = _mm256_set1_pd(ma);
    const __m256d vmb = _mm256_set1_pd(mb);
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d a0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), vma);
        const __m256d b0 = _mm256_sub_pd(_mm256_loadu_pd(b + i), vmb);
        const __m256d a1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), vma);
        const __m256d b1 = _mm256_sub_pd(_mm256_loadu_pd(b + i + 4), vmb);
        acc0 = _mm256_fmadd_pd(a0, b0, acc0);
        acc1 = _mm256_fmadd_pd(a1, b1, acc1);
    }
    if (i + 4 <= n) {
        const __m256d a0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), vma);
        const __m256d b0 = _mm256_sub_pd(_mm256_loadu_pd(b + i), vmb);
        acc0 = _mm256_fmadd_pd(a0, b0, acc0);
        i += 4;
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += (a[i] - ma) * (b[i] - mb);
    return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) noexcept {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable avx2_table{
    sum_avx2, dot_avx2, sqdist_avx2, absdist_avx2, centered_dot_avx2, axpy_avx2,
};

}  // namespace stackreg::kernels::detail
