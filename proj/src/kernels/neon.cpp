// NEON kernels for aarch64, where Advanced SIMD is architecturally guaranteed.

#include "stackreg/kernels.hpp"

#include <arm_neon.h>

#include <cmath>

namespace stackreg::kernels::detail {
namespace {

double sum_neon(const double* a, std::size_t n) noexcept {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vaddq_f64(acc0, vld1q_f64(a + i));
        acc1 = vaddq_f64(acc1, vld1q_f64(a + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += a[i];
    return s;
}

double dot_neon(const double* a, const double* b, std::size_t n) noexcept {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sqdist_neon(const double* a, const double* b, std::size_t n) noexcept {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float64x2_t d0 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        const float64x2_t d1 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
        acc0 = vfmaq_f64(acc0, d0, d0);
        acc1 = vfmaq_f64(acc1, d1, d1);
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double absdist_neon(const double* a, const double* b, std::size_t n) noexcept {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vaddq_f64(acc0, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
        acc1 = vaddq_f64(acc1, vabdq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += std::fabs(a[i] - b[i]);
    return s;
}

double centered_dot_neon(const double* a, double ma, const double* b, double mb,
                         std::size_t n) noexcept {
    const float64x2_t vma = vdupq_n_f64(ma);
    const float64x2_t vmb = vdupq_n_f64(mb);
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vsubq_f64(vld1q_f64(a + i), vma), vsubq_f64(vld1q_f64(b + i), vmb));
        acc1 = vfmaq_f64(acc1, vsubq_f64(vld1q_f64(a + i + 2), vma),
                         vsubq_f64(vld1q_f64(b + i + 2), vmb));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += (a[i] - ma) * (b[i] - mb);
    return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) noexcept {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable neon_table{
    sum_neon, dot_neon, sqdist_neon, absdist_neon, centered_dot_neon, axpy_neon,
};

}  // namespace stackreg::kernels::detail
