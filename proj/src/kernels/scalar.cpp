// Scalar reference kernels. Plain left-to-right accumulation.

#include "stackreg/kernels.hpp"

#include <cmath>

namespace stackreg::kernels::detail {
namespace {

double sum_scalar(const double* a, std::size_t n) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
}

double dot_scalar(const double* a, const double* b, std::size_t n) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sqdist_scalar(const double* a, const double* b, std::size_t n) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double absdist_scalar(const double* a, const double* b, std::size_t n) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i] - b[i]);
    return s;
}

double centered_dot_scalar(const double* a, double ma, const double* b, double mb,
                           std::size_t n) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (a[i] - ma) * (b[i] - mb);
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) noexcept {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable scalar_table{
    sum_scalar, dot_scalar, sqdist_scalar, absdist_scalar, centered_dot_scalar, axpy_scalar,
};

}  // namespace stackreg::kernels::detail
