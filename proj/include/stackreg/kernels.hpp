#pragma once
// Data-parallel reductions used by every numeric module.
//
// Each kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 (x86-64, selected at runtime via cpuid) or NEON
// (aarch64) variant. Vector variants reassociate sums, so results agree with
// the scalar reference only up to rounding; callers must not rely on
// bit-equality across backends. Within one process the selected backend is
// fixed, so repeated runs are bit-identical.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace stackreg::kernels {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b) noexcept;

/// Backend chosen at startup (best available, or STACKREG_SIMD=scalar|avx2|neon).
Backend active_backend() noexcept;

/// Backends usable on this machine; Scalar is always first.
std::vector<Backend> available_backends();

/// Switch backend for the whole process. Returns false if unavailable.
/// Intended for tests and benchmarks; not thread-safe against concurrent kernel calls.
bool set_backend(Backend b) noexcept;

// All spans passed to a binary kernel must have equal length (checked by callers).

double sum(std::span<const double> a) noexcept;
double dot(std::span<const double> a, std::span<const double> b) noexcept;
/// sum_i (a_i - b_i)^2
double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;
/// sum_i |a_i - b_i|
double abs_distance(std::span<const double> a, std::span<const double> b) noexcept;
/// sum_i (a_i - ma) (b_i - mb)
double centered_dot(std::span<const double> a, double ma, std::span<const double> b,
                    double mb) noexcept;
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept;

/// Direct access to one backend's table, for equivalence testing.
struct KernelTable {
    double (*sum)(const double*, std::size_t) noexcept;
    double (*dot)(const double*, const double*, std::size_t) noexcept;
    double (*squared_distance)(const double*, const double*, std::size_t) noexcept;
    double (*abs_distance)(const double*, const double*, std::size_t) noexcept;
    double (*centered_dot)(const double*, double, const double*, double, std::size_t) noexcept;
    void (*axpy)(double, const double*, double*, std::size_t) noexcept;
};

/// nullptr if the backend is not compiled in or not supported by this CPU.
const KernelTable* table_for(Backend b) noexcept;

namespace detail {
extern const KernelTable scalar_table;
#if defined(STACKREG_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
#if defined(STACKREG_HAVE_NEON)
extern const KernelTable neon_table;
#endif
}  // namespace detail

}  // namespace stackreg::kernels
