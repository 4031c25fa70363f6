#include "stackreg/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace stackreg::kernels {
namespace {

bool cpu_supports(Backend b) noexcept {
    switch (b) {
        case Backend::Scalar:
            return true;
        case Backend::Avx2:
#if defined(STACKREG_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
            __builtin_cpu_init();
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::Neon:
#if defined(STACKREG_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

const KernelTable* raw_table(Backend b) noexcept {
    switch (b) {
        case Backend::Scalar:
            return &detail::scalar_table;
        case Backend::Avx2:
#if defined(STACKREG_HAVE_AVX2)
            return &detail::avx2_table;
#else
            return nullptr;
#endif
        case Backend::Neon:
#if defined(STACKREG_HAVE_NEON)
            return &detail::neon_table;
#else
            return nullptr;
#endif
    }
    return nullptr;
}

Backend pick_default() noexcept {
    if (const char* env = std::getenv("STACKREG_SIMD")) {
        const std::string want{env};
        if (want == "scalar") return Backend::Scalar;
        if (want == "avx2" && cpu_supports(Backend::Avx2)) return Backend::Avx2;
        if (want == "neon" && cpu_supports(Backend::Neon)) return Backend::Neon;
    }
    if (cpu_supports(Backend::Avx2)) return Backend::Avx2;
    if (cpu_supports(Backend::Neon)) return Backend::Neon;
    return Backend::Scalar;
}

struct State {
    std::atomic<Backend> backend{pick_default()};
    std::atomic<const KernelTable*> table{raw_table(backend.load())};
};

State& state() noexcept {
    static State s;
    return s;
}

inline const KernelTable& active() noexcept {
    return *state().table.load(std::memory_order_relaxed);
}

}  // namespace

std::string_view backend_name(Backend b) noexcept {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
    }
    return "unknown";
}

Backend active_backend() noexcept { return state().backend.load(); }

std::vector<Backend> available_backends() {
    std::vector<Backend> out{Backend::Scalar};
    for (Backend b : {Backend::Avx2, Backend::Neon}) {
        if (table_for(b) != nullptr) out.push_back(b);
    }
    return out;
}

bool set_backend(Backend b) noexcept {
    const KernelTable* t = table_for(b);
    if (t == nullptr) return false;
    state().backend.store(b);
    state().table.store(t);
    return true;
}

const KernelTable* table_for(Backend b) noexcept {
    return cpu_supports(b) ? raw_table(b) : nullptr;
}

double sum(std::span<const double> a) noexcept { return active().sum(a.data(), a.size()); }

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    return active().dot(a.data(), b.data(), a.size());
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    return active().squared_distance(a.data(), b.data(), a.size());
}

double abs_distance(std::span<const double> a, std::span<const double> b) noexcept {
    return active().abs_distance(a.data(), b.data(), a.size());
}

double centered_dot(std::span<const double> a, double ma, std::span<const double> b,
                    double mb) noexcept {
    return active().centered_dot(a.data(), ma, b.data(), mb, a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
    active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace stackreg::kernels
