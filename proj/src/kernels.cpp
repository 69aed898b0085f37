#include "quokka/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "quokka/common.hpp"

namespace quokka::kern {

namespace {

// The multiply/add shapes below mirror the AVX2 mul/addsub/add sequence, so
// both backends produce bit-identical results (no FMA on either side).

void scalarApply1(double* a, std::size_t n, int q, const double m[8]) {
    std::size_t step = std::size_t(1) << q;
    for (std::size_t base = 0; base < n; base += 2 * step) {
        for (std::size_t i = base; i < base + step; i++) {
            double* lo = a + 2 * i;
            double* hi = a + 2 * (i + step);
            double x = lo[0], y = lo[1], u = hi[0], v = hi[1];
            lo[0] = (x * m[0] - y * m[1]) + (u * m[2] - v * m[3]);
            lo[1] = (y * m[0] + x * m[1]) + (v * m[2] + u * m[3]);
            hi[0] = (x * m[4] - y * m[5]) + (u * m[6] - v * m[7]);
            hi[1] = (y * m[4] + x * m[5]) + (v * m[6] + u * m[7]);
        }
    }
}

void scalarDiag1(double* a, std::size_t n, int q, const double d[4]) {
    for (std::size_t i = 0; i < n; i++) {
        const double* c = d + 2 * ((i >> q) & 1);
        double x = a[2 * i], y = a[2 * i + 1];
        a[2 * i] = x * c[0] - y * c[1];
        a[2 * i + 1] = y * c[0] + x * c[1];
    }
}

void scalarDiag2(double* a, std::size_t n, int qa, int qb, const double d[8]) {
    for (std::size_t i = 0; i < n; i++) {
        std::size_t e = ((i >> qa) & 1) * 2 + ((i >> qb) & 1);
        const double* c = d + 2 * e;
        double x = a[2 * i], y = a[2 * i + 1];
        a[2 * i] = x * c[0] - y * c[1];
        a[2 * i + 1] = y * c[0] + x * c[1];
    }
}

std::atomic<const Kernels*> active{nullptr};

}  // namespace

const Kernels& scalarKernels() {
    static const Kernels k{scalarApply1, scalarDiag1, scalarDiag2, "scalar"};
    return k;
}

#ifdef QUOKKA_HAVE_AVX2
const Kernels& avx2Kernels();  // kernels_avx2.cpp

bool avx2Available() { return __builtin_cpu_supports("avx2"); }
#else
bool avx2Available() { return false; }
#endif

namespace {

const Kernels* pick(const std::string& mode) {
    if (mode == "scalar") return &scalarKernels();
#ifdef QUOKKA_HAVE_AVX2
    if (mode == "avx2") {
        if (!avx2Available()) throw ConfigError("avx2 backend requested but not supported");
        return &avx2Kernels();
    }
    if (mode == "auto" || mode.empty())
        return avx2Available() ? &avx2Kernels() : &scalarKernels();
#else
    if (mode == "avx2") throw ConfigError("avx2 backend not built in");
    if (mode == "auto" || mode.empty()) return &scalarKernels();
#endif
    throw ConfigError("unknown SIMD backend '" + mode + "' (auto, scalar, avx2)");
}

}  // namespace

const Kernels& activeKernels() {
    const Kernels* k = active.load(std::memory_order_acquire);
    if (!k) {
        const char* env = std::getenv("QUOKKA_SIMD");
        k = pick(env ? env : "auto");
        active.store(k, std::memory_order_release);
    }
    return *k;
}

void setBackend(const char* name) {
    active.store(pick(name ? name : "auto"), std::memory_order_release);
}

}  // namespace quokka::kern
