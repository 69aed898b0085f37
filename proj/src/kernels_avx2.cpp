#include <immintrin.h>

#include "quokka/kernels.hpp"

// Compiled with -mavx2; only reached after the runtime cpuid check.

namespace quokka::kern {

namespace {

// (re, im) * (cre + i*cim) per 128-bit lane via mul/permute/addsub; the same
// term order as the scalar kernels, so no rounding differences.
inline __m256d cmul4(__m256d v, __m256d cre, __m256d cim) {
    __m256d t1 = _mm256_mul_pd(v, cre);
    __m256d sw = _mm256_permute_pd(v, 0x5);
    __m256d t2 = _mm256_mul_pd(sw, cim);
    return _mm256_addsub_pd(t1, t2);
}

inline __m128d cmul2(__m128d v, __m128d cre, __m128d cim) {
    __m128d t1 = _mm_mul_pd(v, cre);
    __m128d sw = _mm_permute_pd(v, 0x1);
    __m128d t2 = _mm_mul_pd(sw, cim);
    return _mm_addsub_pd(t1, t2);
}

void avx2Apply1(double* a, std::size_t n, int q, const double m[8]) {
    if (q == 0) {
        // Pair members are adjacent; work on one complex per 128-bit half.
        __m128d c00r = _mm_set1_pd(m[0]), c00i = _mm_set1_pd(m[1]);
        __m128d c01r = _mm_set1_pd(m[2]), c01i = _mm_set1_pd(m[3]);
        __m128d c10r = _mm_set1_pd(m[4]), c10i = _mm_set1_pd(m[5]);
        __m128d c11r = _mm_set1_pd(m[6]), c11i = _mm_set1_pd(m[7]);
        for (std::size_t i = 0; i < n; i += 2) {
            __m128d lo = _mm_loadu_pd(a + 2 * i);
            __m128d hi = _mm_loadu_pd(a + 2 * i + 2);
            __m128d r0 = _mm_add_pd(cmul2(lo, c00r, c00i), cmul2(hi, c01r, c01i));
            __m128d r1 = _mm_add_pd(cmul2(lo, c10r, c10i), cmul2(hi, c11r, c11i));
            _mm_storeu_pd(a + 2 * i, r0);
            _mm_storeu_pd(a + 2 * i + 2, r1);
        }
        return;
    }
    __m256d c00r = _mm256_set1_pd(m[0]), c00i = _mm256_set1_pd(m[1]);
    __m256d c01r = _mm256_set1_pd(m[2]), c01i = _mm256_set1_pd(m[3]);
    __m256d c10r = _mm256_set1_pd(m[4]), c10i = _mm256_set1_pd(m[5]);
    __m256d c11r = _mm256_set1_pd(m[6]), c11i = _mm256_set1_pd(m[7]);
    std::size_t step = std::size_t(1) << q;
    for (std::size_t base = 0; base < n; base += 2 * step) {
        for (std::size_t i = base; i < base + step; i += 2) {
            __m256d lo = _mm256_loadu_pd(a + 2 * i);
            __m256d hi = _mm256_loadu_pd(a + 2 * (i + step));
            __m256d r0 = _mm256_add_pd(cmul4(lo, c00r, c00i), cmul4(hi, c01r, c01i));
            __m256d r1 = _mm256_add_pd(cmul4(lo, c10r, c10i), cmul4(hi, c11r, c11i));
            _mm256_storeu_pd(a + 2 * i, r0);
            _mm256_storeu_pd(a + 2 * (i + step), r1);
        }
    }
}

void avx2Diag1(double* a, std::size_t n, int q, const double d[4]) {
    if (q == 0) {
        __m256d cre = _mm256_setr_pd(d[0], d[0], d[2], d[2]);
        __m256d cim = _mm256_setr_pd(d[1], d[1], d[3], d[3]);
        for (std::size_t i = 0; i < n; i += 2)
            _mm256_storeu_pd(a + 2 * i, cmul4(_mm256_loadu_pd(a + 2 * i), cre, cim));
        return;
    }
    __m256d c0r = _mm256_set1_pd(d[0]), c0i = _mm256_set1_pd(d[1]);
    __m256d c1r = _mm256_set1_pd(d[2]), c1i = _mm256_set1_pd(d[3]);
    std::size_t step = std::size_t(1) << q;
    for (std::size_t base = 0; base < n; base += 2 * step) {
        for (std::size_t i = base; i < base + step; i += 2)
            _mm256_storeu_pd(a + 2 * i, cmul4(_mm256_loadu_pd(a + 2 * i), c0r, c0i));
        for (std::size_t i = base + step; i < base + 2 * step; i += 2)
            _mm256_storeu_pd(a + 2 * i, cmul4(_mm256_loadu_pd(a + 2 * i), c1r, c1i));
    }
}

void avx2Diag2(double* a, std::size_t n, int qa, int qb, const double d[8]) {
    if (qa > 0 && qb > 0) {
        for (std::size_t i = 0; i < n; i += 2) {
            std::size_t e = ((i >> qa) & 1) * 2 + ((i >> qb) & 1);
            __m256d cre = _mm256_set1_pd(d[2 * e]);
            __m256d cim = _mm256_set1_pd(d[2 * e + 1]);
            _mm256_storeu_pd(a + 2 * i, cmul4(_mm256_loadu_pd(a + 2 * i), cre, cim));
        }
        return;
    }
    // One of the positions is bit 0: the entry alternates inside the vector.
    for (std::size_t i = 0; i < n; i += 2) {
        std::size_t e0 = ((i >> qa) & 1) * 2 + ((i >> qb) & 1);
        std::size_t e1 = (((i + 1) >> qa) & 1) * 2 + (((i + 1) >> qb) & 1);
        __m256d cre = _mm256_setr_pd(d[2 * e0], d[2 * e0], d[2 * e1], d[2 * e1]);
        __m256d cim = _mm256_setr_pd(d[2 * e0 + 1], d[2 * e0 + 1], d[2 * e1 + 1], d[2 * e1 + 1]);
        _mm256_storeu_pd(a + 2 * i, cmul4(_mm256_loadu_pd(a + 2 * i), cre, cim));
    }
}

}  // namespace

const Kernels& avx2Kernels() {
    static const Kernels k{avx2Apply1, avx2Diag1, avx2Diag2, "avx2"};
    return k;
}

}  // namespace quokka::kern
