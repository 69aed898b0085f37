#pragma once

#include <cstddef>

namespace quokka::kern {

// Low-level amplitude kernels over interleaved (re, im) double arrays.
// `n` counts complex amplitudes. Matrices and diagonals are interleaved too:
// m[8] is a row-major 2x2 complex matrix, d[4] / d[8] are 2 / 4 entries.
//
// The scalar versions are the reference; the AVX2 versions perform the same
// operations in the same order without FMA, so results are bit-identical.
struct Kernels {
    void (*apply1)(double* a, std::size_t n, int q, const double m[8]);
    void (*diag1)(double* a, std::size_t n, int q, const double d[4]);
    // qa is the most significant sub-index bit: entry index = bit(qa)*2 + bit(qb).
    void (*diag2)(double* a, std::size_t n, int qa, int qb, const double d[8]);
    const char* name;
};

const Kernels& scalarKernels();
bool avx2Available();

// Active backend: "auto" (default), "scalar", or "avx2". The QUOKKA_SIMD
// environment variable provides the initial value; setBackend overrides it.
const Kernels& activeKernels();
void setBackend(const char* name);  // throws ConfigError on unknown/unavailable

}  // namespace quokka::kern
