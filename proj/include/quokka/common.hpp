#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace quokka {

using Amp = std::complex<double>;
using Index = std::uint64_t;

// Error taxonomy, mapped to CLI exit codes by the frontend:
//   ParseError -> 1, ConfigError -> 2, SimulationError -> 3.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SimulationError : std::runtime_error {
    explicit SimulationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Doubles are printed with 17 significant digits so that text round-trips
// reproduce the exact binary value.
std::string fmt17(double v);

// Deterministic RNG helper. std::mt19937_64 has a pinned algorithm, but the
// standard distributions do not, so uniform doubles are derived from raw bits.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(splitmix(seed)), seq_(seed) {}

    std::uint64_t nextU64() {
        // xorshift* keeps this header-only and platform-stable.
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545F4914F6CDD1DULL;
    }

    // Uniform in [0, 1).
    double nextDouble() { return double(nextU64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound).
    std::uint64_t nextBelow(std::uint64_t bound) { return nextU64() % bound; }

    std::uint64_t seed() const { return seq_; }

private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    std::uint64_t state_;
    std::uint64_t seq_;
};

inline int popcount64(std::uint64_t x) { return __builtin_popcountll(x); }

}  // namespace quokka
