#ifndef LEXMDL_COMMON_HPP
#define LEXMDL_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace lexmdl {

// Counts are non-negative reals: sense-splitting preprocessing may divide
// an observed frequency fractionally between virtual words.
using Count = double;

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string &what, std::size_t line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kInfiniteBits = std::numeric_limits<double>::infinity();

// Description lengths are compared with this absolute tolerance so that
// floating-point noise cannot flip a tie.
inline constexpr double kBitsTolerance = 1e-9;

// x * log2(x) with the 0 * log 0 = 0 convention.
inline double xlog2(double x) {
    return x > 0.0 ? x * std::log2(x) : 0.0;
}

// Deterministic 64-bit generator (xoshiro-free, splitmix64 seeded mt19937_64
// would also do, but we keep the arithmetic fully portable so that identical
// seeds give identical artifacts on any platform).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next_u64() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // Rejection sampling keeps the draw exactly uniform.
        std::uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Derive an independent stream, e.g. one per trial.
    Rng fork(std::uint64_t stream) {
        std::uint64_t mixed = state_ ^ (0x94d049bb133111ebULL * (stream + 1));
        Rng child(mixed);
        child.next_u64();
        return child;
    }

private:
    std::uint64_t state_;
};

} // namespace lexmdl

#endif // LEXMDL_COMMON_HPP
