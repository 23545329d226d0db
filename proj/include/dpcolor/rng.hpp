#pragma once

#include <cstdint>
#include <vector>

#include "dpcolor/errors.hpp"
#include "dpcolor/numeric.hpp"

namespace dpcolor {

// All randomized operations take an explicit Seed and are pure functions of
// (inputs, seed). Identical seed + identical inputs => bit-identical output.
struct Seed {
    std::uint64_t value = 0;
};

namespace detail {
// splitmix64 finalizer (Steele, Lea, Flood; public-domain constants).
inline std::uint64_t splitmix_finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

// Independent substream derivation: hash (seed, salt) through the splitmix64
// finalizer twice. Any two distinct salts give unrelated streams.
inline Seed derive(Seed s, std::uint64_t salt) {
    std::uint64_t x = s.value + 0x9e3779b97f4a7c15ULL * (salt + 1);
    return Seed{detail::splitmix_finalize(detail::splitmix_finalize(x) + 0x9e3779b97f4a7c15ULL)};
}

// splitmix64 stream generator. The algorithm is fixed by this header, so
// streams are reproducible across platforms within this artifact.
class Rng {
public:
    explicit Rng(Seed s) : state_(s.value) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return detail::splitmix_finalize(state_);
    }

    // Uniform in [0,1), 53 random mantissa bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [0,n). Masked rejection, deterministic given the stream.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw parameter_error("next_below: n must be positive");
        std::uint64_t mask = n - 1;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        mask |= mask >> 32;
        std::uint64_t r;
        do {
            r = next_u64() & mask;
        } while (r >= n);
        return r;
    }

    // Uniform in [0,n) for arbitrary-precision n; bitwise rejection.
    BigInt next_below_big(const BigInt& n) {
        if (n <= 0) throw parameter_error("next_below_big: n must be positive");
        const unsigned bits = static_cast<unsigned>(msb(n)) + 1;
        const unsigned words = (bits + 63) / 64;
        const unsigned top_shift = words * 64 - bits;
        BigInt r;
        do {
            r = 0;
            for (unsigned i = 0; i < words; ++i) {
                r <<= 64;
                r |= next_u64();
            }
            r >>= top_shift;
        } while (r >= n);
        return r;
    }

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

}  // namespace dpcolor
