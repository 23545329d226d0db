#pragma once

#include <cstdint>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "dpcolor/errors.hpp"

namespace dpcolor {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// Software quad float (113-bit significand). Used for all log-space formula
// evaluation; handles quantities like n^{-3s} = 1e-240 without underflow.
using Quad = boost::multiprecision::cpp_bin_float_quad;

// Exact binomial coefficient; 0 outside the triangle.
inline BigInt binom(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt r = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

// ln C(n,k) via lgamma; n may be non-integral (used on geometric grids).
inline Quad lchoose(Quad n, Quad k) {
    using boost::math::lgamma;
    if (k < 0 || k > n) return -std::numeric_limits<Quad>::infinity();
    return lgamma(n + 1) - lgamma(k + 1) - lgamma(n - k + 1);
}

inline Quad to_quad(const BigInt& x) { return Quad(x); }

// Natural log of a positive big integer.
inline Quad ln_big(const BigInt& x) {
    if (x <= 0) throw parameter_error("ln_big: argument must be positive");
    return log(Quad(x));
}

// Smallest integer m >= 0 with m^den >= base^num, i.e. ceil(base^(num/den)).
// Exact integer arithmetic; base = max degree in practice.
inline std::int64_t ceil_pow_frac(std::int64_t base, int num, int den) {
    if (base < 0 || num < 0 || den <= 0) throw parameter_error("ceil_pow_frac: bad arguments");
    if (base == 0) return 0;
    BigInt target = pow(BigInt(base), static_cast<unsigned>(num));
    std::int64_t lo = 0, hi = base;  // num <= den in all uses, so m <= base
    while (pow(BigInt(hi), static_cast<unsigned>(den)) < target) hi *= 2;
    while (lo < hi) {
        std::int64_t mid = lo + (hi - lo) / 2;
        if (pow(BigInt(mid), static_cast<unsigned>(den)) >= target)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

}  // namespace dpcolor
