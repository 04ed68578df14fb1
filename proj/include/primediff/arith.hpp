#pragma once

#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace primediff {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

// Largest modulus the 64-bit residue paths accept; keeps a+b below 2^63.
inline constexpr u64 kMaxModulus = u64{1} << 62;

inline u64 mul_mod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

inline u64 add_mod(u64 a, u64 b, u64 m) {
    u64 s = a + b;
    return s >= m ? s - m : s;
}

inline u64 sub_mod(u64 a, u64 b, u64 m) { return a >= b ? a - b : a + m - b; }

inline u64 pow_mod(u64 base, u64 exp, u64 m) {
    u64 result = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return result;
}

// Reduce a signed value into [0, m).
inline u64 reduce_signed(i64 v, u64 m) {
    i64 r = v % static_cast<i64>(m);
    return static_cast<u64>(r < 0 ? r + static_cast<i64>(m) : r);
}

inline u64 reduce_mpz(const mpz_class& v, u64 m) {
    mpz_class r;
    mpz_fdiv_r_ui(r.get_mpz_t(), v.get_mpz_t(), m);
    return r.get_ui();
}

// Inverse of a modulo m, if gcd(a, m) = 1.
std::optional<u64> inverse_mod(u64 a, u64 m);

// p-adic valuation of v (v != 0).
unsigned valuation(u64 v, u64 p);
unsigned valuation(const mpz_class& v, u64 p);

// p^e, or nullopt when it would exceed kMaxModulus.
std::optional<u64> checked_pow(u64 p, unsigned e);

// Deterministic Miller-Rabin for 64-bit inputs (bases 2..37).
bool is_prime_u64(u64 n);

// Prime factorization as (p, exponent) pairs in increasing p.
std::vector<std::pair<u64, unsigned>> factorize(u64 n);

u64 euler_phi(u64 n);

// Chinese remaindering of residues modulo pairwise coprime moduli.
std::pair<u64, u64> crt_combine(u64 r1, u64 m1, u64 r2, u64 m2);

// e(t) = exp(2 pi i t).
std::complex<double> unit_phase(double t);

// e(num / den) with the numerator reduced exactly before conversion.
std::complex<double> unit_phase_exact(u64 num, u64 den);

// Neumaier-compensated accumulation; order of addition is the caller's.
template <typename T>
class CompensatedSum {
public:
    void add(T x) {
        T t = sum_ + x;
        comp_ += compensation(sum_, x, t);
        sum_ = t;
    }
    T value() const { return sum_ + comp_; }

private:
    static double compensation(double s, double x, double t) {
        return (std::abs(s) >= std::abs(x)) ? (s - t) + x : (x - t) + s;
    }
    static std::complex<double> compensation(std::complex<double> s, std::complex<double> x,
                                             std::complex<double> t) {
        return {compensation(s.real(), x.real(), t.real()),
                compensation(s.imag(), x.imag(), t.imag())};
    }
    T sum_{};
    T comp_{};
};

}  // namespace primediff
