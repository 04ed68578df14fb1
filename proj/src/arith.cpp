#include "primediff/arith.hpp"

#include <cmath>
#include <numbers>

namespace primediff {

std::optional<u64> inverse_mod(u64 a, u64 m) {
    i128 old_r = static_cast<i128>(a % m), r = static_cast<i128>(m);
    i128 old_s = 1, s = 0;
    while (r != 0) {
        i128 q = old_r / r;
        std::swap(old_r, r);
        r -= q * old_r;
        std::swap(old_s, s);
        s -= q * old_s;
    }
    if (old_r != 1) return std::nullopt;
    i128 inv = old_s % static_cast<i128>(m);
    if (inv < 0) inv += m;
    return static_cast<u64>(inv);
}

unsigned valuation(u64 v, u64 p) {
    unsigned e = 0;
    while (v != 0 && v % p == 0) {
        v /= p;
        ++e;
    }
    return e;
}

unsigned valuation(const mpz_class& v, u64 p) {
    if (v == 0) return 0;
    mpz_class pp = p;
    mpz_class tmp = v;
    return static_cast<unsigned>(mpz_remove(tmp.get_mpz_t(), tmp.get_mpz_t(), pp.get_mpz_t()));
}

std::optional<u64> checked_pow(u64 p, unsigned e) {
    u64 r = 1;
    for (unsigned i = 0; i < e; ++i) {
        if (r > kMaxModulus / p) return std::nullopt;
        r *= p;
    }
    return r;
}

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    static constexpr u64 small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (u64 p : small) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : small) {
        u64 x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (unsigned i = 1; i < s; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

std::vector<std::pair<u64, unsigned>> factorize(u64 n) {
    std::vector<std::pair<u64, unsigned>> out;
    for (u64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

u64 euler_phi(u64 n) {
    u64 phi = n;
    for (auto [p, e] : factorize(n)) phi = phi / p * (p - 1);
    return phi;
}

std::pair<u64, u64> crt_combine(u64 r1, u64 m1, u64 r2, u64 m2) {
    // x = r1 + m1 * t, t = (r2 - r1) / m1 mod m2
    u64 inv = *inverse_mod(m1 % m2, m2);
    u64 t = mul_mod(sub_mod(r2 % m2, r1 % m2, m2), inv, m2);
    u64 m = m1 * m2;
    return {(r1 + static_cast<u64>(static_cast<u128>(m1) * t % m)) % m, m};
}

std::complex<double> unit_phase(double t) {
    t -= std::floor(t);
    double angle = 2.0 * std::numbers::pi * t;
    return {std::cos(angle), std::sin(angle)};
}

std::complex<double> unit_phase_exact(u64 num, u64 den) {
    num %= den;
    double angle = 2.0 * std::numbers::pi * (static_cast<double>(num) / static_cast<double>(den));
    return {std::cos(angle), std::sin(angle)};
}

}  // namespace primediff
