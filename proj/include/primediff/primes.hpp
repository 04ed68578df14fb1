#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "primediff/arith.hpp"
#include "primediff/poly.hpp"

namespace primediff {

inline constexpr u64 kDefaultPrimeCap = 100'000'000;

// Sorted list of all primes <= limit.
class PrimeTable {
public:
    PrimeTable() = default;
    PrimeTable(u64 limit, std::vector<u64> primes) : limit_(limit), primes_(std::move(primes)) {}

    u64 limit() const { return limit_; }
    const std::vector<u64>& primes() const& { return primes_; }
    std::vector<u64> primes() && { return std::move(primes_); }
    std::size_t size() const { return primes_.size(); }
    bool contains(u64 n) const;

private:
    u64 limit_ = 0;
    std::vector<u64> primes_;
};

// Segmented sieve of Eratosthenes. Throws SearchCapExceeded when x > cap.
PrimeTable primes_up_to(u64 x, u64 cap = kDefaultPrimeCap);

// Primality for the Lambda_d membership tests: a sieve bitmap for small n,
// deterministic Miller-Rabin (bases 2..37) above it.
bool is_prime(u64 n);
bool is_prime(i64 n);
inline constexpr u64 kPrimeBitmapLimit = u64{1} << 22;

struct PsiValue {
    double value = 0.0;
    std::size_t count = 0;
};

// Chebyshev psi(x, a, q): sum of log p over primes p <= x, p = a (mod q),
// summed in increasing p.
PsiValue psi(double x, i64 a, u64 q);

// Weighted variant: sum of g(p) log p over the same progression, g univariate.
PsiValue psi_weighted(double x, i64 a, u64 q, const MultiPoly& g);

// Prefix sums per residue class so repeated psi(x, a, q) queries for one q are
// logarithmic. Values are bit-identical to psi() since the running sums use
// the same order.
class PsiIndex {
public:
    PsiIndex(const PrimeTable& table, u64 q);

    u64 modulus() const { return q_; }
    PsiValue operator()(double x, i64 a) const;

private:
    u64 q_;
    u64 limit_;
    std::vector<std::vector<u64>> primes_;
    std::vector<std::vector<double>> cumulative_;
};

// Optional exceptional-character data (q0, rho, chi) for main-term experiments.
// chi[a mod q0] holds the character values.
struct ExceptionalCharacter {
    u64 q0 = 1;
    double rho = 0.5;
    std::vector<std::complex<double>> chi;
};

// x/phi(q), minus chi(a) x^rho / (phi(q) rho) when a hook is supplied and q0 | q.
std::complex<double> psi_main_term(double x, i64 a, u64 q,
                                   const std::optional<ExceptionalCharacter>& hook = std::nullopt);

}  // namespace primediff
