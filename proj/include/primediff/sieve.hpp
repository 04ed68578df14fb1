#pragma once

#include <optional>
#include <vector>

#include <gmpxx.h>

#include "primediff/aux.hpp"
#include "primediff/poly.hpp"

namespace primediff {

// Gradient-sieve data at one prime.
struct SievePrime {
    u64 p = 2;
    unsigned gamma = 1;   // gamma_d(p)
    u64 j = 0;            // j_d(p): gradient zeros mod p^gamma on J_d(p)
    u64 J_size = 0;       // |J_d(p)| = ((p - eps) p^(gamma-1))^l
    unsigned eps = 1;     // eps_d(p): 0 if p | d, else 1
};

struct GammaOptions {
    std::optional<unsigned> cap;  // default: 2 + k + v_p(k! * content(h_d))
    u64 class_cap = 20'000'000;   // residue classes enumerated per level
};

unsigned default_gamma_cap(const MultiPoly& h_d, u64 p);

// Throws SearchCapExceeded when gamma would exceed the cap.
SievePrime gamma_and_j(const MultiPoly& h_d, const std::vector<i64>& r, u64 d, u64 p, const GammaOptions& opt = {});

// prod (1 - j / |J|), exactly.
mpq_class w_product(const std::vector<SievePrime>& primes);

struct SieveProfile {
    u64 d = 1;
    u64 Y = 1;
    std::vector<i64> r;
    mpz_class lambda = 1;
    MultiPoly h_d;
    std::vector<SievePrime> primes;  // every prime p <= Y, increasing
    mpq_class w_exact = 1;
    double w = 1.0;

    std::size_t nvars() const { return h_d.nvars(); }
    const SievePrime* find(u64 p) const;
};

SieveProfile build_profile(const AuxPoly& aux, u64 Y, const GammaOptions& opt = {});
SieveProfile build_profile(const RootChoice& choice, u64 d, u64 Y, const GammaOptions& opt = {});

// grad h_d(n) = 0 mod p^gamma_d(p).
bool gradient_vanishes(const SieveProfile& prof, const SievePrime& sp, const std::vector<i64>& n);

// n in Lambda_d and grad h_d(n) != 0 mod p^gamma for every p <= Y.
bool in_W(const SieveProfile& prof, const std::vector<i64>& n);

// The weight nu_d(n); 0 outside W_d(Y).
double nu_weight(const SieveProfile& prof, const std::vector<i64>& n);

// n in W_{d,q}(Y): coordinates of r_d + d n coprime to q, and grad h_d(n) != 0
// mod p^gamma for every p <= Y with p^gamma | q.
bool membership_W_dq(const SieveProfile& prof, const std::vector<i64>& n, u64 q);

// w_{d,q}(s): product over p <= Y with p^gamma not dividing q.
mpq_class w_dq(const SieveProfile& prof, const std::vector<i64>& s, u64 q);

struct Truncation {
    unsigned t = 0;
    double value = 0.0;         // truncated inclusion-exclusion sum
    bool brackets = true;       // exact sign condition held at every point
    bool matches_direct = true; // class decomposition equals per-point count
    bool exact = false;         // equals the true sum term by term
};

struct SandwichReport {
    std::vector<u64> sieve_primes;
    std::size_t points = 0;
    std::size_t points_in_lambda = 0;
    bool weights_nonnegative = true;
    double true_sum = 0.0;
    std::vector<Truncation> truncations;
    std::size_t violations = 0;
};

// Sum of nu_d over the box [1, box]^l against truncated inclusion-exclusion
// sums computed from the bad gradient classes, combined by CRT.
SandwichReport sieve_sum_sandwich(const SieveProfile& prof, i64 box, const std::vector<unsigned>& t_values);

}  // namespace primediff
