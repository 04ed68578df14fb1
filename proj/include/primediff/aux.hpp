#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "primediff/deligne.hpp"
#include "primediff/padic.hpp"
#include "primediff/poly.hpp"

namespace primediff {

// One fixed p-adic root per prime, used to build every auxiliary polynomial.
class RootChoice {
public:
    RootChoice(MultiPoly h, RootMode mode) : poly_(std::move(h)), mode_(mode) {}

    // Certifies every prime <= p_max; primes that fail stay absent.
    static RootChoice certified(const MultiPoly& h, RootMode mode, u64 p_max, unsigned depth_max = 8,
                                const SearchLimits& limits = {});

    // Stores a root after checking it is a root, certified, and has unit
    // coordinates in P-mode. Fills in the multiplicity when missing.
    void set(u64 p, PAdicRoot root);

    const MultiPoly& polynomial() const { return poly_; }
    RootMode mode() const { return mode_; }
    const std::map<u64, PAdicRoot>& roots() const { return roots_; }
    bool has(u64 p) const { return roots_.count(p) != 0; }
    const PAdicRoot& root(u64 p) const;

    // Root residues mod p^e, re-lifting Hensel roots when e exceeds the stored precision.
    std::vector<u64> residue(u64 p, unsigned e) const;
    unsigned multiplicity(u64 p) const;

private:
    MultiPoly poly_;
    RootMode mode_;
    std::map<u64, PAdicRoot> roots_;
};

struct AuxPoly {
    u64 d = 1;
    std::vector<i64> r;  // r_d in (-d, 0]^l
    mpz_class lambda = 1;
    MultiPoly h_d;
};

std::vector<i64> compute_r_d(const RootChoice& choice, u64 d);
mpz_class compute_lambda(const RootChoice& choice, u64 d);
AuxPoly build_aux(const RootChoice& choice, u64 d);

// Lambda_d membership: every coordinate of r_d + d n is a (positive) prime.
bool in_lambda(const std::vector<i64>& r, u64 d, const std::vector<i64>& n);

struct InheritanceWitness {
    std::vector<i64> n;     // input of h_{qd}, in Lambda_{qd}
    mpz_class t;            // h_{qd}(n), a difference a1' - a2'
    i64 a1 = 0, a2 = 0;     // elements of A' with a1 - a2 = t
    std::vector<i64> m;     // s + q n, in Lambda_d
    mpz_class lambda_t;     // lambda(q) t = h_d(m) = (x + lambda(q) a1) - (x + lambda(q) a2)
};

struct InheritanceReport {
    u64 d = 1, q = 1;
    std::vector<i64> s;  // r_{qd} = r_d + d s
    mpz_class lambda_q;
    std::size_t inputs_enumerated = 0;
    std::size_t inputs_in_lambda = 0;
    std::vector<InheritanceWitness> witnesses;
    std::vector<std::string> violations;
    std::vector<i64> hypothesis_failures;  // a' in A' with x + lambda(q) a' not in A
    bool a_free_in_box = true;        // (A - A) meets h_d(Lambda_d in box) only at 0
    bool a_prime_free_in_box = true;  // same for A' and h_{qd}
};

// Enumerates n in [-box, box]^l.
InheritanceReport verify_inheritance(const RootChoice& choice, u64 d, u64 q, const std::set<i64>& A,
                                     const std::set<i64>& A_prime, i64 x, i64 box);

struct ScanEntry {
    u64 d = 1;
    u64 p = 2;
    DeligneVerdict verdict;
};

struct ScanReport {
    std::vector<ScanEntry> entries;
    std::set<u64> exceptional_primes;  // primes p with some h_d not Deligne mod p
    std::vector<std::pair<u64, std::string>> failures;  // (d, reason) when build_aux fails
};

ScanReport scan_strongly_deligne(const RootChoice& choice, u64 d_max, u64 p_max, unsigned ext_cap = 2);

}  // namespace primediff
