#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <gmpxx.h>

#include "primediff/deligne.hpp"
#include "primediff/poly.hpp"
#include "primediff/sieve.hpp"

namespace primediff {

using cplx = std::complex<double>;

// sum over x in F_p^l of e(g(x)/p), from a histogram of exact residues.
cplx complete_sum(const MultiPoly& g, u64 p, u64 point_cap = kDefaultPointCap);

// (k - 1)^l p^(l/2)
double deligne_bound(unsigned k, std::size_t l, u64 p);

// alpha = a/q + beta mod 1.
struct FreqPoint {
    i64 a = 0;
    u64 q = 1;
    double beta = 0.0;

    static FreqPoint rational(i64 a, u64 q);
    static FreqPoint real(double alpha);
    double value() const;
    FreqPoint negated() const;
};

// Weighted residue histogram of h_d(s) mod q over s in [q]^l with s in W_{d,q}(Y),
// weights w_{d,q}(s). G(a, q) for every a costs O(q) once it is built.
class LocalSums {
public:
    LocalSums(const SieveProfile& prof, u64 q, u64 point_cap = kDefaultPointCap);

    u64 modulus() const { return q_; }
    std::size_t terms() const { return terms_; }    // |[q]^l cap W_{d,q}(Y)|
    const mpq_class& total_weight() const { return total_; }
    cplx G(i64 a) const;

private:
    u64 q_;
    std::size_t terms_ = 0;
    mpq_class total_ = 0;
    std::vector<double> weight_;  // indexed by residue h_d(s) mod q
};

cplx local_sum_G(const SieveProfile& prof, i64 a, u64 q, u64 point_cap = kDefaultPointCap);

// The admissible points of [1, M]^l with their weights nu_d(n) and values h_d(n).
struct NuBox {
    i64 M = 0;
    std::vector<std::vector<i64>> points;
    std::vector<double> nu;
    std::vector<mpz_class> h;
    double total = 0.0;  // S(0)
};

NuBox nu_box(const SieveProfile& prof, i64 M, u64 point_cap = kDefaultPointCap);

// S(alpha) = sum nu_d(n) e(h_d(n) alpha), summed in lexicographic order of n.
cplx S_alpha(const NuBox& box, const FreqPoint& alpha);
cplx S_alpha(const SieveProfile& prof, i64 M, const FreqPoint& alpha);

struct ArcPartition {
    double gamma = 0.01;
    u64 Q = 1;

    // 2 gamma Q^2 < 1 makes the arcs M_{a/q}(gamma), q <= Q, pairwise disjoint.
    bool disjoint() const { return 2.0 * gamma * static_cast<double>(Q) * static_cast<double>(Q) < 1.0; }
};

struct ArcClass {
    bool major = false;
    i64 a = 0;
    u64 q = 1;
    unsigned covering = 0;  // number of centers a/q within gamma
};

// Smallest covering q, then smallest a.
ArcClass arc_classify(double alpha, const ArcPartition& arcs);

struct MinorArcReport {
    std::size_t samples = 0;
    std::size_t minor_samples = 0;
    double max_ratio = 0.0;  // max |S(alpha)| / S(0) over minor samples
    double argmax = 0.0;
};

// alpha = (k + 1/2) / samples for k < samples.
MinorArcReport minor_arc_measure(const NuBox& box, const ArcPartition& arcs, std::size_t samples);

// Number of ordered 2m-tuples of B with ||b_1 + ... + b_m - b_{m+1} - ... - b_{2m}|| <= eps.
// Elements of B are taken mod 1; eps = 0 gives E_{2m}(B).
u64 additive_energy(const std::vector<mpq_class>& B, unsigned m, const mpq_class& eps = 0,
                    u64 tuple_cap = 50'000'000);

struct EnergyBoundReport {
    u64 energy = 0;
    u64 Q = 0;
    u64 n = 0;
    u64 max_per_denominator = 0;
    bool hypothesis_ok = true;  // every element has denominator <= Q and |B_q| <= n
    double base = 0.0;          // (Q n)^m
    double ratio = 0.0;         // energy / base
    double log_factor = 0.0;    // (log Q)^K
    bool holds = false;         // energy <= base * log_factor
};

EnergyBoundReport bme_bound_check(const std::vector<mpq_class>& B, unsigned m, u64 Q, u64 n, unsigned K = 4);

// All reduced a/q in [0, 1) with q <= Q.
std::vector<mpq_class> farey_fractions(u64 Q);

}  // namespace primediff
