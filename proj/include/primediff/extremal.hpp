#pragma once

#include <optional>
#include <string>
#include <vector>

#include "primediff/aux.hpp"
#include "primediff/expsum.hpp"
#include "primediff/sieve.hpp"

namespace primediff {

struct DifferenceSet {
    u64 N = 1;
    std::vector<u64> X;  // sorted, deduplicated, inside [1, N-1]
    std::string provenance;
};

DifferenceSet make_difference_set(std::vector<u64> values, u64 N, std::string provenance = "explicit");

// {h_d(n) : n in [1, box]^l, r_d + d n in P^l} cap [1, N-1].
DifferenceSet build_difference_set(const AuxPoly& aux, i64 box, u64 N, u64 point_cap = kDefaultPointCap);

// {h(n) : n in [-box, box]^l} cap [1, N-1], inputs unrestricted.
DifferenceSet build_difference_set_unrestricted(const MultiPoly& h, i64 box, u64 N,
                                                u64 point_cap = kDefaultPointCap);

enum class SolveMethod { Exhaustive, BranchAndBound, GreedyLowerBound };
std::string to_string(SolveMethod m);

struct FreeSetResult {
    u64 N = 0;
    std::vector<u64> X;
    u64 size = 0;              // D(X, N), or a lower bound for GreedyLowerBound
    std::vector<u64> witness;  // increasing elements of [1, N]
    SolveMethod method = SolveMethod::Exhaustive;
    u64 nodes = 0;

    bool exact() const { return method != SolveMethod::GreedyLowerBound; }
};

// (A - A) cap X = {} for the elements of A.
bool is_difference_free(const std::vector<u64>& A, const std::vector<u64>& X);

inline constexpr u64 kExhaustiveMaxN = 24;
inline constexpr u64 kBranchBoundMaxN = 512;
inline constexpr u64 kDefaultNodeCap = 200'000'000;

// All 2^N subsets; N <= 26.
FreeSetResult free_subset_exhaustive(const DifferenceSet& X);

// Solves D(X, n) for n = 1..N in turn; a set of size D(X, n-1) + 1 inside [n]
// must contain both 1 and n, and D(X, m) bounds every window of length m.
// Falls back to the greedy lower bound past the node cap.
FreeSetResult free_subset_branch_bound(const DifferenceSet& X, u64 node_cap = kDefaultNodeCap);

FreeSetResult free_subset_greedy(const DifferenceSet& X);

// Exhaustive for N <= 24, otherwise branch and bound.
FreeSetResult max_free_subset(const DifferenceSet& X, u64 node_cap = kDefaultNodeCap);

struct DTableRow {
    u64 N = 0;
    u64 D = 0;
    double ratio = 0.0;
    SolveMethod method = SolveMethod::Exhaustive;
    std::size_t x_size = 0;
};

// X_N = build_difference_set(aux, box, N) for each N.
std::vector<DTableRow> d_table(const AuxPoly& aux, const std::vector<u64>& Ns, i64 box,
                               u64 node_cap = kDefaultNodeCap);

// Balanced function f_A = 1_A - delta 1_[L] as a vector indexed by x - 1.
std::vector<double> balanced_function(const std::vector<u64>& A, u64 L);

// Closed form of the integral of |f_A^|^2 over M'_q(gamma) = union_{a < q} {|alpha - a/q| < gamma},
// from the autocorrelation R(k) = sum_x f_A(x) f_A(x + k).
double fourier_mass(const std::vector<u64>& A, u64 L, u64 q, double gamma);

struct CountIdentityReport {
    double lhs = 0.0;   // sum_x sum_n f_A(x) f_A(x + h_d(n)) nu_d(n)
    double rhs = 0.0;   // integral of |f_A^|^2 S on an exact grid
    double diff = 0.0;
    double delta = 0.0;
    double T = 0.0;     // S(0)
    double scale = 0.0; // delta^2 L T
    u64 grid = 0;       // 8 (L + max |h_d(n)|) nodes
    bool within(double tol) const { return diff <= tol * std::max(1.0, scale); }
};

CountIdentityReport count_identity_check(const std::vector<u64>& A, u64 L, const SieveProfile& prof, i64 M);

struct Progression {
    i64 x = 0;   // P = {x + a q : 1 <= a <= length}
    u64 q = 1;
    u64 length = 0;
};

struct IncrementReport {
    bool hypothesis_met = false;
    double delta = 0.0;
    double mass = 0.0;
    double theta = 0.0;
    double required = 0.0;  // theta delta^2 L
    std::optional<Progression> progression;
    u64 hits = 0;            // |A cap P|
    double density = 0.0;    // hits / length
    double target = 0.0;     // (1 + theta/32) delta
    bool conclusion_holds = false;
    u64 base_length = 0;     // floor(min(theta L, 1/gamma) / q)
    std::vector<u64> lengths_searched;
};

// Measured theta = min(1, mass / (delta^2 L)) when theta is not given.
// Searches progressions of step q inside [L] over the lengths base_length / 2^j, j = 0..4.
IncrementReport increment_step(const std::vector<u64>& A, u64 L, u64 q, double gamma,
                               std::optional<double> theta = std::nullopt);

}  // namespace primediff
