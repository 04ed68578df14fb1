#pragma once

#include <optional>
#include <string>
#include <vector>

#include "primediff/arith.hpp"
#include "primediff/poly.hpp"

namespace primediff {

enum class RootMode { Intersective, PIntersective };

std::string to_string(RootMode mode);
RootMode root_mode_from_string(const std::string& s);

struct SearchLimits {
    // Maximum number of surviving residues at any level of the root tree.
    u64 tree_width = 200'000;
    // Maximum polynomial evaluations per search.
    u64 work = 50'000'000;
};

// A root of h modulo p^precision, with the evidence that it lifts to Z_p.
struct PAdicRoot {
    enum class Basis { None, Hensel, Exact };

    u64 p = 2;
    unsigned precision = 1;
    std::vector<u64> value;  // residues in [0, p^precision)
    std::optional<unsigned> multiplicity;
    bool unit_coords = false;

    Basis basis = Basis::None;
    unsigned gamma = 0;       // Hensel level when basis == Hensel
    std::vector<i64> exact;   // integer root when basis == Exact

    u64 modulus() const;
    bool certified() const { return basis != Basis::None; }

    // Residue vector modulo p^v for v <= precision (or any v for exact roots).
    std::vector<u64> residue(unsigned v) const;

    static PAdicRoot at(u64 p, unsigned precision, std::vector<u64> value);
};

std::string to_string(PAdicRoot::Basis b);

// All x in [0, p^v)^l with h(x) = 0 mod p^v (unit coordinates only when
// unit_only), found level by level from mod p upwards. Sorted lexicographically.
std::vector<std::vector<u64>> roots_mod(const MultiPoly& h, u64 p, unsigned v, bool unit_only,
                                        const SearchLimits& limits = {});

// Lifts of base (a root mod p^from) to roots mod p^to, same tree search.
std::vector<std::vector<u64>> lifts_of(const MultiPoly& h, u64 p, const std::vector<u64>& base,
                                       unsigned from, unsigned to, const SearchLimits& limits = {});

// min_i v_p(dh/dx_i (x)) computed mod p^v; returns v when the gradient vanishes mod p^v.
unsigned gradient_valuation(const MultiPoly& h, std::span<const u64> x, u64 p, unsigned v);

// If some signed representative of x (x_i or x_i - p^v) is an exact integer
// root of h, returns it.
std::optional<std::vector<i64>> exact_root_near(const MultiPoly& h, std::span<const u64> x, u64 p,
                                                unsigned v);

// Lift a root known mod p^(2 gamma - 1) whose gradient has valuation < gamma
// to precision target_v, moving one coordinate one p-digit per step. The
// result agrees with the input mod p^gamma. Throws HypothesisFailed.
PAdicRoot hensel_lift(const MultiPoly& h, const PAdicRoot& root, unsigned target_v, unsigned gamma);

struct MultiplicityResult {
    std::optional<unsigned> value;
    bool certified = false;     // exact or Hensel-backed
    unsigned precision = 0;     // precision the decision was made at
};

// Smallest total order of a partial derivative that is nonzero at the root in
// Z_p. Exact roots use exact arithmetic; otherwise a derivative counts as
// nonzero when its valuation at the representative is below the precision,
// raising precision up to depth_max before giving up.
MultiplicityResult multiplicity(const MultiPoly& h, const PAdicRoot& root, unsigned depth_max = 12,
                                const SearchLimits& limits = {});

struct Certificate {
    enum class Status { Certified, NotIntersective, Unknown };

    u64 p = 2;
    Status status = Status::Unknown;
    unsigned depth = 0;
    std::optional<PAdicRoot> root;
    std::string reason;
};

std::string to_string(Certificate::Status s);

Certificate certify_prime(const MultiPoly& h, RootMode mode, u64 p, unsigned depth_max,
                          const SearchLimits& limits = {});

// One certificate per prime p <= p_max, in increasing p.
std::vector<Certificate> certify(const MultiPoly& h, RootMode mode, u64 p_max, unsigned depth_max,
                                 const SearchLimits& limits = {});

}  // namespace primediff
