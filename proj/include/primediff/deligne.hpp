#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "primediff/arith.hpp"
#include "primediff/padic.hpp"
#include "primediff/poly.hpp"

namespace primediff {

// GF(p^m). Elements are encoded as integers sum c_i p^i, where c_i are the
// coefficients of the residue polynomial modulo the defining polynomial.
class FiniteField {
public:
    FiniteField(u64 p, unsigned m);

    u64 characteristic() const { return p_; }
    unsigned degree() const { return m_; }
    u64 order() const { return q_; }
    // Defining polynomial, coefficients low to high, monic of degree m.
    const std::vector<u64>& modulus() const { return modulus_; }

    u64 add(u64 a, u64 b) const;
    u64 sub(u64 a, u64 b) const;
    u64 mul(u64 a, u64 b) const;

    std::vector<u64> digits(u64 a) const;

private:
    u64 poly_add(u64 a, u64 b, bool subtract) const;
    u64 poly_mul(u64 a, u64 b) const;

    u64 p_;
    unsigned m_;
    u64 q_;
    std::vector<u64> modulus_;
    // Operation tables for small extension fields.
    std::vector<std::uint16_t> add_table_, sub_table_, mul_table_;
};

// Shared instance per (p, m); building the operation tables is not free.
const FiniteField& finite_field(u64 p, unsigned m);

// Lexicographically first monic irreducible polynomial of degree m over F_p,
// ordering candidates by the integer sum c_i p^i of their lower coefficients.
std::vector<u64> first_irreducible(u64 p, unsigned m);
bool is_irreducible_mod(const std::vector<u64>& f, u64 p);

// Evaluates an integer polynomial at points of GF(p^m)^l.
class FieldEvaluator {
public:
    FieldEvaluator(const MultiPoly& h, const FiniteField& field);
    u64 operator()(const std::vector<u64>& x) const;

private:
    struct Term {
        u64 coeff;
        std::vector<unsigned> exps;
    };
    const FiniteField* field_;
    std::size_t nvars_;
    std::vector<unsigned> max_exp_;
    std::vector<Term> terms_;
};

struct FieldPoint {
    u64 p = 2;
    unsigned m = 1;
    std::vector<u64> modulus;
    std::vector<u64> coords;  // encoded field elements
};

struct SmoothVerdict {
    bool smooth = false;        // true means SmoothUpTo(ext_checked)
    unsigned ext_checked = 0;
    std::optional<FieldPoint> witness;
};

inline constexpr u64 kDefaultPointCap = 50'000'000;

// Searches projective points of GF(p^m)^l, m = 1..ext_cap, for a common zero
// of g and its gradient. g must be homogeneous and nonzero mod p.
SmoothVerdict is_smooth_mod(const MultiPoly& g, u64 p, unsigned ext_cap = 2, u64 point_cap = kDefaultPointCap);

// Re-evaluates g and its gradient at a witness.
bool witness_is_singular(const MultiPoly& g, const FieldPoint& w);

struct DeligneVerdict {
    enum class Status { Deligne, ZeroReduction, CharDividesDegree, NotSmooth };
    Status status = Status::ZeroReduction;
    unsigned k = 0;  // degree of h mod p
    SmoothVerdict smooth;

    bool deligne() const { return status == Status::Deligne; }
};

std::string to_string(DeligneVerdict::Status s);

DeligneVerdict is_deligne_mod(const MultiPoly& h, u64 p, unsigned ext_cap = 2, u64 point_cap = kDefaultPointCap);

struct PointCount {
    u64 count = 0;
    double lang_weil_gap = 0.0;  // |count - p^(l-1)| / p^(l - 3/2)
};

PointCount point_count(const MultiPoly& h, u64 p, u64 point_cap = kDefaultPointCap);

enum class CriterionStatus { Satisfied, NotSatisfied, NotEvaluated };
std::string to_string(CriterionStatus s);

struct CriterionResult {
    CriterionStatus status = CriterionStatus::NotEvaluated;
    std::string evidence;
};

struct CriteriaReport {
    unsigned k = 0;
    std::size_t nvars = 0;
    // Preconditions, as sampled evidence.
    std::size_t primes_certified = 0;
    std::vector<u64> primes_not_certified;
    std::optional<u64> deligne_prime;  // a prime where h is Deligne mod p
    CriterionResult criterion_i, criterion_ii, criterion_iii, criterion_iv;
    // For (ii): the sign pair used and primes where both parts were smooth.
    std::optional<std::pair<int, int>> shift;
    std::vector<u64> multiplicity_exceptions;  // (iv) primes with m_p not in {1, k}

    bool any_satisfied() const;
};

struct CriteriaOptions {
    u64 p_max = 50;
    unsigned depth = 6;
    unsigned ext_cap = 2;
    std::vector<u64> sample_primes = {3, 5, 7, 11, 13, 17, 19, 23};
    int factor_search = 6;  // coefficient bound for the linear-factor search
    SearchLimits limits;
};

CriteriaReport p_deligne_criteria(const MultiPoly& h, const CriteriaOptions& opt = {});

// Exact division h / g in Z[x] when g is primitive and divides h.
std::optional<MultiPoly> divide_poly(const MultiPoly& h, const MultiPoly& g);

// A primitive linear factor of h found by bounded coefficient search.
std::optional<MultiPoly> find_linear_factor(const MultiPoly& h, int bound);

}  // namespace primediff
