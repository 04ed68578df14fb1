#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "primediff/arith.hpp"

namespace primediff {

using Exponent = std::vector<unsigned>;

unsigned total_degree(const Exponent& e);

// Graded lexicographic order: total degree first, ties broken lexicographically
// with x1 most significant.
struct GrlexLess {
    bool operator()(const Exponent& a, const Exponent& b) const;
};

// Sparse multivariate polynomial over Z. Terms are stored in ascending grlex
// order; no zero coefficients are ever stored.
class MultiPoly {
public:
    using TermMap = std::map<Exponent, mpz_class, GrlexLess>;

    explicit MultiPoly(std::size_t nvars = 1);

    static MultiPoly constant(std::size_t nvars, const mpz_class& c);
    static MultiPoly variable(std::size_t nvars, std::size_t index);
    static MultiPoly monomial(Exponent e, const mpz_class& c);

    std::size_t nvars() const { return nvars_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    // Max total degree; nullopt for the zero polynomial.
    std::optional<unsigned> degree() const;
    // Min total degree over stored terms; nullopt for zero.
    std::optional<unsigned> low_degree() const;
    unsigned degree_in(std::size_t var) const;

    mpz_class coefficient(const Exponent& e) const;
    bool is_constant() const;

    void add_term(const Exponent& e, const mpz_class& c);

    MultiPoly& operator+=(const MultiPoly& o);
    MultiPoly& operator-=(const MultiPoly& o);
    MultiPoly& operator*=(const mpz_class& c);

    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
    friend MultiPoly operator*(MultiPoly a, const mpz_class& c) { return a *= c; }
    friend MultiPoly operator*(const mpz_class& c, MultiPoly a) { return a *= c; }
    MultiPoly operator-() const;

    friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }

private:
    void check_same_dim(const MultiPoly& o) const;

    std::size_t nvars_;
    TermMap terms_;
};

MultiPoly pow(const MultiPoly& base, unsigned exp);

mpz_class evaluate(const MultiPoly& h, std::span<const mpz_class> x);
mpz_class evaluate(const MultiPoly& h, std::span<const i64> x);

// g(x) = h(r + d*x), expanded exactly by substituting one variable at a time.
MultiPoly shift_scale(const MultiPoly& h, std::span<const mpz_class> r, const mpz_class& d);
MultiPoly shift_scale(const MultiPoly& h, std::span<const i64> r, i64 d);

MultiPoly homogeneous_part(const MultiPoly& h, unsigned i);
bool is_homogeneous(const MultiPoly& h);

MultiPoly partial(const MultiPoly& h, std::size_t var);
std::vector<MultiPoly> gradient(const MultiPoly& h);

// gcd of the coefficients of nonconstant terms; 0 when there are none.
mpz_class content(const MultiPoly& h);

// Throws NotDivisible if some coefficient is not a multiple of m.
MultiPoly divide_exact(const MultiPoly& h, const mpz_class& m);

// Coefficients reduced into [0, m), zero terms dropped.
MultiPoly reduce_mod(const MultiPoly& h, const mpz_class& m);

// Sum of absolute values of all coefficients.
mpz_class coefficient_norm(const MultiPoly& h);

// Text form, e.g. "3*x1^2*x2 - 5*x1 + 7", terms in descending grlex order.
std::string to_string(const MultiPoly& h);

// Parses the shorthand grammar: integers, x1..xN (x, y, z, w alias x1..x4),
// + - * ^, parentheses, implicit multiplication. nvars is at least min_nvars.
MultiPoly parse_poly(const std::string& text, std::size_t min_nvars = 1);

// Residue-level evaluator: coefficients reduced mod m once, evaluation at
// residue vectors in [0, m).
class ModPoly {
public:
    ModPoly(const MultiPoly& h, u64 modulus);

    u64 modulus() const { return modulus_; }
    std::size_t nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    u64 operator()(std::span<const u64> x) const;

private:
    struct Term {
        u64 coeff;
        std::vector<unsigned> exps;
    };
    u64 modulus_;
    std::size_t nvars_;
    std::vector<unsigned> max_exp_;
    std::vector<Term> terms_;
};

// Exact evaluator over small integers using 128-bit arithmetic; returns nullopt
// on overflow so callers can fall back to evaluate().
class IntEvaluator {
public:
    explicit IntEvaluator(const MultiPoly& h);

    std::optional<i128> operator()(std::span<const i64> x) const;
    const MultiPoly& poly() const { return poly_; }

private:
    struct Term {
        i128 coeff;
        std::vector<unsigned> exps;
    };
    MultiPoly poly_;
    bool fits_ = true;
    std::vector<Term> terms_;
};

}  // namespace primediff
