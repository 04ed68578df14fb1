#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "primediff/error.hpp"
#include "primediff/poly.hpp"
#include "primediff/poly_json.hpp"
#include "support.hpp"

using namespace primediff;

namespace {

MultiPoly P(const std::string& s, std::size_t n = 1) { return parse_poly(s, n); }

// Direct evaluation from the term map with mpz powers; independent of
// evaluate() and of IntEvaluator.
mpz_class naive_eval(const MultiPoly& h, const std::vector<mpz_class>& x) {
    mpz_class total = 0;
    for (const auto& [e, c] : h.terms()) {
        mpz_class t = c;
        for (std::size_t i = 0; i < e.size(); ++i) {
            for (unsigned k = 0; k < e[i]; ++k) t *= x[i];
        }
        total += t;
    }
    return total;
}

std::vector<mpz_class> to_mpz(const std::vector<i64>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("evaluate examples") {
    i64 a[] = {3, 4};
    CHECK(evaluate(P("x^2+y^2", 2), std::span<const i64>(a)) == 25);
    i64 one[] = {1};
    CHECK(evaluate(P("x^2-1"), std::span<const i64>(one)) == 0);
    i64 three[] = {3};
    CHECK(evaluate(P("2x^2-2x"), std::span<const i64>(three)) == 12);
    i64 bad[] = {1, 2};
    CHECK_THROWS_AS(evaluate(P("x^2-1"), std::span<const i64>(bad)), DimensionMismatch);
}

TEST_CASE("shift_scale examples") {
    i64 r1[] = {1};
    CHECK(shift_scale(P("x^2"), std::span<const i64>(r1), 2) == P("4x^2+4x+1"));
    i64 rm[] = {-1};
    CHECK(shift_scale(P("x^2-1"), std::span<const i64>(rm), 2) == P("4x^2-4x"));
    i64 r0[] = {0, 0};
    CHECK(shift_scale(P("x+y", 2), std::span<const i64>(r0), 1) == P("x+y", 2));
}

TEST_CASE("homogeneous parts, gradient, content") {
    MultiPoly h = P("x^2+x*y+3x+7", 2);
    CHECK(homogeneous_part(h, 2) == P("x^2+x*y", 2));
    CHECK(homogeneous_part(h, 0) == P("7", 2));
    CHECK(homogeneous_part(h, 3).is_zero());

    auto g = gradient(P("x^2+y^2", 2));
    REQUIRE(g.size() == 2);
    CHECK(g[0] == P("2x", 2));
    CHECK(g[1] == P("2y", 2));
    auto g2 = gradient(P("(x+y)^2", 2));
    CHECK(g2[0] == P("2x+2y", 2));
    CHECK(g2[1] == P("2x+2y", 2));
    CHECK(gradient(P("x^2-1"))[0] == P("2x"));

    CHECK(content(P("6x^2+4x+3")) == 2);
    CHECK(content(P("x^2")) == 1);
    CHECK(content(P("10x*y+15y^2", 2)) == 5);
    CHECK(content(P("7")) == 0);
}

TEST_CASE("divide_exact and reduce_mod") {
    CHECK(divide_exact(P("4x^2-4x"), 2) == P("2x^2-2x"));
    CHECK(divide_exact(P("x^2"), 1) == P("x^2"));
    CHECK_THROWS_AS(divide_exact(P("4x^2-4x"), 3), NotDivisible);

    CHECK(reduce_mod(P("4x^2+4x+1"), 2) == P("1"));
    CHECK(reduce_mod(P("2x^2-2x"), 5) == P("2x^2+3x"));
    CHECK(reduce_mod(P("x^2+y^2", 2), 2) == P("x^2+y^2", 2));
}

TEST_CASE("text round trip and canonical ordering") {
    MultiPoly h = P("3*x1^2*x2 - 5*x1 + 7", 2);
    CHECK(to_string(h) == "3*x1^2*x2 - 5*x1 + 7");
    CHECK(P(to_string(h), 2) == h);
    CHECK(to_string(P("-x^2+1")) == "-x1^2 + 1");
    CHECK_THROWS_AS(P("x^"), ParseError);
    CHECK_THROWS_AS(P("x + * y"), ParseError);
}

TEST_CASE("json round trip") {
    MultiPoly h = P("3*x1^2*x2 - 5*x1 + 123456789012345678901234567890", 2);
    auto j = poly_to_json(h);
    CHECK(j["nvars"] == 2);
    CHECK(j["terms"][0]["e"] == nlohmann::json::array({2, 1}));
    CHECK(j["terms"][0]["c"] == "3");
    CHECK(poly_from_json(j) == h);
    CHECK(poly_from_arg(j.dump()) == h);
    CHECK(poly_from_arg("x1^2-1") == P("x^2-1"));
    nlohmann::json bad = {{"nvars", 1}, {"terms", {{{"e", {1}}, {"c", "0"}}}}};
    CHECK_THROWS_AS(poly_from_json(bad), ParseError);
}

TEST_CASE("property: homogeneous parts sum to h") {
    std::mt19937_64 rng(11);
    for (int it = 0; it < 200; ++it) {
        std::size_t n = 1 + it % 3;
        MultiPoly h = testsupport::random_poly(rng, n, 5, 20);
        MultiPoly sum(n);
        for (unsigned i = 0; i <= h.degree().value_or(0); ++i) sum += homogeneous_part(h, i);
        CHECK(sum == h);
    }
}

TEST_CASE("property: shift_scale identity, composition and pointwise value") {
    std::mt19937_64 rng(12);
    for (int it = 0; it < 150; ++it) {
        std::size_t n = 1 + it % 3;
        MultiPoly h = testsupport::random_poly(rng, n, 4, 9);
        std::vector<i64> zero(n, 0);
        CHECK(shift_scale(h, std::span<const i64>(zero), 1) == h);

        auto r = testsupport::random_point(rng, n, -7, 7);
        auto s = testsupport::random_point(rng, n, -7, 7);
        i64 d = 1 + it % 5, e = 1 + (it / 5) % 4;
        std::vector<i64> rs(n);
        for (std::size_t i = 0; i < n; ++i) rs[i] = r[i] + d * s[i];
        MultiPoly lhs = shift_scale(shift_scale(h, std::span<const i64>(r), d), std::span<const i64>(s), e);
        MultiPoly rhs = shift_scale(h, std::span<const i64>(rs), d * e);
        CHECK(lhs == rhs);

        auto x = testsupport::random_point(rng, n, -20, 20);
        std::vector<mpz_class> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = mpz_class(r[i]) + mpz_class(d) * x[i];
        CHECK(naive_eval(shift_scale(h, std::span<const i64>(r), d), to_mpz(x)) == naive_eval(h, y));
    }
}

TEST_CASE("property: evaluate commutes with reduce_mod") {
    std::mt19937_64 rng(13);
    for (int it = 0; it < 300; ++it) {
        std::size_t n = 1 + it % 3;
        MultiPoly h = testsupport::random_poly(rng, n, 5, 1000);
        u64 m = 2 + it % 50;
        auto x = testsupport::random_point(rng, n, -1000, 1000);
        mpz_class full = evaluate(h, std::span<const i64>(x));
        CHECK(full == naive_eval(h, to_mpz(x)));
        std::vector<u64> xr(n);
        for (std::size_t i = 0; i < n; ++i) xr[i] = reduce_signed(x[i], m);
        CHECK(reduce_mpz(full, m) == ModPoly(h, m)(xr));
        std::vector<i64> xs(xr.begin(), xr.end());
        CHECK(reduce_mpz(evaluate(reduce_mod(h, m), std::span<const i64>(xs)), m) == reduce_mpz(full, m));
    }
}

TEST_CASE("property: content scales with |c|") {
    std::mt19937_64 rng(14);
    for (int it = 0; it < 200; ++it) {
        MultiPoly h = testsupport::random_poly(rng, 2, 4, 30);
        if (h.is_constant()) continue;
        long c = static_cast<long>(it % 13) - 6;
        if (c == 0) c = 7;
        CHECK(content(h * mpz_class(c)) == abs(mpz_class(c)) * content(h));
    }
}

TEST_CASE("IntEvaluator agrees with evaluate or reports overflow") {
    std::mt19937_64 rng(15);
    for (int it = 0; it < 200; ++it) {
        MultiPoly h = testsupport::random_poly(rng, 2, 6, 1000);
        IntEvaluator ev(h);
        auto x = testsupport::random_point(rng, 2, -500, 500);
        auto v = ev(x);
        mpz_class exact = evaluate(h, std::span<const i64>(x));
        if (v) {
            mpz_class got;
            __int128 w = *v;
            bool neg = w < 0;
            unsigned __int128 u = neg ? -static_cast<unsigned __int128>(w) : static_cast<unsigned __int128>(w);
            got = mpz_class(static_cast<unsigned long>(u >> 64));
            got <<= 64;
            got += mpz_class(static_cast<unsigned long>(u & ~0UL));
            if (neg) got = -got;
            CHECK(got == exact);
        }
    }
}
