#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "primediff/error.hpp"
#include "primediff/primes.hpp"

using namespace primediff;

namespace {

bool trial_prime(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("primes_up_to examples") {
    CHECK(primes_up_to(10).primes() == std::vector<u64>{2, 3, 5, 7});
    CHECK(primes_up_to(1).primes().empty());
    CHECK(primes_up_to(30).primes() == std::vector<u64>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
    CHECK_THROWS_AS(primes_up_to(1000, 999), SearchCapExceeded);
}

TEST_CASE("sieve completeness against trial division") {
    auto t = primes_up_to(600'000);
    std::vector<u64> expect;
    for (u64 n = 0; n <= 600'000; ++n) {
        if (trial_prime(n)) expect.push_back(n);
    }
    CHECK(t.primes() == expect);
    for (u64 n : {u64{4194301}, u64{4194304}, u64{4194319}, u64{1'000'000'007}, u64{1'000'000'007} * 3}) {
        CHECK(is_prime(n) == trial_prime(n));
    }
}

TEST_CASE("psi examples") {
    CHECK(psi(10, 1, 1).value == doctest::Approx(std::log(2) + std::log(3) + std::log(5) + std::log(7)));
    CHECK(psi(10, 1, 1).value == doctest::Approx(5.3471).epsilon(1e-4));
    CHECK(psi(20, 1, 4).value == doctest::Approx(std::log(5) + std::log(13) + std::log(17)));
    CHECK(psi(20, 1, 4).count == 3);
    CHECK(psi(10, 0, 2).value == doctest::Approx(std::log(2)));
    CHECK(psi(1, 0, 1).value == 0.0);
}

TEST_CASE("psi_weighted examples") {
    MultiPoly one = parse_poly("1");
    CHECK(psi_weighted(10, 1, 1, one).value == psi(10, 1, 1).value);
    double expect = 2 * (2 * std::log(2) + 3 * std::log(3) + 5 * std::log(5) + 7 * std::log(7));
    CHECK(psi_weighted(10, 1, 1, parse_poly("2x")).value == doctest::Approx(expect).epsilon(1e-12));
    CHECK(psi_weighted(10, 1, 1, parse_poly("2x")).value == doctest::Approx(52.70).epsilon(1e-3));
    CHECK(psi_weighted(5, 2, 3, parse_poly("x")).value == doctest::Approx(2 * std::log(2) + 5 * std::log(5)));
    CHECK_THROWS_AS(psi_weighted(5, 2, 3, parse_poly("x*y", 2)), DimensionMismatch);
}

TEST_CASE("psi residue partition and step behaviour") {
    for (u64 q = 1; q <= 15; ++q) {
        for (double x : {97.0, 1000.5, 5000.0}) {
            double total = 0;
            std::size_t count = 0;
            for (u64 a = 0; a < q; ++a) {
                total += psi(x, static_cast<i64>(a), q).value;
                count += psi(x, static_cast<i64>(a), q).count;
            }
            CHECK(count == psi(x, 0, 1).count);
            CHECK(total == doctest::Approx(psi(x, 0, 1).value).epsilon(1e-12));
            CHECK(psi(x, 1, q).value == psi(std::floor(x), 1, q).value);
        }
    }
    double prev = 0;
    for (double x = 0; x < 300; x += 0.5) {
        double v = psi(x, 1, 4).value;
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("PsiIndex matches psi bit for bit") {
    auto table = primes_up_to(20000);
    for (u64 q : {1, 4, 7, 12}) {
        PsiIndex idx(table, q);
        for (double x : {0.0, 2.0, 2.5, 100.0, 19999.0, 20000.0}) {
            for (i64 a = -3; a < static_cast<i64>(q); ++a) {
                CHECK(idx(x, a).value == psi(x, a, q).value);
                CHECK(idx(x, a).count == psi(x, a, q).count);
            }
        }
        CHECK_THROWS_AS(idx(20001, 1), SearchCapExceeded);
    }
}

TEST_CASE("main term hook") {
    CHECK(psi_main_term(100, 1, 4).real() == doctest::Approx(50));
    ExceptionalCharacter chi{4, 0.75, {{0, 0}, {1, 0}, {0, 0}, {-1, 0}}};
    auto m = psi_main_term(100, 1, 4, chi);
    CHECK(m.real() == doctest::Approx(50 - std::pow(100, 0.75) / (2 * 0.75)));
    CHECK(psi_main_term(100, 1, 5, chi).real() == doctest::Approx(25));
}
