#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "primediff/error.hpp"
#include "primediff/extremal.hpp"

using namespace primediff;

namespace {

MultiPoly P(const std::string& s, std::size_t n = 1) { return parse_poly(s, n); }

AuxPoly trivial_aux(const MultiPoly& h) { return AuxPoly{1, std::vector<i64>(h.nvars(), 0), 1, h}; }

// Recursive include/exclude over [1, N] without bounds.
u64 naive_D(const std::vector<u64>& X, u64 N) {
    std::vector<u64> chosen;
    u64 best = 0;
    auto rec = [&](auto&& self, u64 i) -> void {
        if (i > N) {
            best = std::max<u64>(best, chosen.size());
            return;
        }
        bool ok = true;
        for (u64 c : chosen) {
            for (u64 x : X) ok = ok && (i - c != x);
        }
        if (ok) {
            chosen.push_back(i);
            self(self, i + 1);
            chosen.pop_back();
        }
        self(self, i + 1);
    };
    rec(rec, 1);
    return best;
}

// |f_A^(alpha)|^2 by direct summation.
double fhat_sq(const std::vector<double>& f, double alpha) {
    std::complex<double> s = 0;
    for (std::size_t x = 0; x < f.size(); ++x) {
        s += f[x] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(x + 1) * alpha);
    }
    return std::norm(s);
}

// Composite Simpson over each arc.
double quadrature_mass(const std::vector<u64>& A, u64 L, u64 q, double gamma, int nodes = 4000) {
    auto f = balanced_function(A, L);
    if (2.0 * gamma * static_cast<double>(q) >= 1.0) {
        gamma = 0.5 / static_cast<double>(q);
    }
    double total = 0;
    for (u64 a = 0; a < q; ++a) {
        double lo = static_cast<double>(a) / static_cast<double>(q) - gamma;
        double h = 2 * gamma / nodes;
        double s = fhat_sq(f, lo) + fhat_sq(f, lo + 2 * gamma);
        for (int i = 1; i < nodes; ++i) s += (i % 2 ? 4 : 2) * fhat_sq(f, lo + i * h);
        total += s * h / 3;
    }
    return total;
}

std::vector<u64> range_set(u64 start, u64 step, u64 stop) {
    std::vector<u64> out;
    for (u64 x = start; x <= stop; x += step) out.push_back(x);
    return out;
}

}  // namespace

TEST_CASE("build_difference_set examples") {
    auto X1 = build_difference_set(trivial_aux(P("x^2-1")), 10, 50);
    CHECK(X1.X == std::vector<u64>{3, 8, 24, 48});
    CHECK(X1.N == 50);
    CHECK(X1.provenance.find("d=1") != std::string::npos);

    auto X2 = build_difference_set_unrestricted(P("x^2"), 5, 11);
    CHECK(X2.X == std::vector<u64>{1, 4, 9});

    auto X3 = build_difference_set(trivial_aux(P("x^2+y^2-2", 2)), 10, 30);
    CHECK(X3.X == std::vector<u64>{6, 11, 16, 27});

    auto choice = RootChoice::certified(P("x^2-1"), RootMode::PIntersective, 20);
    auto X4 = build_difference_set(build_aux(choice, 2), 20, 100);
    for (u64 v : X4.X) {
        bool found = false;
        for (i64 n = 1; n <= 20; ++n) {
            if (in_lambda({-1}, 2, {n}) && 2 * n * n - 2 * n == static_cast<i64>(v)) found = true;
        }
        CHECK(found);
    }
    CHECK_FALSE(X4.X.empty());

    auto m = make_difference_set({5, 0, 3, 3, 12}, 10);
    CHECK(m.X == std::vector<u64>{3, 5});
}

TEST_CASE("max_free_subset examples") {
    auto r = max_free_subset(make_difference_set({1, 4, 9}, 10));
    CHECK(r.size == 4);
    CHECK(r.method == SolveMethod::Exhaustive);
    CHECK(is_difference_free(r.witness, {1, 4, 9}));
    CHECK(r.witness.size() == 4);
    CHECK(is_difference_free({1, 3, 6, 8}, {1, 4, 9}));

    CHECK(max_free_subset(make_difference_set({1}, 10)).size == 5);
    CHECK(max_free_subset(make_difference_set({}, 7)).size == 7);

    auto bb = free_subset_branch_bound(make_difference_set({1, 4, 9}, 10));
    CHECK(bb.size == 4);
    CHECK(bb.method == SolveMethod::BranchAndBound);
    CHECK(is_difference_free(bb.witness, {1, 4, 9}));

    auto g = free_subset_greedy(make_difference_set({1}, 10));
    CHECK(g.method == SolveMethod::GreedyLowerBound);
    CHECK_FALSE(g.exact());
    CHECK(g.witness == std::vector<u64>{1, 3, 5, 7, 9});

    auto capped = free_subset_branch_bound(make_difference_set({1, 4, 9, 16, 25}, 60), 10);
    CHECK(capped.method == SolveMethod::GreedyLowerBound);
    CHECK(is_difference_free(capped.witness, capped.X));
    CHECK(capped.size == capped.witness.size());
}

TEST_CASE("max_free_subset property: three solvers agree") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 80; ++trial) {
        u64 N = 1 + static_cast<u64>(trial % 18);
        std::vector<u64> vals;
        int k = std::uniform_int_distribution<int>(0, 5)(rng);
        for (int i = 0; i < k; ++i) vals.push_back(std::uniform_int_distribution<u64>(1, 20)(rng));
        auto X = make_difference_set(vals, N);
        auto ex = free_subset_exhaustive(X);
        auto bb = free_subset_branch_bound(X);
        CAPTURE(N);
        CAPTURE(trial);
        CHECK(ex.size == naive_D(X.X, N));
        CHECK(bb.size == ex.size);
        CHECK(is_difference_free(ex.witness, X.X));
        CHECK(is_difference_free(bb.witness, X.X));
        CHECK(bb.witness.size() == bb.size);
    }
}

TEST_CASE("max_free_subset property: monotone in N and X") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<u64> vals;
        for (int i = 0; i < 4; ++i) vals.push_back(std::uniform_int_distribution<u64>(1, 30)(rng));
        std::vector<u64> sub(vals.begin(), vals.begin() + 2);
        u64 prev = 0;
        for (u64 N = 1; N <= 40; ++N) {
            u64 D = free_subset_branch_bound(make_difference_set(vals, N)).size;
            u64 Dsub = free_subset_branch_bound(make_difference_set(sub, N)).size;
            CHECK(D <= Dsub);
            if (N > 1) {
                CHECK(prev <= D);
                CHECK(D <= prev + 1);
            }
            prev = D;
        }
    }
}

TEST_CASE("d_table") {
    auto aux = trivial_aux(P("x^2-1"));
    auto rows = d_table(aux, {20, 40, 60, 60}, 10);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].ratio >= rows[1].ratio);
    CHECK(rows[1].ratio >= rows[2].ratio);
    CHECK(rows[2].D == rows[3].D);
    CHECK(rows[2].method == rows[3].method);
    CHECK(rows[0].D == naive_D(build_difference_set(aux, 10, 20).X, 20));

    auto empty = d_table(trivial_aux(P("x^2+5")), {5, 9}, 1);
    for (const auto& r : empty) CHECK(r.ratio == 1.0);
}

TEST_CASE("fourier_mass examples and quadrature oracle") {
    std::vector<u64> A = {2, 3, 5, 7, 11, 13, 17, 19};
    u64 L = 20;
    double delta = 8.0 / 20.0;
    CHECK(fourier_mass(A, L, 1, 0.6) == doctest::Approx(delta * (1 - delta) * L).epsilon(1e-12));
    CHECK(fourier_mass(A, L, 3, 0.2) == doctest::Approx(delta * (1 - delta) * L).epsilon(1e-12));
    CHECK(std::abs(fourier_mass(range_set(1, 1, 20), 20, 2, 0.01)) < 1e-12);

    auto odds = range_set(1, 2, 20);
    double m = fourier_mass(odds, 20, 2, 0.01);
    CHECK(m == doctest::Approx(quadrature_mass(odds, 20, 2, 0.01)).epsilon(1e-8));
    CHECK(m > 0);

    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        u64 LL = 10 + static_cast<u64>(trial * 7);
        std::vector<u64> S;
        for (u64 x = 1; x <= LL; ++x) {
            if (rng() % 3 == 0) S.push_back(x);
        }
        u64 q = 1 + static_cast<u64>(trial % 4);
        double gamma = 0.3 / static_cast<double>(LL);
        CHECK(fourier_mass(S, LL, q, gamma) == doctest::Approx(quadrature_mass(S, LL, q, gamma)).epsilon(1e-7));
    }
}

TEST_CASE("count_identity_check") {
    auto choice = RootChoice::certified(P("x^2-1"), RootMode::PIntersective, 20);
    auto prof = build_profile(choice, 1, 3);

    auto empty = count_identity_check({}, 60, prof, 7);
    CHECK(std::abs(empty.lhs) < 1e-12);
    CHECK(std::abs(empty.rhs) < 1e-9);

    auto full = count_identity_check(range_set(1, 1, 60), 60, prof, 7);
    CHECK(std::abs(full.lhs) < 1e-9);
    CHECK(std::abs(full.rhs) < 1e-9);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 8; ++trial) {
        std::vector<u64> A;
        for (u64 x = 1; x <= 60; ++x) {
            if (rng() % 2) A.push_back(x);
        }
        auto rep = count_identity_check(A, 60, prof, 7);
        CHECK(rep.grid >= 2 * (60 + 48));
        CHECK(rep.within(1e-6));
        // Second direct path over explicit pairs of A and [L].
        auto f = balanced_function(A, 60);
        double direct = 0;
        for (i64 n = 1; n <= 7; ++n) {
            double nu = nu_weight(prof, {n});
            if (nu == 0) continue;
            i64 h = n * n - 1;
            for (i64 x = 1; x + h <= 60; ++x) direct += nu * f[x - 1] * f[x + h - 1];
        }
        CHECK(rep.lhs == doctest::Approx(direct).epsilon(1e-12));
    }

    auto c2 = RootChoice::certified(P("x^2+y^2-2", 2), RootMode::PIntersective, 20);
    auto p2 = build_profile(c2, 1, 5);
    std::vector<u64> A2 = {1, 4, 5, 9, 10, 20, 33, 34, 40};
    CHECK(count_identity_check(A2, 40, p2, 5).within(1e-6));
}

TEST_CASE("increment_step examples") {
    auto odds = range_set(1, 2, 100);
    auto r = increment_step(odds, 100, 2, 0.01);
    CHECK(r.hypothesis_met);
    REQUIRE(r.progression);
    CHECK(r.progression->q == 2);
    CHECK(r.density == 1.0);
    CHECK(r.conclusion_holds);
    CHECK(r.density >= r.target);

    auto threes = range_set(3, 3, 99);
    auto r3 = increment_step(threes, 99, 3, 1.0 / 99);
    CHECK(r3.hypothesis_met);
    REQUIRE(r3.progression);
    CHECK(r3.density == doctest::Approx(1.0));
    CHECK(r3.conclusion_holds);

    std::mt19937_64 rng(1);
    std::vector<u64> rnd;
    for (u64 x = 1; x <= 100; ++x) {
        if (rng() % 2) rnd.push_back(x);
    }
    auto rr = increment_step(rnd, 100, 2, 0.01, 0.5);
    CHECK_FALSE(rr.hypothesis_met);
    CHECK_FALSE(rr.progression);

    CHECK_FALSE(increment_step({}, 50, 2, 0.02).hypothesis_met);
    CHECK_THROWS(increment_step({1, 2}, 50, 2, 0.02, 1.5));
}

TEST_CASE("increment_step property: conclusion on structured sets") {
    std::mt19937_64 rng(77);
    int met = 0;
    for (int trial = 0; trial < 40; ++trial) {
        u64 L = 60 + static_cast<u64>(trial * 11);
        std::vector<char> in(L + 1, 0);
        int k = 1 + trial % 3;
        for (int i = 0; i < k; ++i) {
            u64 step = std::uniform_int_distribution<u64>(2, 6)(rng);
            u64 start = std::uniform_int_distribution<u64>(1, L / 3)(rng);
            u64 stop = std::uniform_int_distribution<u64>(start, L)(rng);
            for (u64 x = start; x <= stop; x += step) in[x] = 1;
        }
        std::vector<u64> A;
        for (u64 x = 1; x <= L; ++x) {
            if (in[x]) A.push_back(x);
        }
        if (A.empty()) continue;
        for (u64 q = 1; q <= 6; ++q) {
            auto rep = increment_step(A, L, q, 1.0 / static_cast<double>(L));
            if (!rep.hypothesis_met) continue;
            ++met;
            CAPTURE(trial);
            CAPTURE(q);
            CHECK(rep.conclusion_holds);
            REQUIRE(rep.progression);
            u64 hits = 0;
            for (u64 a = 1; a <= rep.progression->length; ++a) {
                i64 x = rep.progression->x + static_cast<i64>(a * q);
                REQUIRE(x >= 1);
                REQUIRE(x <= static_cast<i64>(L));
                hits += in[static_cast<u64>(x)];
            }
            CHECK(hits == rep.hits);
        }
    }
    CHECK(met > 20);
}
