#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "primediff/error.hpp"
#include "primediff/expsum.hpp"
#include "primediff/primes.hpp"
#include "support.hpp"

using namespace primediff;

namespace {

MultiPoly P(const std::string& s, std::size_t n = 1) { return parse_poly(s, n); }

cplx e_of(double t) { return std::polar(1.0, 2.0 * std::numbers::pi * t); }

mpq_class Q(long a, long b) {
    mpq_class v(a, b);
    v.canonicalize();
    return v;
}

// Plain summation with exact integer values and no histogram.
cplx naive_complete(const MultiPoly& g, i64 p) {
    std::size_t n = g.nvars();
    std::vector<i64> x(n, 0);
    cplx sum = 0;
    while (true) {
        mpz_class v = evaluate(g, std::span<const i64>(x));
        mpz_class r;
        mpz_fdiv_r_ui(r.get_mpz_t(), v.get_mpz_t(), static_cast<unsigned long>(p));
        sum += e_of(static_cast<double>(r.get_ui()) / static_cast<double>(p));
        std::size_t i = 0;
        while (i < n) {
            if (++x[i] < p) break;
            x[i] = 0;
            ++i;
        }
        if (i == n) return sum;
    }
}

// G(a, q) term by term from the membership and weight definitions.
cplx naive_G(const SieveProfile& prof, i64 a, i64 q) {
    std::size_t n = prof.nvars();
    std::vector<i64> s(n, 1);
    cplx sum = 0;
    while (true) {
        if (membership_W_dq(prof, s, static_cast<u64>(q))) {
            mpz_class v = evaluate(prof.h_d, std::span<const i64>(s)) * a;
            mpz_class r;
            mpz_fdiv_r_ui(r.get_mpz_t(), v.get_mpz_t(), static_cast<unsigned long>(q));
            sum += w_dq(prof, s, static_cast<u64>(q)).get_d() *
                   e_of(static_cast<double>(r.get_ui()) / static_cast<double>(q));
        }
        std::size_t i = 0;
        while (i < n) {
            if (++s[i] <= q) break;
            s[i] = 1;
            ++i;
        }
        if (i == n) return sum;
    }
}

// Brute force over all ordered 2m-tuples.
u64 naive_energy(const std::vector<mpq_class>& B, unsigned m, const mpq_class& eps) {
    std::size_t N = B.size();
    std::vector<std::size_t> idx(2 * m, 0);
    u64 count = 0;
    while (true) {
        mpq_class t = 0;
        for (unsigned k = 0; k < m; ++k) t += B[idx[k]] - B[idx[m + k]];
        mpz_class fl;
        mpz_fdiv_q(fl.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
        mpq_class frac = t - mpq_class(fl);
        mpq_class dist = frac <= Q(1, 2) ? frac : 1 - frac;
        if (dist <= eps) ++count;
        std::size_t i = 0;
        while (i < idx.size()) {
            if (++idx[i] < N) break;
            idx[i] = 0;
            ++i;
        }
        if (i == idx.size()) return count;
    }
}

SieveProfile profile(const std::string& h, std::size_t n, u64 d, u64 Y) {
    auto choice = RootChoice::certified(P(h, n), RootMode::PIntersective, 30);
    return build_profile(choice, d, Y);
}

}  // namespace

TEST_CASE("complete_sum examples") {
    CHECK(std::abs(complete_sum(P("x^2"), 5)) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
    CHECK(std::abs(complete_sum(P("x"), 7)) < 1e-12);
    CHECK(std::abs(complete_sum(P("x^2+y^2", 2), 5)) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(std::abs(complete_sum(P("0"), 7) - cplx(7, 0)) < 1e-12);
    CHECK_THROWS_AS(complete_sum(P("x^2+y^2+z^2", 3), 101, 1000), SearchCapExceeded);
    CHECK_THROWS(complete_sum(P("x^2"), 9));
}

TEST_CASE("Gauss sum magnitude for odd p <= 200") {
    for (u64 p : primes_up_to(200).primes()) {
        if (p == 2) continue;
        double m = std::abs(complete_sum(P("x^2"), p));
        CAPTURE(p);
        CHECK(std::abs(m - std::sqrt(static_cast<double>(p))) <= 1e-9 * std::sqrt(static_cast<double>(p)));
    }
}

TEST_CASE("complete_sum property: agrees with naive summation and the Deligne bound") {
    std::mt19937_64 rng(4242);
    int deligne_cases = 0;
    for (int trial = 0; trial < 150; ++trial) {
        std::size_t n = 1 + trial % 3;
        u64 p = std::vector<u64>{3, 5, 7, 11, 13}[static_cast<std::size_t>(trial) % 5];
        if (n == 3 && p > 7) p = 7;
        MultiPoly g = testsupport::random_poly(rng, n, 4, 6);
        cplx fast = complete_sum(g, p);
        cplx slow = naive_complete(g, static_cast<i64>(p));
        double scale = std::pow(static_cast<double>(p), static_cast<double>(n));
        CAPTURE(to_string(g));
        CAPTURE(p);
        CHECK(std::abs(fast - slow) <= 1e-9 * scale);
        auto v = is_deligne_mod(g, p);
        if (v.deligne()) {
            ++deligne_cases;
            CHECK(std::abs(fast) <= deligne_bound(v.k, n, p) + 1e-6 * scale);
        }
    }
    CHECK(deligne_cases > 10);
}

TEST_CASE("FreqPoint") {
    auto f = FreqPoint::rational(7, 4);
    CHECK(f.a == 3);
    CHECK(f.q == 4);
    CHECK(FreqPoint::rational(2, 4).q == 2);
    CHECK(FreqPoint::rational(-1, 3).a == 2);
    CHECK(FreqPoint::real(1.25).beta == doctest::Approx(0.25));
    CHECK(FreqPoint::real(0.75).value() == doctest::Approx(0.75));
    auto g = FreqPoint::rational(1, 3);
    g.beta = 0.01;
    auto ng = g.negated();
    CHECK(ng.a == 2);
    CHECK(ng.beta == doctest::Approx(-0.01));
}

TEST_CASE("local_sum_G examples") {
    auto prof = profile("x^2-1", 1, 1, 5);
    // q = 1: one term, no phase.
    LocalSums one(prof, 1);
    CHECK(one.terms() == 1);
    CHECK(std::abs(one.G(0) - cplx(one.total_weight().get_d(), 0)) < 1e-12);
    CHECK(one.total_weight() == prof.w_exact);

    // gamma_1(5) = 1 and 25 = 5^2: Hensel vanishing.
    CHECK(prof.find(5)->gamma == 1);
    CHECK(std::abs(local_sum_G(prof, 1, 25)) < 1e-9 * 25);

    // Y = 2, q = 3: s in {1, 2}, both weights 1, phases e(0) and e(3/3).
    auto p2 = profile("x^2-1", 1, 1, 2);
    cplx g3 = local_sum_G(p2, 1, 3);
    CHECK(std::abs(g3 - cplx(2, 0)) < 1e-12);
    CHECK(std::abs(g3 - naive_G(p2, 1, 3)) < 1e-12);

    CHECK_THROWS(local_sum_G(prof, 5, 25));
}

TEST_CASE("local_sum_G property: histogram path equals term-by-term path") {
    std::mt19937_64 rng(17);
    struct Inst {
        const char* h;
        std::size_t n;
    };
    for (Inst inst : {Inst{"x^2-1", 1}, Inst{"x^3-x", 1}, Inst{"x^2+y^2-2", 2}, Inst{"x*y-1", 2}}) {
        for (u64 d : {1, 2, 6}) {
            auto prof = profile(inst.h, inst.n, d, 7);
            for (int trial = 0; trial < 6; ++trial) {
                i64 q = std::uniform_int_distribution<i64>(1, inst.n == 1 ? 200 : 40)(rng);
                i64 a = std::uniform_int_distribution<i64>(0, q - 1)(rng);
                while (std::gcd(a, q) != 1) a = (a + 1) % q;
                CAPTURE(inst.h);
                CAPTURE(d);
                CAPTURE(q);
                CAPTURE(a);
                double scale = std::pow(static_cast<double>(q), static_cast<double>(inst.n));
                CHECK(std::abs(local_sum_G(prof, a, static_cast<u64>(q)) - naive_G(prof, a, q)) <= 1e-9 * scale);
            }
        }
    }
}

TEST_CASE("local_sum_G property: vanishing when p^(2 gamma) divides q") {
    for (const char* h : {"x^2-1", "x^3-x"}) {
        for (u64 d : {1, 2, 3}) {
            auto prof = profile(h, 1, d, 7);
            for (const auto& sp : prof.primes) {
                u64 base = checked_pow(sp.p, 2 * sp.gamma).value();
                for (u64 mult : {1, 2, 3, 5}) {
                    u64 q = base * mult;
                    if (q > 2000) continue;
                    LocalSums ls(prof, q);
                    for (u64 a = 1; a < q; ++a) {
                        if (std::gcd(a, q) != 1) continue;
                        CAPTURE(h);
                        CAPTURE(d);
                        CAPTURE(q);
                        CAPTURE(a);
                        CHECK(std::abs(ls.G(static_cast<i64>(a))) <= 1e-9 * static_cast<double>(q));
                    }
                }
            }
        }
    }
}

TEST_CASE("S_alpha examples and symmetries") {
    auto prof = profile("x^2-1", 1, 1, 3);
    auto box = nu_box(prof, 50);
    CHECK(box.total > 0);
    double direct = 0;
    for (i64 n = 1; n <= 50; ++n) direct += nu_weight(prof, {n});
    CHECK(box.total == doctest::Approx(direct).epsilon(1e-12));

    cplx s0 = S_alpha(box, FreqPoint{});
    CHECK(std::abs(s0 - cplx(box.total, 0)) < 1e-9);
    CHECK(std::abs(S_alpha(box, FreqPoint::real(1.0)) - s0) < 1e-9);
    // n = 2 is gradient-bad at 2, every other admissible n is an odd prime: n^2 - 1 even.
    CHECK(std::abs(S_alpha(box, FreqPoint::rational(1, 2)) - s0) < 1e-9);
    CHECK(std::abs(S_alpha(prof, 50, FreqPoint::rational(1, 2)) - s0) < 1e-9);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    auto p2 = profile("x^2+y^2-2", 2, 1, 5);
    auto b2 = nu_box(p2, 30);
    for (int trial = 0; trial < 20; ++trial) {
        FreqPoint f = FreqPoint::rational(trial, 7);
        f.beta = U(rng) * 1e-3;
        cplx s = S_alpha(b2, f);
        CHECK(std::abs(S_alpha(b2, f.negated()) - std::conj(s)) < 1e-9 * b2.total);
        FreqPoint shifted = FreqPoint::real(f.value() + 1.0);
        CHECK(std::abs(S_alpha(b2, shifted) - s) < 1e-7 * b2.total);
        CHECK(std::abs(s) <= b2.total * (1 + 1e-12));
        // Independent evaluation with plain complex exponentials.
        cplx naive = 0;
        for (std::size_t k = 0; k < b2.points.size(); ++k) {
            naive += b2.nu[k] * e_of(b2.h[k].get_d() * f.value());
        }
        CHECK(std::abs(naive - s) < 1e-8 * b2.total);
    }
}

TEST_CASE("arc_classify examples") {
    auto a = arc_classify(1.0 / 3.0, {0.01, 5});
    CHECK(a.major);
    CHECK(a.a == 1);
    CHECK(a.q == 3);
    CHECK_FALSE(arc_classify(0.41421356, {1e-6, 10}).major);
    auto z = arc_classify(0.0, {1e-9, 1});
    CHECK(z.major);
    CHECK(z.a == 0);
    CHECK(z.q == 1);
    auto wrap = arc_classify(0.9999, {0.001, 3});
    CHECK(wrap.major);
    CHECK(wrap.q == 1);
    // Overlapping arcs: smallest q wins.
    auto ov = arc_classify(0.49, {0.2, 3});
    CHECK(ov.q == 2);
    CHECK(ov.covering >= 2);
}

TEST_CASE("arc_classify property: disjoint arcs and brute-force centers") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 400; ++trial) {
        u64 Q = 1 + static_cast<u64>(trial % 12);
        double gamma = (trial % 2 == 0) ? 0.49 / static_cast<double>(2 * Q * Q) : U(rng) * 0.2 + 1e-4;
        ArcPartition arcs{gamma, Q};
        double alpha = U(rng);
        auto got = arc_classify(alpha, arcs);
        unsigned covering = 0;
        std::optional<std::pair<u64, u64>> first;
        for (u64 q = 1; q <= Q; ++q) {
            for (u64 a = 0; a < q; ++a) {
                if (std::gcd(a, q) != 1) continue;
                double dl = std::abs(alpha - static_cast<double>(a) / static_cast<double>(q));
                dl = std::min(dl, 1.0 - dl);
                if (dl < gamma) {
                    ++covering;
                    if (!first) first = std::pair{q, a};
                }
            }
        }
        CHECK(got.covering == covering);
        CHECK(got.major == first.has_value());
        if (first) {
            CHECK(got.q == first->first);
            CHECK(static_cast<u64>(got.a) == first->second);
        }
        if (arcs.disjoint()) CHECK(got.covering <= 1);
    }
}

TEST_CASE("minor_arc_measure") {
    auto prof = profile("x^2-1", 1, 1, 3);
    auto box = nu_box(prof, 200);
    auto rep = minor_arc_measure(box, {0.002, 4}, 200);
    CHECK(rep.samples == 200);
    CHECK(rep.minor_samples > 0);
    CHECK(rep.minor_samples < 200);
    CHECK(rep.max_ratio <= 1.0);
    CHECK(rep.max_ratio > 0.0);
    CHECK_FALSE(arc_classify(rep.argmax, {0.002, 4}).major);
}

TEST_CASE("additive_energy examples") {
    CHECK(additive_energy({Q(0, 1), Q(1, 2)}, 1) == 2);
    CHECK(additive_energy({Q(1, 3), Q(2, 3)}, 2) == 6);
    CHECK(additive_energy({Q(1, 5), Q(2, 7), Q(3, 11)}, 1) == 3);
    CHECK(additive_energy({Q(4, 3), Q(1, 3)}, 1) == 4);  // equal mod 1
    CHECK(additive_energy({}, 2) == 0);
    CHECK(additive_energy({Q(1, 2)}, 3) == 1);
    CHECK(additive_energy({Q(0, 1), Q(1, 10)}, 1, Q(1, 10)) == 4);
    CHECK(additive_energy({Q(0, 1), Q(1, 10)}, 1, Q(1, 11)) == 2);
    CHECK_THROWS_AS(additive_energy(farey_fractions(30), 3, 0, 1000), SearchCapExceeded);
}

TEST_CASE("additive_energy property: brute force, eps monotonicity") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t N = 1 + static_cast<std::size_t>(trial % 6);
        unsigned m = 1 + static_cast<unsigned>(trial % 3);
        if (m == 3 && N > 4) N = 4;
        std::vector<mpq_class> B;
        for (std::size_t i = 0; i < N; ++i) {
            long q = std::uniform_int_distribution<long>(1, 12)(rng);
            long a = std::uniform_int_distribution<long>(-q, 2 * q)(rng);
            B.push_back(Q(a, q));
        }
        u64 prev = 0;
        for (const auto& eps : {Q(0, 1), Q(1, 60), Q(1, 13), Q(1, 5), Q(1, 2)}) {
            u64 got = additive_energy(B, m, eps);
            CAPTURE(trial);
            CHECK(got == naive_energy(B, m, eps));
            CHECK(got >= prev);
            prev = got;
        }
        CHECK(additive_energy(B, m, 0) == additive_energy(B, m));
        CHECK(additive_energy(B, 1) >= N);
    }
}

TEST_CASE("bme_bound_check") {
    auto B = farey_fractions(4);
    CHECK(B.size() == 1 + 1 + 2 + 2);
    auto rep = bme_bound_check(B, 2, 4, 2);
    CHECK(rep.hypothesis_ok);
    CHECK(rep.energy == naive_energy(B, 2, 0));
    CHECK(rep.base == doctest::Approx(64.0));
    CHECK(rep.holds);

    auto single = bme_bound_check({Q(1, 3)}, 2, 4, 1);
    CHECK(single.energy == 1);
    CHECK(single.holds);

    std::vector<mpq_class> sevenths;
    for (long a = 1; a < 7; ++a) sevenths.push_back(Q(a, 7));
    auto r7 = bme_bound_check(sevenths, 2, 7, 6);
    CHECK(r7.energy == naive_energy(sevenths, 2, 0));
    CHECK(static_cast<double>(r7.energy) <= r7.base);
    CHECK(r7.holds);

    CHECK_FALSE(bme_bound_check(farey_fractions(6), 2, 5, 10).hypothesis_ok);
    CHECK_FALSE(bme_bound_check(farey_fractions(6), 2, 6, 1).hypothesis_ok);
}
