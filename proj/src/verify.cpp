#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "primediff/cli.hpp"
#include "primediff/error.hpp"
#include "primediff/extremal.hpp"
#include "primediff/primes.hpp"

namespace primediff {

namespace {

template <typename F>
CheckResult run_check(const std::string& name, F&& body) {
    CheckResult r{name, false, ""};
    try {
        std::ostringstream detail;
        r.pass = body(detail);
        r.detail = detail.str();
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
    }
    return r;
}

}  // namespace

std::vector<CheckResult> run_invariant_suite(const RunConfig& c) {
    std::vector<CheckResult> out;
    const double slack = c.float_slack;
    SearchLimits limits{c.tree_width, c.work};

    out.push_back(run_check("gauss_sum_magnitude", [&](std::ostream& os) {
        double worst = 0;
        for (u64 p : primes_up_to(200).primes()) {
            if (p == 2) continue;
            double s = std::sqrt(static_cast<double>(p));
            worst = std::max(worst, std::abs(std::abs(complete_sum(parse_poly("x^2"), p, c.point_cap)) - s) / s);
        }
        os << "max relative error " << worst;
        return worst <= slack;
    }));

    out.push_back(run_check("classification_regressions", [&](std::ostream& os) {
        auto certs = certify(parse_poly("x^2-1"), RootMode::PIntersective, 100, c.depth, limits);
        std::size_t ok = 0;
        for (const auto& ct : certs) ok += ct.status == Certificate::Status::Certified;
        auto sq = certify_prime(parse_poly("x^2"), RootMode::PIntersective, 2, c.depth, limits);
        os << ok << "/" << certs.size() << " primes certified for x^2-1; x^2 at 2: " << to_string(sq.status);
        return ok == certs.size() && sq.status == Certificate::Status::NotIntersective;
    }));

    out.push_back(run_check("aux_identities", [&](std::ostream& os) {
        auto choice = RootChoice::certified(parse_poly("x^2-1"), RootMode::PIntersective, 100, c.depth, limits);
        std::size_t bad = 0, checked = 0;
        for (u64 d = 1; d <= 40; ++d) {
            auto ad = build_aux(choice, d);
            for (u64 q = 1; q <= 6; ++q) {
                auto aqd = build_aux(choice, q * d);
                ++checked;
                i64 diff = aqd.r[0] - ad.r[0];
                if (diff % static_cast<i64>(d) != 0) {
                    ++bad;
                    continue;
                }
                std::vector<i64> s{diff / static_cast<i64>(d)};
                mpz_class lq = compute_lambda(choice, q);
                if (aqd.lambda != lq * ad.lambda) ++bad;
                if (lq * aqd.h_d != shift_scale(ad.h_d, std::span<const i64>(s), static_cast<i64>(q))) ++bad;
            }
        }
        os << bad << " violations over " << checked << " (q, d) pairs";
        return bad == 0;
    }));

    out.push_back(run_check("sieve_sandwich", [&](std::ostream& os) {
        auto choice = RootChoice::certified(parse_poly("x^2+y^2-2"), RootMode::PIntersective, 10, c.depth, limits);
        auto prof = build_profile(choice, 1, 5, GammaOptions{std::nullopt, c.class_cap});
        auto rep = sieve_sum_sandwich(prof, 40, {0, 1, 2, 3});
        os << rep.violations << " violations, true sum " << rep.true_sum;
        return rep.violations == 0 && rep.truncations.back().exact;
    }));

    out.push_back(run_check("hensel_vanishing", [&](std::ostream& os) {
        auto choice = RootChoice::certified(parse_poly("x^2-1"), RootMode::PIntersective, 10, c.depth, limits);
        auto prof = build_profile(choice, 1, 7, GammaOptions{std::nullopt, c.class_cap});
        double worst = 0;
        for (u64 p : {3, 5, 7}) {
            u64 q = checked_pow(p, 2 * prof.find(p)->gamma).value();
            LocalSums ls(prof, q, c.point_cap);
            for (u64 a = 1; a < q; ++a) {
                if (std::gcd(a, q) == 1) worst = std::max(worst, std::abs(ls.G(static_cast<i64>(a))) / static_cast<double>(q));
            }
        }
        os << "max |G|/q " << worst;
        return worst <= slack;
    }));

    out.push_back(run_check("extremal_oracles", [&](std::ostream& os) {
        std::size_t bad = 0;
        for (u64 N = 1; N <= 16; ++N) {
            auto X = make_difference_set({1, 4, 9}, N);
            if (free_subset_exhaustive(X).size != free_subset_branch_bound(X, c.node_cap).size) ++bad;
        }
        u64 d10 = max_free_subset(make_difference_set({1, 4, 9}, 10), c.node_cap).size;
        os << "D({1,4,9},10) = " << d10 << ", " << bad << " solver disagreements";
        return bad == 0 && d10 == 4;
    }));

    out.push_back(run_check("additive_energy", [&](std::ostream& os) {
        mpq_class a(1, 3), b(2, 3);
        u64 e = additive_energy({a, b}, 2);
        os << "E4({1/3,2/3}) = " << e;
        return e == 6;
    }));

    out.push_back(run_check("psi_consistency", [&](std::ostream& os) {
        auto table = primes_up_to(20000);
        double worst = 0;
        for (u64 q = 1; q <= 12; ++q) {
            PsiIndex idx(table, q);
            for (u64 a = 0; a < q; ++a) {
                for (double x : {10.0, 999.0, 20000.0}) {
                    auto direct = psi(x, static_cast<i64>(a), q);
                    auto fast = idx(x, static_cast<i64>(a));
                    if (direct.count != fast.count) return false;
                    worst = std::max(worst, std::abs(direct.value - fast.value));
                }
            }
        }
        os << "max difference " << worst;
        return worst == 0.0;
    }));

    out.push_back(run_check("count_identity", [&](std::ostream& os) {
        auto choice = RootChoice::certified(parse_poly("x^2-1"), RootMode::PIntersective, 10, c.depth, limits);
        auto prof = build_profile(choice, 1, 3, GammaOptions{std::nullopt, c.class_cap});
        std::mt19937_64 rng(c.seed);
        std::vector<u64> A;
        for (u64 x = 1; x <= 60; ++x) {
            if (rng() % 2) A.push_back(x);
        }
        auto rep = count_identity_check(A, 60, prof, 7);
        os << "|lhs - rhs| = " << rep.diff << ", scale " << rep.scale;
        return rep.within(1e-6);
    }));

    return out;
}

}  // namespace primediff
