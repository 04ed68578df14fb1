#include "primediff/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "primediff/error.hpp"

namespace primediff {

namespace {

u64 box_size(u64 side, std::size_t n, u64 cap, const char* what) {
    u64 total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (side != 0 && total > cap / side) throw SearchCapExceeded(std::string(what) + " exceeds point cap");
        total *= side;
    }
    if (total > cap) throw SearchCapExceeded(std::string(what) + " exceeds point cap");
    return total;
}

u64 reduce_mpz_u64(const mpz_class& v, u64 m) {
    mpz_class r;
    mpz_fdiv_r_ui(r.get_mpz_t(), v.get_mpz_t(), m);
    return r.get_ui();
}

}  // namespace

cplx complete_sum(const MultiPoly& g, u64 p, u64 point_cap) {
    if (!is_prime_u64(p)) throw Error("complete_sum requires a prime");
    std::size_t n = g.nvars();
    box_size(p, n, point_cap, "F_p^l");
    ModPoly gm(g, p);
    std::vector<u64> hist(p, 0);
    std::vector<u64> x(n, 0);
    while (true) {
        ++hist[gm(x)];
        std::size_t i = 0;
        while (i < n) {
            if (++x[i] < p) break;
            x[i] = 0;
            ++i;
        }
        if (i == n) break;
    }
    CompensatedSum<cplx> sum;
    for (u64 r = 0; r < p; ++r) {
        if (hist[r]) sum.add(static_cast<double>(hist[r]) * unit_phase_exact(r, p));
    }
    return sum.value();
}

double deligne_bound(unsigned k, std::size_t l, u64 p) {
    double base = k >= 1 ? static_cast<double>(k - 1) : 0.0;
    return std::pow(base, static_cast<double>(l)) * std::pow(static_cast<double>(p), static_cast<double>(l) / 2.0);
}

FreqPoint FreqPoint::rational(i64 a, u64 q) {
    if (q == 0) throw Error("denominator must be positive");
    i64 qa = static_cast<i64>(q);
    i64 r = ((a % qa) + qa) % qa;
    u64 g = std::gcd(static_cast<u64>(r), q);
    FreqPoint f;
    f.a = r / static_cast<i64>(g);
    f.q = q / g;
    return f;
}

FreqPoint FreqPoint::real(double alpha) {
    FreqPoint f;
    f.beta = alpha - std::round(alpha);
    return f;
}

double FreqPoint::value() const {
    double v = static_cast<double>(a) / static_cast<double>(q) + beta;
    v -= std::floor(v);
    return v;
}

FreqPoint FreqPoint::negated() const {
    FreqPoint f = rational(-a, q);
    f.beta = -beta;
    return f;
}

LocalSums::LocalSums(const SieveProfile& prof, u64 q, u64 point_cap) : q_(q) {
    if (q == 0) throw Error("q must be positive");
    std::size_t n = prof.nvars();
    box_size(q, n, point_cap, "[q]^l");

    // Coordinate condition ((r_d)_i + d s_i, q) = 1, tabulated for s in [q].
    std::vector<std::vector<char>> coprime(n, std::vector<char>(q + 1, 0));
    for (std::size_t i = 0; i < n; ++i) {
        for (u64 s = 1; s <= q; ++s) {
            i128 v = static_cast<i128>(prof.r[i]) + static_cast<i128>(prof.d) * static_cast<i128>(s);
            u64 red = static_cast<u64>(((v % static_cast<i128>(q)) + q) % q);
            coprime[i][s] = std::gcd(red, q) == 1;
        }
    }

    // Primes whose gradient condition is imposed, and the modulus P that determines w_{d,q}(s).
    std::vector<std::pair<u64, std::vector<ModPoly>>> checks;
    u64 P = 1;
    for (const auto& sp : prof.primes) {
        u64 pg = checked_pow(sp.p, sp.gamma).value();
        if (q % pg == 0) {
            std::vector<ModPoly> g;
            for (const auto& gi : gradient(prof.h_d)) g.emplace_back(gi, pg);
            checks.emplace_back(pg, std::move(g));
        } else if (q % sp.p == 0) {
            u64 t = q;
            while (t % sp.p == 0) {
                t /= sp.p;
                P *= sp.p;
            }
        }
    }

    ModPoly hq(prof.h_d, q);
    std::map<std::vector<u64>, std::size_t> class_of_key;
    std::map<mpq_class, std::size_t> class_of_value;
    std::vector<mpq_class> class_weight;
    std::vector<std::vector<u64>> counts;

    std::vector<u64> s(n, 1), red(n), key(n);
    while (true) {
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) ok = coprime[i][s[i]];
        for (std::size_t c = 0; c < checks.size() && ok; ++c) {
            u64 pg = checks[c].first;
            for (std::size_t i = 0; i < n; ++i) red[i] = s[i] % pg;
            bool all_zero = true;
            for (const auto& g : checks[c].second) all_zero = all_zero && g(red) == 0;
            ok = !all_zero;
        }
        if (ok) {
            ++terms_;
            for (std::size_t i = 0; i < n; ++i) key[i] = s[i] % P;
            auto it = class_of_key.find(key);
            if (it == class_of_key.end()) {
                std::vector<i64> si(s.begin(), s.end());
                mpq_class w = w_dq(prof, si, q);
                auto [vit, inserted] = class_of_value.emplace(w, class_weight.size());
                if (inserted) {
                    class_weight.push_back(w);
                    counts.emplace_back(q, 0);
                }
                it = class_of_key.emplace(key, vit->second).first;
            }
            for (std::size_t i = 0; i < n; ++i) red[i] = s[i] % q;
            ++counts[it->second][hq(red)];
        }
        std::size_t i = 0;
        while (i < n) {
            if (++s[i] <= q) break;
            s[i] = 1;
            ++i;
        }
        if (i == n) break;
    }

    weight_.assign(q, 0.0);
    for (u64 r = 0; r < q; ++r) {
        mpq_class acc = 0;
        for (std::size_t c = 0; c < class_weight.size(); ++c) {
            if (counts[c][r]) acc += class_weight[c] * mpz_class(static_cast<unsigned long>(counts[c][r]));
        }
        total_ += acc;
        weight_[r] = acc.get_d();
    }
}

cplx LocalSums::G(i64 a) const {
    i64 qa = static_cast<i64>(q_);
    u64 ar = static_cast<u64>(((a % qa) + qa) % qa);
    if (std::gcd(ar, q_) != 1) throw Error("a must be coprime to q");
    CompensatedSum<cplx> sum;
    for (u64 r = 0; r < q_; ++r) {
        if (weight_[r] != 0.0) sum.add(weight_[r] * unit_phase_exact(mul_mod(ar, r, q_), q_));
    }
    return sum.value();
}

cplx local_sum_G(const SieveProfile& prof, i64 a, u64 q, u64 point_cap) {
    return LocalSums(prof, q, point_cap).G(a);
}

NuBox nu_box(const SieveProfile& prof, i64 M, u64 point_cap) {
    NuBox box;
    box.M = M;
    if (M < 1) return box;
    std::size_t n = prof.nvars();
    box_size(static_cast<u64>(M), n, point_cap, "[M]^l");
    std::vector<i64> x(n, 1);
    CompensatedSum<double> total;
    while (true) {
        double w = nu_weight(prof, x);
        if (w != 0.0) {
            box.points.push_back(x);
            box.nu.push_back(w);
            box.h.push_back(evaluate(prof.h_d, std::span<const i64>(x)));
            total.add(w);
        }
        std::size_t i = n;
        while (i-- > 0) {
            if (++x[i] <= M) break;
            x[i] = 1;
        }
        if (i == static_cast<std::size_t>(-1)) break;
    }
    box.total = total.value();
    return box;
}

cplx S_alpha(const NuBox& box, const FreqPoint& alpha) {
    u64 q = alpha.q;
    i64 qa = static_cast<i64>(q);
    u64 a = static_cast<u64>(((alpha.a % qa) + qa) % qa);
    CompensatedSum<cplx> sum;
    for (std::size_t k = 0; k < box.points.size(); ++k) {
        cplx phase = unit_phase_exact(mul_mod(reduce_mpz_u64(box.h[k], q), a, q), q);
        if (alpha.beta != 0.0) {
            double hb = box.h[k].get_d() * alpha.beta;
            phase *= unit_phase(hb - std::floor(hb));
        }
        sum.add(box.nu[k] * phase);
    }
    return sum.value();
}

cplx S_alpha(const SieveProfile& prof, i64 M, const FreqPoint& alpha) { return S_alpha(nu_box(prof, M), alpha); }

ArcClass arc_classify(double alpha, const ArcPartition& arcs) {
    if (arcs.Q == 0 || !(arcs.gamma > 0.0)) throw Error("arc partition needs Q >= 1 and gamma > 0");
    double x = alpha - std::floor(alpha);
    ArcClass out;
    for (u64 q = 1; q <= arcs.Q; ++q) {
        double qd = static_cast<double>(q);
        i64 lo = static_cast<i64>(std::floor(qd * (x - arcs.gamma)));
        i64 hi = static_cast<i64>(std::ceil(qd * (x + arcs.gamma)));
        if (hi - lo + 1 > static_cast<i64>(q)) {
            lo = 0;
            hi = static_cast<i64>(q) - 1;
        }
        std::vector<i64> found;
        for (i64 t = lo; t <= hi; ++t) {
            i64 a = ((t % static_cast<i64>(q)) + static_cast<i64>(q)) % static_cast<i64>(q);
            if (std::gcd(static_cast<u64>(a), q) != 1) continue;
            double delta = x - static_cast<double>(a) / qd;
            delta -= std::round(delta);
            if (std::abs(delta) < arcs.gamma) found.push_back(a);
        }
        std::sort(found.begin(), found.end());
        found.erase(std::unique(found.begin(), found.end()), found.end());
        out.covering += static_cast<unsigned>(found.size());
        if (!out.major && !found.empty()) {
            out.major = true;
            out.a = found.front();
            out.q = q;
        }
    }
    return out;
}

MinorArcReport minor_arc_measure(const NuBox& box, const ArcPartition& arcs, std::size_t samples) {
    MinorArcReport rep;
    rep.samples = samples;
    if (box.total <= 0.0) return rep;
    for (std::size_t k = 0; k < samples; ++k) {
        double alpha = (static_cast<double>(k) + 0.5) / static_cast<double>(samples);
        if (arc_classify(alpha, arcs).major) continue;
        ++rep.minor_samples;
        double ratio = std::abs(S_alpha(box, FreqPoint::real(alpha))) / box.total;
        if (ratio > rep.max_ratio) {
            rep.max_ratio = ratio;
            rep.argmax = alpha;
        }
    }
    return rep;
}

u64 additive_energy(const std::vector<mpq_class>& B, unsigned m, const mpq_class& eps, u64 tuple_cap) {
    if (m == 0) throw Error("energy order m must be positive");
    if (eps < 0) throw Error("eps must be nonnegative");
    if (B.empty()) return 0;
    mpz_class L = 1;
    for (const auto& b : B) {
        mpq_class c = b;
        c.canonicalize();
        mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), c.get_den_mpz_t());
    }
    if (!L.fits_ulong_p() || L > mpz_class(static_cast<unsigned long>(1) << 62)) {
        throw SearchCapExceeded("common denominator too large");
    }
    u64 Lu = L.get_ui();
    std::vector<u64> elems;
    for (const auto& b : B) {
        mpq_class c = b;
        c.canonicalize();
        mpz_class num = c.get_num() * (L / c.get_den());
        elems.push_back(reduce_mpz_u64(num, Lu));
    }
    u64 size = box_size(B.size(), m, tuple_cap, "m-fold sums");
    std::vector<u64> sums{0};
    sums.reserve(size);
    for (unsigned k = 0; k < m; ++k) {
        std::vector<u64> next;
        next.reserve(sums.size() * elems.size());
        for (u64 s : sums) {
            for (u64 e : elems) next.push_back(add_mod(s, e, Lu));
        }
        sums = std::move(next);
    }
    std::sort(sums.begin(), sums.end());

    // Torus distance <= eps exactly: |difference mod L| <= floor(eps L).
    mpz_class w;
    mpz_class scaled = eps.get_num() * L;
    mpz_fdiv_q(w.get_mpz_t(), scaled.get_mpz_t(), eps.get_den_mpz_t());
    u64 N = sums.size();
    if (2 * w >= L) return N * N;
    u64 e = w.get_ui();
    auto count_range = [&](u64 lo, u64 hi) -> u64 {  // values in [lo, hi]
        return static_cast<u64>(std::upper_bound(sums.begin(), sums.end(), hi) -
                                std::lower_bound(sums.begin(), sums.end(), lo));
    };
    u64 total = 0;
    for (u64 s : sums) {
        if (s >= e && s + e < Lu) {
            total += count_range(s - e, s + e);
        } else if (s < e) {
            total += count_range(0, s + e) + count_range(Lu - (e - s), Lu - 1);
        } else {
            total += count_range(s - e, Lu - 1) + count_range(0, s + e - Lu);
        }
    }
    return total;
}

EnergyBoundReport bme_bound_check(const std::vector<mpq_class>& B, unsigned m, u64 Q, u64 n, unsigned K) {
    EnergyBoundReport rep;
    rep.Q = Q;
    rep.n = n;
    std::map<u64, u64> per_q;
    for (const auto& b : B) {
        mpq_class c = b;
        c.canonicalize();
        if (!c.get_den().fits_ulong_p()) {
            rep.hypothesis_ok = false;
            continue;
        }
        u64 q = c.get_den().get_ui();
        if (q > Q) rep.hypothesis_ok = false;
        rep.max_per_denominator = std::max(rep.max_per_denominator, ++per_q[q]);
    }
    if (rep.max_per_denominator > n) rep.hypothesis_ok = false;
    rep.energy = additive_energy(B, m);
    rep.base = std::pow(static_cast<double>(Q) * static_cast<double>(n), static_cast<double>(m));
    rep.ratio = rep.base > 0.0 ? static_cast<double>(rep.energy) / rep.base : 0.0;
    rep.log_factor = std::pow(std::log(static_cast<double>(Q)), static_cast<double>(K));
    rep.holds = static_cast<double>(rep.energy) <= rep.base * rep.log_factor;
    return rep;
}

std::vector<mpq_class> farey_fractions(u64 Q) {
    std::vector<mpq_class> out;
    for (u64 q = 1; q <= Q; ++q) {
        for (u64 a = 0; a < q; ++a) {
            if (std::gcd(a, q) != 1) continue;
            mpq_class v(mpz_class(static_cast<unsigned long>(a)), mpz_class(static_cast<unsigned long>(q)));
            v.canonicalize();
            out.push_back(v);
        }
    }
    return out;
}

}  // namespace primediff
