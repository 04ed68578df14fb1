#include "primediff/sieve.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "primediff/error.hpp"
#include "primediff/primes.hpp"

namespace primediff {

namespace {

// Calls f on every c in [0, m)^n.
template <typename F>
void for_each_residue(std::size_t n, u64 m, F&& f) {
    std::vector<u64> c(n, 0);
    while (true) {
        f(c);
        std::size_t i = 0;
        while (i < n) {
            if (++c[i] < m) break;
            c[i] = 0;
            ++i;
        }
        if (i == n) return;
    }
}

bool unit_condition(const std::vector<i64>& r, u64 d, const std::vector<u64>& c, u64 p) {
    for (std::size_t i = 0; i < r.size(); ++i) {
        u64 v = add_mod(reduce_signed(r[i], p), mul_mod(d % p, c[i] % p, p), p);
        if (v == 0) return false;
    }
    return true;
}

bool all_zero(const std::vector<ModPoly>& grad, const std::vector<u64>& c) {
    for (const auto& g : grad) {
        if (g(c) != 0) return false;
    }
    return true;
}

std::vector<ModPoly> gradient_mod(const MultiPoly& h, u64 m) {
    std::vector<ModPoly> out;
    for (const auto& g : gradient(h)) out.emplace_back(g, m);
    return out;
}

u64 pow_u64(u64 p, unsigned e) {
    auto v = checked_pow(p, e);
    if (!v) throw SearchCapExceeded("prime power exceeds 62 bits");
    return *v;
}

}  // namespace

unsigned default_gamma_cap(const MultiPoly& h_d, u64 p) {
    unsigned k = h_d.degree().value_or(0);
    mpz_class fact;
    mpz_fac_ui(fact.get_mpz_t(), k);
    mpz_class c = content(h_d);
    if (c == 0) throw HypothesisFailed("h_d is constant, its gradient vanishes identically");
    return 2 + k + valuation(mpz_class(fact * c), p);
}

SievePrime gamma_and_j(const MultiPoly& h_d, const std::vector<i64>& r, u64 d, u64 p, const GammaOptions& opt) {
    SievePrime out;
    out.p = p;
    out.eps = d % p == 0 ? 0 : 1;
    std::size_t n = h_d.nvars();
    unsigned cap = opt.cap.value_or(default_gamma_cap(h_d, p));
    for (unsigned gamma = 1; gamma <= cap; ++gamma) {
        u64 m = pow_u64(p, gamma);
        if (std::pow(static_cast<long double>(m), static_cast<long double>(n)) > opt.class_cap) {
            throw SearchCapExceeded("J_d(p) enumeration mod " + std::to_string(m) + " exceeds class cap");
        }
        auto grad = gradient_mod(h_d, m);
        u64 size = 0, zeros = 0;
        for_each_residue(n, m, [&](const std::vector<u64>& c) {
            if (!unit_condition(r, d, c, p)) return;
            ++size;
            if (all_zero(grad, c)) ++zeros;
        });
        if (size == 0) throw HypothesisFailed("J_d(p) is empty at p=" + std::to_string(p));
        if (zeros < size) {
            out.gamma = gamma;
            out.j = zeros;
            out.J_size = size;
            return out;
        }
    }
    throw SearchCapExceeded("gamma_d(" + std::to_string(p) + ") exceeds cap " + std::to_string(cap));
}

mpq_class w_product(const std::vector<SievePrime>& primes) {
    mpq_class w = 1;
    for (const auto& sp : primes) {
        if (sp.J_size == 0) throw HypothesisFailed("empty J_d(p)");
        mpq_class f(mpz_class(sp.J_size - sp.j), mpz_class(sp.J_size));
        f.canonicalize();
        w *= f;
    }
    w.canonicalize();
    return w;
}

const SievePrime* SieveProfile::find(u64 p) const {
    for (const auto& sp : primes) {
        if (sp.p == p) return &sp;
    }
    return nullptr;
}

SieveProfile build_profile(const AuxPoly& aux, u64 Y, const GammaOptions& opt) {
    SieveProfile prof;
    prof.d = aux.d;
    prof.Y = Y;
    prof.r = aux.r;
    prof.lambda = aux.lambda;
    prof.h_d = aux.h_d;
    for (u64 p : primes_up_to(Y).primes()) prof.primes.push_back(gamma_and_j(aux.h_d, aux.r, aux.d, p, opt));
    prof.w_exact = w_product(prof.primes);
    prof.w = prof.w_exact.get_d();
    if (prof.w_exact <= 0) throw HypothesisFailed("w_d is not positive");
    return prof;
}

SieveProfile build_profile(const RootChoice& choice, u64 d, u64 Y, const GammaOptions& opt) {
    return build_profile(build_aux(choice, d), Y, opt);
}

bool gradient_vanishes(const SieveProfile& prof, const SievePrime& sp, const std::vector<i64>& n) {
    u64 m = pow_u64(sp.p, sp.gamma);
    std::vector<u64> c(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) c[i] = reduce_signed(n[i], m);
    for (const auto& g : gradient(prof.h_d)) {
        if (ModPoly(g, m)(c) != 0) return false;
    }
    return true;
}

bool in_W(const SieveProfile& prof, const std::vector<i64>& n) {
    if (n.size() != prof.nvars()) throw DimensionMismatch("point has wrong dimension");
    if (!in_lambda(prof.r, prof.d, n)) return false;
    for (const auto& sp : prof.primes) {
        if (gradient_vanishes(prof, sp, n)) return false;
    }
    return true;
}

namespace {

double phi_ratio_power(const SieveProfile& prof) {
    double ratio = static_cast<double>(euler_phi(prof.d)) / static_cast<double>(prof.d);
    return std::pow(ratio, static_cast<double>(prof.nvars()));
}

// prod log(r_i + d n_i), times h_d'(n) when l = 1.
double raw_weight(const SieveProfile& prof, const std::vector<i64>& n) {
    double w = 1.0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        w *= std::log(static_cast<double>(prof.r[i] + static_cast<i64>(prof.d) * n[i]));
    }
    if (prof.nvars() == 1) w *= evaluate(partial(prof.h_d, 0), std::span<const i64>(n)).get_d();
    return w;
}

int raw_weight_sign(const SieveProfile& prof, const std::vector<i64>& n) {
    if (prof.nvars() != 1) return 1;
    return sgn(evaluate(partial(prof.h_d, 0), std::span<const i64>(n)));
}

}  // namespace

double nu_weight(const SieveProfile& prof, const std::vector<i64>& n) {
    if (!in_W(prof, n)) return 0.0;
    return raw_weight(prof, n) * phi_ratio_power(prof) / prof.w;
}

bool membership_W_dq(const SieveProfile& prof, const std::vector<i64>& n, u64 q) {
    if (q == 0) throw Error("q must be positive");
    if (n.size() != prof.nvars()) throw DimensionMismatch("point has wrong dimension");
    for (std::size_t i = 0; i < n.size(); ++i) {
        mpz_class v = mpz_class(static_cast<long>(prof.r[i])) + mpz_class(static_cast<unsigned long>(prof.d)) *
                                                                    mpz_class(static_cast<long>(n[i]));
        mpz_class g;
        mpz_gcd_ui(g.get_mpz_t(), v.get_mpz_t(), q);
        if (g != 1) return false;
    }
    for (const auto& sp : prof.primes) {
        u64 pg = pow_u64(sp.p, sp.gamma);
        if (q % pg != 0) continue;
        if (gradient_vanishes(prof, sp, n)) return false;
    }
    return true;
}

mpq_class w_dq(const SieveProfile& prof, const std::vector<i64>& s, u64 q) {
    mpq_class w = 1;
    std::size_t n = prof.nvars();
    for (const auto& sp : prof.primes) {
        u64 pg = pow_u64(sp.p, sp.gamma);
        if (q % pg == 0) continue;
        unsigned v = 0;
        for (u64 t = q; t % sp.p == 0; t /= sp.p) ++v;
        unsigned eps = (prof.d % sp.p == 0 || q % sp.p == 0) ? 0 : 1;
        mpz_class denom_base = mpz_class(static_cast<unsigned long>(sp.p - eps)) *
                               mpz_class(static_cast<unsigned long>(pow_u64(sp.p, sp.gamma - v - 1)));
        mpz_class denom;
        mpz_pow_ui(denom.get_mpz_t(), denom_base.get_mpz_t(), n);

        u64 j = 0;
        if (v == 0) {
            j = sp.j;
        } else {
            u64 pv = pow_u64(sp.p, v);
            auto grad = gradient_mod(prof.h_d, pg);
            std::vector<u64> base(n), c(n);
            for (std::size_t i = 0; i < n; ++i) base[i] = reduce_signed(s[i], pv);
            for_each_residue(n, pow_u64(sp.p, sp.gamma - v), [&](const std::vector<u64>& t) {
                for (std::size_t i = 0; i < n; ++i) c[i] = base[i] + pv * t[i];
                if (unit_condition(prof.r, prof.d, c, sp.p) && all_zero(grad, c)) ++j;
            });
        }
        mpq_class f(mpz_class(static_cast<unsigned long>(j)), denom);
        f.canonicalize();
        w *= 1 - f;
    }
    w.canonicalize();
    return w;
}

SandwichReport sieve_sum_sandwich(const SieveProfile& prof, i64 box, const std::vector<unsigned>& t_values) {
    SandwichReport rep;
    std::size_t n = prof.nvars();
    const double scale = phi_ratio_power(prof) / prof.w;
    for (const auto& sp : prof.primes) rep.sieve_primes.push_back(sp.p);
    if (box < 1) return rep;

    // Points of the box, indexed in odometer order.
    std::size_t side = static_cast<std::size_t>(box);
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= side;
    auto index_of = [&](const std::vector<i64>& x) {
        std::size_t idx = 0;
        for (std::size_t i = n; i-- > 0;) idx = idx * side + static_cast<std::size_t>(x[i] - 1);
        return idx;
    };

    std::vector<double> weight(total, 0.0);
    std::vector<int> sign(total, 0);
    std::vector<unsigned> bad(total, 0);
    std::vector<char> in_lam(total, 0);
    std::vector<i64> x(n, 1);
    for (std::size_t idx = 0; idx < total; ++idx) {
        rep.points++;
        if (in_lambda(prof.r, prof.d, x)) {
            in_lam[idx] = 1;
            rep.points_in_lambda++;
            weight[idx] = raw_weight(prof, x);
            sign[idx] = raw_weight_sign(prof, x);
            if (sign[idx] < 0) rep.weights_nonnegative = false;
            for (const auto& sp : prof.primes) bad[idx] += gradient_vanishes(prof, sp, x);
            if (bad[idx] == 0) rep.true_sum += weight[idx];
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (++x[i] <= box) break;
            x[i] = 1;
        }
    }
    rep.true_sum *= scale;

    // Bad gradient classes mod p^gamma for each sieve prime, all residues included.
    std::vector<std::vector<std::vector<u64>>> bad_classes(prof.primes.size());
    std::vector<u64> moduli(prof.primes.size());
    for (std::size_t k = 0; k < prof.primes.size(); ++k) {
        const auto& sp = prof.primes[k];
        moduli[k] = pow_u64(sp.p, sp.gamma);
        auto grad = gradient_mod(prof.h_d, moduli[k]);
        for_each_residue(n, moduli[k], [&](const std::vector<u64>& c) {
            if (all_zero(grad, c)) bad_classes[k].push_back(c);
        });
    }

    auto binom = [](unsigned b, unsigned k) {
        long long v = 1;
        for (unsigned i = 0; i < k; ++i) v = v * (b - i) / (i + 1);
        return v;
    };

    for (unsigned t : t_values) {
        Truncation tr;
        tr.t = t;
        std::vector<long long> kappa(total, 0);

        // Subsets S of sieve primes with |S| <= t, each class combination by CRT.
        std::function<void(std::size_t, std::vector<std::size_t>&)> subsets = [&](std::size_t start,
                                                                                 std::vector<std::size_t>& S) {
            long long sgn_s = (S.size() % 2 == 0) ? 1 : -1;
            std::function<void(std::size_t, std::vector<u64>&, u64)> classes = [&](std::size_t pos,
                                                                                   std::vector<u64>& c, u64 m) {
                if (pos == S.size()) {
                    // Walk every box point congruent to c mod m.
                    std::vector<i64> first(n), y(n);
                    for (std::size_t i = 0; i < n; ++i) {
                        i64 r0 = static_cast<i64>(c[i] % m);
                        first[i] = r0 == 0 ? static_cast<i64>(m) : r0;
                        if (first[i] > box) return;
                    }
                    y = first;
                    while (true) {
                        std::size_t idx = index_of(y);
                        if (in_lam[idx]) kappa[idx] += sgn_s;
                        std::size_t i = 0;
                        while (i < n) {
                            y[i] += static_cast<i64>(m);
                            if (y[i] <= box) break;
                            y[i] = first[i];
                            ++i;
                        }
                        if (i == n) return;
                    }
                }
                std::size_t k = S[pos];
                for (const auto& bc : bad_classes[k]) {
                    std::vector<u64> next(n);
                    u64 mm = m;
                    for (std::size_t i = 0; i < n; ++i) {
                        auto [rr, m2] = crt_combine(c[i], m, bc[i], moduli[k]);
                        next[i] = rr;
                        mm = m2;
                    }
                    classes(pos + 1, next, mm);
                }
            };
            std::vector<u64> c0(n, 0);
            classes(0, c0, 1);
            if (S.size() == t) return;
            for (std::size_t k = start; k < prof.primes.size(); ++k) {
                S.push_back(k);
                subsets(k + 1, S);
                S.pop_back();
            }
        };
        std::vector<std::size_t> S;
        subsets(0, S);

        double value = 0.0;
        tr.exact = true;
        for (std::size_t idx = 0; idx < total; ++idx) {
            if (!in_lam[idx]) continue;
            long long direct = 0;
            for (unsigned k = 0; k <= std::min(t, bad[idx]); ++k) direct += (k % 2 ? -1 : 1) * binom(bad[idx], k);
            if (direct != kappa[idx]) tr.matches_direct = false;
            long long diff = kappa[idx] - (bad[idx] == 0 ? 1 : 0);
            // Bonferroni: the truncation error has sign (-1)^t at every point.
            long long oriented = (t % 2 == 0 ? diff : -diff) * sign[idx];
            if (oriented < 0) tr.brackets = false;
            if (diff != 0 && sign[idx] != 0) tr.exact = false;
            value += weight[idx] * static_cast<double>(kappa[idx]);
        }
        tr.value = value * scale;
        if (!tr.brackets || !tr.matches_direct) ++rep.violations;
        rep.truncations.push_back(tr);
    }
    return rep;
}

}  // namespace primediff
