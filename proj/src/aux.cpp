#include "primediff/aux.hpp"

#include <sstream>

#include "primediff/error.hpp"
#include "primediff/primes.hpp"

namespace primediff {

RootChoice RootChoice::certified(const MultiPoly& h, RootMode mode, u64 p_max, unsigned depth_max,
                                 const SearchLimits& limits) {
    RootChoice choice(h, mode);
    for (const auto& c : certify(h, mode, p_max, depth_max, limits)) {
        if (c.status == Certificate::Status::Certified && c.root) choice.set(c.p, *c.root);
    }
    return choice;
}

void RootChoice::set(u64 p, PAdicRoot root) {
    if (root.p != p) throw Error("root belongs to a different prime");
    if (root.value.size() != poly_.nvars()) throw DimensionMismatch("root has wrong number of coordinates");
    if (ModPoly(poly_, root.modulus())(root.value) != 0) {
        throw HypothesisFailed("stored root does not satisfy h = 0 mod p^v at p=" + std::to_string(p));
    }
    if (root.basis == PAdicRoot::Basis::None) {
        if (auto z = exact_root_near(poly_, root.value, p, root.precision)) {
            root.basis = PAdicRoot::Basis::Exact;
            root.exact = *z;
        } else {
            unsigned e = gradient_valuation(poly_, root.value, p, root.precision);
            if (2 * e + 1 > root.precision) {
                throw HypothesisFailed("root at p=" + std::to_string(p) + " is not certified");
            }
            root.basis = PAdicRoot::Basis::Hensel;
            root.gamma = e + 1;
        }
    }
    root.unit_coords = true;
    for (u64 c : root.value) root.unit_coords = root.unit_coords && c % p != 0;
    if (mode_ == RootMode::PIntersective && !root.unit_coords) {
        throw HypothesisFailed("P-mode root needs unit coordinates at p=" + std::to_string(p));
    }
    if (!root.multiplicity) {
        auto m = primediff::multiplicity(poly_, root);
        root.multiplicity = m.value;
    }
    roots_[p] = std::move(root);
}

const PAdicRoot& RootChoice::root(u64 p) const {
    auto it = roots_.find(p);
    if (it == roots_.end()) throw InsufficientPrecision(p, "no root stored for this prime");
    return it->second;
}

std::vector<u64> RootChoice::residue(u64 p, unsigned e) const {
    const PAdicRoot& z = root(p);
    if (z.basis == PAdicRoot::Basis::Exact) return z.residue(e);
    if (z.basis != PAdicRoot::Basis::Hensel) {
        if (e <= z.precision) return z.residue(e);
        throw InsufficientPrecision(p, "root known mod p^" + std::to_string(z.precision));
    }
    // The lifted digits below p^(target - gamma + 1) agree with the p-adic root.
    unsigned target = std::max(z.precision, e + z.gamma);
    return hensel_lift(poly_, z, target, z.gamma).residue(e);
}

unsigned RootChoice::multiplicity(u64 p) const {
    const PAdicRoot& z = root(p);
    if (!z.multiplicity) throw UnknownMultiplicity(p);
    return *z.multiplicity;
}

std::vector<i64> compute_r_d(const RootChoice& choice, u64 d) {
    if (d == 0) throw Error("d must be positive");
    if (d > (u64{1} << 62)) throw SearchCapExceeded("d too large");
    std::size_t n = choice.polynomial().nvars();
    std::vector<u64> res(n, 0);
    u64 mod = 1;
    for (auto [p, a] : factorize(d)) {
        u64 pa = checked_pow(p, a).value();
        auto z = choice.residue(p, a);
        for (std::size_t i = 0; i < n; ++i) {
            auto [r, m] = crt_combine(res[i], mod, z[i], pa);
            res[i] = r;
            (void)m;
        }
        mod *= pa;
    }
    std::vector<i64> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = res[i] == 0 ? 0 : static_cast<i64>(res[i]) - static_cast<i64>(d);
    return out;
}

mpz_class compute_lambda(const RootChoice& choice, u64 d) {
    if (d == 0) throw Error("d must be positive");
    mpz_class lambda = 1;
    for (auto [p, a] : factorize(d)) {
        mpz_class pp;
        mpz_ui_pow_ui(pp.get_mpz_t(), p, static_cast<unsigned long>(a) * choice.multiplicity(p));
        lambda *= pp;
    }
    return lambda;
}

AuxPoly build_aux(const RootChoice& choice, u64 d) {
    AuxPoly out;
    out.d = d;
    out.r = compute_r_d(choice, d);
    out.lambda = compute_lambda(choice, d);
    MultiPoly shifted = shift_scale(choice.polynomial(), std::span<const i64>(out.r), static_cast<i64>(d));
    out.h_d = divide_exact(shifted, out.lambda);
    return out;
}

bool in_lambda(const std::vector<i64>& r, u64 d, const std::vector<i64>& n) {
    for (std::size_t i = 0; i < r.size(); ++i) {
        i128 v = static_cast<i128>(r[i]) + static_cast<i128>(d) * n[i];
        if (v < 2 || v > static_cast<i128>(INT64_MAX)) return false;
        if (!is_prime(static_cast<u64>(v))) return false;
    }
    return true;
}

namespace {

template <typename F>
void for_each_box_point(std::size_t n, i64 lo, i64 hi, F&& f) {
    if (lo > hi) return;
    std::vector<i64> x(n, lo);
    while (true) {
        f(x);
        std::size_t i = n;
        while (i-- > 0) {
            if (++x[i] <= hi) break;
            x[i] = lo;
        }
        if (i == static_cast<std::size_t>(-1)) return;
    }
}

std::string vec_str(const std::vector<i64>& v) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << ")";
    return os.str();
}

}  // namespace

InheritanceReport verify_inheritance(const RootChoice& choice, u64 d, u64 q, const std::set<i64>& A,
                                     const std::set<i64>& A_prime, i64 x, i64 box) {
    InheritanceReport rep;
    rep.d = d;
    rep.q = q;
    AuxPoly ad = build_aux(choice, d);
    AuxPoly aqd = build_aux(choice, q * d);
    rep.lambda_q = compute_lambda(choice, q);
    std::size_t n = ad.r.size();

    for (i64 a : A_prime) {
        mpz_class v = mpz_class(static_cast<long>(x)) + rep.lambda_q * static_cast<long>(a);
        if (!v.fits_slong_p() || !A.count(v.get_si())) rep.hypothesis_failures.push_back(a);
    }

    rep.s.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        i64 diff = aqd.r[i] - ad.r[i];
        if (diff % static_cast<i64>(d) != 0) {
            rep.violations.push_back("r_qd not congruent to r_d mod d in coordinate " + std::to_string(i));
            return rep;
        }
        rep.s[i] = diff / static_cast<i64>(d);
    }
    if (rep.lambda_q * aqd.h_d != shift_scale(ad.h_d, std::span<const i64>(rep.s), static_cast<i64>(q))) {
        rep.violations.push_back("lambda(q) h_qd(x) != h_d(s + q x) as polynomials");
    }

    auto differences = [](const std::set<i64>& S, const mpz_class& t) -> std::optional<std::pair<i64, i64>> {
        if (!t.fits_slong_p()) return std::nullopt;
        i64 tv = t.get_si();
        for (i64 a2 : S) {
            if (S.count(a2 + tv)) return std::pair{a2 + tv, a2};
        }
        return std::nullopt;
    };

    for_each_box_point(n, -box, box, [&](const std::vector<i64>& nv) {
        ++rep.inputs_enumerated;
        if (!in_lambda(aqd.r, q * d, nv)) return;
        ++rep.inputs_in_lambda;
        mpz_class t = evaluate(aqd.h_d, std::span<const i64>(nv));
        std::vector<i64> m(n);
        for (std::size_t i = 0; i < n; ++i) m[i] = rep.s[i] + static_cast<i64>(q) * nv[i];

        // m lies in Lambda_d and lambda(q) t = h_d(m).
        mpz_class lt = rep.lambda_q * t;
        if (!in_lambda(ad.r, d, m)) rep.violations.push_back("s + q n not in Lambda_d for n = " + vec_str(nv));
        if (evaluate(ad.h_d, std::span<const i64>(m)) != lt) {
            rep.violations.push_back("lambda(q) h_qd(n) != h_d(s + q n) at n = " + vec_str(nv));
        }
        if (t != 0 && differences(A, lt)) rep.a_free_in_box = false;

        auto pair = differences(A_prime, t);
        if (!pair) return;
        if (t != 0) rep.a_prime_free_in_box = false;
        InheritanceWitness w{nv, t, pair->first, pair->second, m, lt};
        // (x + lambda(q) a1) - (x + lambda(q) a2) must be a difference in A.
        mpz_class e1 = mpz_class(static_cast<long>(x)) + rep.lambda_q * static_cast<long>(pair->first);
        mpz_class e2 = mpz_class(static_cast<long>(x)) + rep.lambda_q * static_cast<long>(pair->second);
        bool in_a = e1.fits_slong_p() && e2.fits_slong_p() && A.count(e1.get_si()) && A.count(e2.get_si());
        if (!in_a && !differences(A, lt)) {
            rep.violations.push_back("lambda(q) t = " + lt.get_str() + " is not a difference of A (n = " +
                                     vec_str(nv) + ")");
        }
        rep.witnesses.push_back(std::move(w));
    });
    return rep;
}

ScanReport scan_strongly_deligne(const RootChoice& choice, u64 d_max, u64 p_max, unsigned ext_cap) {
    ScanReport rep;
    auto primes = primes_up_to(p_max).primes();
    for (u64 d = 1; d <= d_max; ++d) {
        AuxPoly a;
        try {
            a = build_aux(choice, d);
        } catch (const Error& ex) {
            rep.failures.emplace_back(d, ex.what());
            continue;
        }
        for (u64 p : primes) {
            ScanEntry e{d, p, is_deligne_mod(a.h_d, p, ext_cap)};
            if (!e.verdict.deligne()) rep.exceptional_primes.insert(p);
            rep.entries.push_back(std::move(e));
        }
    }
    return rep;
}

}  // namespace primediff
