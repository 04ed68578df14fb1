#include "primediff/deligne.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "primediff/error.hpp"
#include "primediff/primes.hpp"

namespace primediff {

namespace {

using Coeffs = std::vector<u64>;

void trim(Coeffs& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

// Remainder of f modulo a monic g over F_p.
Coeffs poly_rem(Coeffs f, const Coeffs& g, u64 p) {
    trim(f);
    std::size_t dg = g.size() - 1;
    while (f.size() > dg) {
        u64 lead = f.back();
        std::size_t shift = f.size() - 1 - dg;
        for (std::size_t i = 0; i <= dg; ++i) f[shift + i] = sub_mod(f[shift + i], mul_mod(lead, g[i], p), p);
        trim(f);
    }
    return f;
}

Coeffs decode(u64 a, u64 p, unsigned m) {
    Coeffs c(m);
    for (unsigned i = 0; i < m; ++i) {
        c[i] = a % p;
        a /= p;
    }
    return c;
}

u64 encode(const Coeffs& c, u64 p) {
    u64 a = 0;
    for (std::size_t i = c.size(); i-- > 0;) a = a * p + c[i];
    return a;
}

constexpr u64 kTableOrder = 1024;

}  // namespace

bool is_irreducible_mod(const Coeffs& f, u64 p) {
    Coeffs g(f);
    trim(g);
    if (g.size() < 2) return false;
    std::size_t n = g.size() - 1;
    if (n == 1) return true;
    // Trial division by every monic polynomial of degree 1..n/2.
    for (std::size_t d = 1; d <= n / 2; ++d) {
        u64 count = checked_pow(p, static_cast<unsigned>(d)).value();
        for (u64 low = 0; low < count; ++low) {
            Coeffs div = decode(low, p, static_cast<unsigned>(d));
            div.push_back(1);
            if (poly_rem(g, div, p).empty()) return false;
        }
    }
    return true;
}

Coeffs first_irreducible(u64 p, unsigned m) {
    if (m == 0) throw Error("extension degree must be positive");
    if (m == 1) return {0, 1};
    u64 count = checked_pow(p, m).value();
    for (u64 low = 0; low < count; ++low) {
        Coeffs f = decode(low, p, m);
        f.push_back(1);
        if (is_irreducible_mod(f, p)) return f;
    }
    throw Error("no irreducible polynomial found");
}

FiniteField::FiniteField(u64 p, unsigned m) : p_(p), m_(m) {
    if (!is_prime(p)) throw Error("field characteristic must be prime");
    auto q = checked_pow(p, m);
    if (!q || *q > (u64{1} << 32)) throw SearchCapExceeded("field order too large");
    q_ = *q;
    modulus_ = first_irreducible(p, m);
    if (m > 1 && q_ <= kTableOrder) {
        std::vector<std::uint16_t> at(q_ * q_), st(q_ * q_), mt(q_ * q_);
        for (u64 a = 0; a < q_; ++a) {
            for (u64 b = 0; b < q_; ++b) {
                at[a * q_ + b] = static_cast<std::uint16_t>(add(a, b));
                st[a * q_ + b] = static_cast<std::uint16_t>(sub(a, b));
                mt[a * q_ + b] = static_cast<std::uint16_t>(mul(a, b));
            }
        }
        add_table_ = std::move(at);
        sub_table_ = std::move(st);
        mul_table_ = std::move(mt);
    }
}

u64 FiniteField::poly_add(u64 a, u64 b, bool subtract) const {
    Coeffs x = decode(a, p_, m_), y = decode(b, p_, m_);
    for (unsigned i = 0; i < m_; ++i) x[i] = subtract ? sub_mod(x[i], y[i], p_) : add_mod(x[i], y[i], p_);
    return encode(x, p_);
}

u64 FiniteField::poly_mul(u64 a, u64 b) const {
    Coeffs x = decode(a, p_, m_), y = decode(b, p_, m_);
    Coeffs prod(2 * m_ - 1, 0);
    for (unsigned i = 0; i < m_; ++i) {
        for (unsigned j = 0; j < m_; ++j) prod[i + j] = add_mod(prod[i + j], mul_mod(x[i], y[j], p_), p_);
    }
    Coeffs r = poly_rem(prod, modulus_, p_);
    r.resize(m_, 0);
    return encode(r, p_);
}

u64 FiniteField::add(u64 a, u64 b) const {
    if (m_ == 1) return add_mod(a, b, p_);
    if (!add_table_.empty()) return add_table_[a * q_ + b];
    if (m_ == 2) return add_mod(a % p_, b % p_, p_) + p_ * add_mod(a / p_, b / p_, p_);
    return poly_add(a, b, false);
}

u64 FiniteField::sub(u64 a, u64 b) const {
    if (m_ == 1) return sub_mod(a, b, p_);
    if (!sub_table_.empty()) return sub_table_[a * q_ + b];
    if (m_ == 2) return sub_mod(a % p_, b % p_, p_) + p_ * sub_mod(a / p_, b / p_, p_);
    return poly_add(a, b, true);
}

u64 FiniteField::mul(u64 a, u64 b) const {
    if (m_ == 1) return mul_mod(a, b, p_);
    if (!mul_table_.empty()) return mul_table_[a * q_ + b];
    if (m_ == 2) {
        // t^2 = -c1 t - c0 for the defining polynomial t^2 + c1 t + c0.
        u64 a0 = a % p_, a1 = a / p_, b0 = b % p_, b1 = b / p_;
        u64 hi = mul_mod(a1, b1, p_);
        u64 lo = sub_mod(mul_mod(a0, b0, p_), mul_mod(hi, modulus_[0], p_), p_);
        u64 mid = add_mod(mul_mod(a0, b1, p_), mul_mod(a1, b0, p_), p_);
        mid = sub_mod(mid, mul_mod(hi, modulus_[1], p_), p_);
        return lo + p_ * mid;
    }
    return poly_mul(a, b);
}

std::vector<u64> FiniteField::digits(u64 a) const { return decode(a, p_, m_); }

const FiniteField& finite_field(u64 p, unsigned m) {
    static std::mutex mu;
    static std::map<std::pair<u64, unsigned>, std::unique_ptr<FiniteField>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{p, m}];
    if (!slot) slot = std::make_unique<FiniteField>(p, m);
    return *slot;
}

FieldEvaluator::FieldEvaluator(const MultiPoly& h, const FiniteField& field)
    : field_(&field), nvars_(h.nvars()), max_exp_(h.nvars(), 0) {
    u64 p = field.characteristic();
    for (const auto& [e, c] : h.terms()) {
        u64 r = reduce_mpz(c, p);
        if (r == 0) continue;
        terms_.push_back({r, e});
        for (std::size_t i = 0; i < nvars_; ++i) max_exp_[i] = std::max(max_exp_[i], e[i]);
    }
}

u64 FieldEvaluator::operator()(const std::vector<u64>& x) const {
    const FiniteField& f = *field_;
    std::vector<std::vector<u64>> pw(nvars_);
    for (std::size_t i = 0; i < nvars_; ++i) {
        pw[i].resize(max_exp_[i] + 1);
        pw[i][0] = 1;
        for (unsigned k = 1; k <= max_exp_[i]; ++k) pw[i][k] = f.mul(pw[i][k - 1], x[i]);
    }
    u64 total = 0;
    for (const auto& t : terms_) {
        u64 v = t.coeff;
        for (std::size_t i = 0; i < nvars_ && v != 0; ++i) {
            if (t.exps[i]) v = f.mul(v, pw[i][t.exps[i]]);
        }
        total = f.add(total, v);
    }
    return total;
}

namespace {

// Calls f on projective representatives of GF(q)^n: first nonzero coordinate 1.
template <typename F>
bool for_each_projective(std::size_t n, u64 q, F&& f) {
    std::vector<u64> x(n);
    for (std::size_t lead = 0; lead < n; ++lead) {
        std::fill(x.begin(), x.end(), 0);
        x[lead] = 1;
        while (true) {
            if (!f(x)) return false;
            std::size_t i = n;
            while (i-- > lead + 1) {
                if (++x[i] < q) break;
                x[i] = 0;
            }
            if (i == lead) break;
        }
    }
    return true;
}

u64 projective_size(std::size_t n, u64 q) {
    long double total = 0;
    for (std::size_t i = 0; i < n; ++i) total += std::pow(static_cast<long double>(q), static_cast<long double>(i));
    return total > 1e18L ? ~u64{0} : static_cast<u64>(total);
}

}  // namespace

SmoothVerdict is_smooth_mod(const MultiPoly& g, u64 p, unsigned ext_cap, u64 point_cap) {
    if (!is_homogeneous(g)) throw HypothesisFailed("smoothness is defined for homogeneous polynomials");
    MultiPoly gr = reduce_mod(g, p);
    if (gr.is_zero()) throw HypothesisFailed("polynomial vanishes mod " + std::to_string(p));
    auto grad = gradient(gr);
    SmoothVerdict out;
    for (unsigned m = 1; m <= ext_cap; ++m) {
        auto q = checked_pow(p, m);
        if (!q || projective_size(g.nvars(), *q) > point_cap) {
            throw SearchCapExceeded("smoothness search over GF(" + std::to_string(p) + "^" + std::to_string(m) +
                                    ") exceeds point cap");
        }
        const FiniteField& field = finite_field(p, m);
        FieldEvaluator ev(gr, field);
        std::vector<FieldEvaluator> dev;
        for (const auto& d : grad) dev.emplace_back(d, field);
        for_each_projective(g.nvars(), *q, [&](const std::vector<u64>& x) {
            for (const auto& d : dev) {
                if (d(x) != 0) return true;
            }
            if (ev(x) != 0) return true;
            out.witness = FieldPoint{p, m, field.modulus(), x};
            return false;
        });
        if (out.witness) {
            out.smooth = false;
            out.ext_checked = m;
            return out;
        }
        out.ext_checked = m;
    }
    out.smooth = true;
    return out;
}

bool witness_is_singular(const MultiPoly& g, const FieldPoint& w) {
    const FiniteField& field = finite_field(w.p, w.m);
    if (field.modulus() != w.modulus) return false;
    std::vector<u64> x = w.coords;
    if (x.size() != g.nvars()) return false;
    bool nonzero = false;
    for (u64 c : x) nonzero = nonzero || c != 0;
    if (!nonzero) return false;
    if (FieldEvaluator(g, field)(x) != 0) return false;
    for (const auto& d : gradient(g)) {
        if (FieldEvaluator(d, field)(x) != 0) return false;
    }
    return true;
}

std::string to_string(DeligneVerdict::Status s) {
    switch (s) {
        case DeligneVerdict::Status::Deligne: return "Deligne";
        case DeligneVerdict::Status::ZeroReduction: return "ZeroReduction";
        case DeligneVerdict::Status::CharDividesDegree: return "CharDividesDegree";
        default: return "NotSmooth";
    }
}

DeligneVerdict is_deligne_mod(const MultiPoly& h, u64 p, unsigned ext_cap, u64 point_cap) {
    DeligneVerdict out;
    MultiPoly hr = reduce_mod(h, p);
    if (hr.is_zero()) {
        out.status = DeligneVerdict::Status::ZeroReduction;
        return out;
    }
    out.k = *hr.degree();
    if (out.k % p == 0) {
        out.status = DeligneVerdict::Status::CharDividesDegree;
        return out;
    }
    out.smooth = is_smooth_mod(homogeneous_part(hr, out.k), p, ext_cap, point_cap);
    out.status = out.smooth.smooth ? DeligneVerdict::Status::Deligne : DeligneVerdict::Status::NotSmooth;
    return out;
}

PointCount point_count(const MultiPoly& h, u64 p, u64 point_cap) {
    if (!is_prime(p)) throw Error("point_count requires a prime");
    std::size_t n = h.nvars();
    long double size = std::pow(static_cast<long double>(p), static_cast<long double>(n));
    if (size > static_cast<long double>(point_cap)) throw SearchCapExceeded("point count exceeds cap");
    if (reduce_mod(h, p).is_constant()) throw HypothesisFailed("polynomial is constant mod p");
    ModPoly ev(h, p);
    PointCount out;
    std::vector<u64> x(n, 0);
    while (true) {
        if (ev(x) == 0) ++out.count;
        std::size_t i = 0;
        while (i < n) {
            if (++x[i] < p) break;
            x[i] = 0;
            ++i;
        }
        if (i == n) break;
    }
    double pd = static_cast<double>(p);
    double expect = std::pow(pd, static_cast<double>(n) - 1.0);
    out.lang_weil_gap = std::abs(static_cast<double>(out.count) - expect) / std::pow(pd, static_cast<double>(n) - 1.5);
    return out;
}

std::string to_string(CriterionStatus s) {
    switch (s) {
        case CriterionStatus::Satisfied: return "Satisfied";
        case CriterionStatus::NotSatisfied: return "NotSatisfied";
        default: return "NotEvaluated";
    }
}

bool CriteriaReport::any_satisfied() const {
    for (const auto* c : {&criterion_i, &criterion_ii, &criterion_iii, &criterion_iv}) {
        if (c->status == CriterionStatus::Satisfied) return true;
    }
    return false;
}

std::optional<MultiPoly> divide_poly(const MultiPoly& h, const MultiPoly& g) {
    if (g.is_zero()) throw Error("division by the zero polynomial");
    if (h.nvars() != g.nvars()) throw DimensionMismatch("divide_poly: variable counts differ");
    MultiPoly r = h;
    MultiPoly q(h.nvars());
    const auto& [ge, gc] = *g.terms().rbegin();
    while (!r.is_zero()) {
        const auto& [re, rc] = *r.terms().rbegin();
        Exponent diff(re.size());
        for (std::size_t i = 0; i < re.size(); ++i) {
            if (re[i] < ge[i]) return std::nullopt;
            diff[i] = re[i] - ge[i];
        }
        if (!mpz_divisible_p(rc.get_mpz_t(), gc.get_mpz_t())) return std::nullopt;
        MultiPoly t = MultiPoly::monomial(diff, rc / gc);
        q += t;
        r -= t * g;
    }
    return q;
}

std::optional<MultiPoly> find_linear_factor(const MultiPoly& h, int bound) {
    std::size_t n = h.nvars();
    if (h.degree().value_or(0) < 1) return std::nullopt;
    std::vector<int> c(n + 1, -bound);  // c[0] constant, c[1..n] linear coefficients
    while (true) {
        bool linear = false, normalized = false;
        int g = 0;
        for (std::size_t i = 1; i <= n; ++i) {
            if (c[i] != 0 && !linear) normalized = c[i] > 0;
            linear = linear || c[i] != 0;
        }
        for (int v : c) g = std::gcd(g, v);
        if (linear && normalized && g == 1) {
            MultiPoly lf = MultiPoly::constant(n, c[0]);
            for (std::size_t i = 1; i <= n; ++i) lf += MultiPoly::variable(n, i - 1) * mpz_class(c[i]);
            if (divide_poly(h, lf)) return lf;
        }
        std::size_t i = 0;
        while (i <= n) {
            if (++c[i] <= bound) break;
            c[i] = -bound;
            ++i;
        }
        if (i > n) return std::nullopt;
    }
}

namespace {

bool is_coordinate_form(const MultiPoly& lf) {
    return lf.term_count() == 1 && *lf.degree() == 1;
}

// Smooth mod some sample prime at which the form keeps its degree.
std::optional<u64> smooth_at_sample(const MultiPoly& g, const CriteriaOptions& opt) {
    unsigned k = g.degree().value_or(0);
    for (u64 p : opt.sample_primes) {
        MultiPoly gr = reduce_mod(g, p);
        if (gr.is_zero() || *gr.degree() != k) continue;
        try {
            if (is_smooth_mod(gr, p, opt.ext_cap).smooth) return p;
        } catch (const SearchCapExceeded&) {
            continue;
        }
    }
    return std::nullopt;
}

}  // namespace

CriteriaReport p_deligne_criteria(const MultiPoly& h, const CriteriaOptions& opt) {
    CriteriaReport rep;
    rep.k = h.degree().value_or(0);
    rep.nvars = h.nvars();
    if (rep.k < 2) throw HypothesisFailed("criteria require degree at least 2");

    auto certs = certify(h, RootMode::PIntersective, opt.p_max, opt.depth, opt.limits);
    for (const auto& c : certs) {
        if (c.status == Certificate::Status::Certified) ++rep.primes_certified;
        else rep.primes_not_certified.push_back(c.p);
    }
    for (u64 p : opt.sample_primes) {
        try {
            if (is_deligne_mod(h, p, opt.ext_cap).deligne()) {
                rep.deligne_prime = p;
                break;
            }
        } catch (const SearchCapExceeded&) {
        }
    }

    if (rep.nvars != 2) {
        rep.criterion_i = {CriterionStatus::Satisfied, "l = " + std::to_string(rep.nvars)};
    } else {
        rep.criterion_i = {CriterionStatus::NotSatisfied, "l = 2"};
    }

    if (rep.nvars != 2) {
        rep.criterion_ii = {CriterionStatus::NotEvaluated, "applies to two variables only"};
    } else {
        rep.criterion_ii = {CriterionStatus::NotSatisfied, "no sign pair (a,b) with h(a,b) = 0"};
        for (auto [a, b] : {std::pair{1, 1}, std::pair{1, -1}, std::pair{-1, 1}, std::pair{-1, -1}}) {
            i64 ab[] = {a, b};
            if (evaluate(h, std::span<const i64>(ab)) != 0) continue;
            MultiPoly s = shift_scale(h, std::span<const i64>(ab), 1);
            MultiPoly top = homogeneous_part(s, *s.degree());
            MultiPoly low = homogeneous_part(s, *s.low_degree());
            auto pt = smooth_at_sample(top, opt);
            auto pl = smooth_at_sample(low, opt);
            std::ostringstream ev;
            ev << "(a,b) = (" << a << "," << b << "); top part " << to_string(top);
            ev << (pt ? " smooth mod " + std::to_string(*pt) : " not smooth at sampled primes");
            ev << "; bottom part " << to_string(low);
            ev << (pl ? " smooth mod " + std::to_string(*pl) : " not smooth at sampled primes");
            if (pt && pl) {
                rep.criterion_ii = {CriterionStatus::Satisfied, ev.str()};
                rep.shift = std::pair{a, b};
                break;
            }
            rep.criterion_ii = {CriterionStatus::NotSatisfied, ev.str()};
        }
    }

    if (auto lf = find_linear_factor(h, opt.factor_search); lf && !is_coordinate_form(*lf)) {
        rep.criterion_iii = {CriterionStatus::Satisfied, "rational linear factor " + to_string(*lf)};
    } else {
        rep.criterion_iii = {CriterionStatus::NotEvaluated,
                             "no rational linear factor with coefficients in [-" + std::to_string(opt.factor_search) +
                                 ", " + std::to_string(opt.factor_search) + "]; absolute factorization not attempted"};
    }

    if (rep.k == 2) {
        rep.criterion_iv = {CriterionStatus::Satisfied, "k = 2"};
    } else {
        std::size_t checked = 0;
        for (const auto& c : certs) {
            if (c.status != Certificate::Status::Certified || !c.root) continue;
            ++checked;
            auto m = c.root->multiplicity;
            if (!m || (*m != 1 && *m != rep.k)) rep.multiplicity_exceptions.push_back(c.p);
        }
        std::ostringstream ev;
        ev << checked << " certified primes <= " << opt.p_max << ", " << rep.multiplicity_exceptions.size()
           << " with multiplicity outside {1, " << rep.k << "}";
        bool ok = checked > 0 && rep.multiplicity_exceptions.empty();
        rep.criterion_iv = {ok ? CriterionStatus::Satisfied : CriterionStatus::NotSatisfied, ev.str()};
    }
    return rep;
}

}  // namespace primediff
