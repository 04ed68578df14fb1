#include "primediff/padic.hpp"

#include <algorithm>
#include <functional>

#include "primediff/error.hpp"
#include "primediff/primes.hpp"

namespace primediff {

std::string to_string(RootMode mode) {
    return mode == RootMode::Intersective ? "intersective" : "p-intersective";
}

RootMode root_mode_from_string(const std::string& s) {
    if (s == "intersective") return RootMode::Intersective;
    if (s == "p-intersective" || s == "P-intersective" || s == "pintersective") return RootMode::PIntersective;
    throw Error("unknown mode '" + s + "' (expected intersective or p-intersective)");
}

std::string to_string(PAdicRoot::Basis b) {
    switch (b) {
        case PAdicRoot::Basis::Hensel: return "hensel";
        case PAdicRoot::Basis::Exact: return "exact";
        default: return "none";
    }
}

std::string to_string(Certificate::Status s) {
    switch (s) {
        case Certificate::Status::Certified: return "Certified";
        case Certificate::Status::NotIntersective: return "NotIntersective";
        default: return "Unknown";
    }
}

namespace {

u64 modulus_or_throw(u64 p, unsigned v) {
    auto m = checked_pow(p, v);
    if (!m) throw SearchCapExceeded("p^" + std::to_string(v) + " exceeds the 62-bit residue range");
    return *m;
}

bool all_units(std::span<const u64> x, u64 p) {
    return std::all_of(x.begin(), x.end(), [p](u64 c) { return c % p != 0; });
}

// Odometer over [lo, hi)^n; f returns false to stop.
void for_each_digit_vector(std::size_t n, u64 lo, u64 hi, const std::function<bool(const std::vector<u64>&)>& f) {
    if (lo >= hi) return;
    std::vector<u64> t(n, lo);
    while (true) {
        if (!f(t)) return;
        std::size_t i = 0;
        while (i < n) {
            if (++t[i] < hi) break;
            t[i] = lo;
            ++i;
        }
        if (i == n) return;
    }
}

void charge(u64& work, u64 amount, const SearchLimits& limits) {
    work += amount;
    if (work > limits.work) throw SearchCapExceeded("root search exceeded work cap");
}

// Expand the level-k residues `level` to level `to`.
std::vector<std::vector<u64>> grow_tree(const MultiPoly& h, u64 p, std::vector<std::vector<u64>> level,
                                        unsigned from, unsigned to, const SearchLimits& limits, u64& work) {
    u64 top = modulus_or_throw(p, to);
    ModPoly eval(h, top);
    std::size_t n = h.nvars();
    u64 pk = modulus_or_throw(p, from);
    for (unsigned k = from; k < to && !level.empty(); ++k) {
        u64 next_mod = pk * p;
        std::vector<std::vector<u64>> next;
        std::vector<u64> y(n);
        for (const auto& x : level) {
            charge(work, 1, limits);
            for_each_digit_vector(n, 0, p, [&](const std::vector<u64>& t) {
                for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + pk * t[i];
                ++work;
                if (eval(y) % next_mod == 0) {
                    next.push_back(y);
                    if (next.size() > limits.tree_width) throw SearchCapExceeded("root tree wider than cap");
                }
                return true;
            });
            if (work > limits.work) throw SearchCapExceeded("root search exceeded work cap");
        }
        level = std::move(next);
        pk = next_mod;
    }
    std::sort(level.begin(), level.end());
    return level;
}

}  // namespace

u64 PAdicRoot::modulus() const { return modulus_or_throw(p, precision); }

std::vector<u64> PAdicRoot::residue(unsigned v) const {
    u64 m = modulus_or_throw(p, v);
    std::vector<u64> out(value.size());
    if (basis == Basis::Exact) {
        for (std::size_t i = 0; i < exact.size(); ++i) out[i] = reduce_signed(exact[i], m);
        return out;
    }
    if (v > precision) throw InsufficientPrecision(p, "root known mod p^" + std::to_string(precision));
    for (std::size_t i = 0; i < value.size(); ++i) out[i] = value[i] % m;
    return out;
}

PAdicRoot PAdicRoot::at(u64 p, unsigned precision, std::vector<u64> value) {
    PAdicRoot r;
    r.p = p;
    r.precision = precision;
    u64 m = modulus_or_throw(p, precision);
    for (auto& c : value) c %= m;
    r.value = std::move(value);
    r.unit_coords = all_units(r.value, p);
    return r;
}

std::vector<std::vector<u64>> roots_mod(const MultiPoly& h, u64 p, unsigned v, bool unit_only,
                                        const SearchLimits& limits) {
    if (v == 0) throw Error("roots_mod requires precision >= 1");
    if (!is_prime(p)) throw Error("roots_mod requires a prime");
    u64 top = modulus_or_throw(p, v);
    ModPoly eval(h, top);
    std::size_t n = h.nvars();
    u64 work = 0;
    std::vector<std::vector<u64>> level;
    for_each_digit_vector(n, unit_only ? 1 : 0, p, [&](const std::vector<u64>& x) {
        if (++work > limits.work) throw SearchCapExceeded("root search exceeded work cap");
        if (eval(x) % p == 0) {
            level.push_back(x);
            if (level.size() > limits.tree_width) throw SearchCapExceeded("root tree wider than cap");
        }
        return true;
    });
    return grow_tree(h, p, std::move(level), 1, v, limits, work);
}

std::vector<std::vector<u64>> lifts_of(const MultiPoly& h, u64 p, const std::vector<u64>& base,
                                       unsigned from, unsigned to, const SearchLimits& limits) {
    u64 m = modulus_or_throw(p, from);
    std::vector<u64> start(base);
    for (auto& c : start) c %= m;
    if (ModPoly(h, m)(start) != 0) return {};
    u64 work = 0;
    return grow_tree(h, p, {start}, from, to, limits, work);
}

unsigned gradient_valuation(const MultiPoly& h, std::span<const u64> x, u64 p, unsigned v) {
    u64 m = modulus_or_throw(p, v);
    unsigned best = v;
    for (const auto& g : gradient(h)) {
        u64 val = ModPoly(g, m)(x);
        if (val != 0) best = std::min(best, valuation(val, p));
    }
    return best;
}

std::optional<std::vector<i64>> exact_root_near(const MultiPoly& h, std::span<const u64> x, u64 p, unsigned v) {
    u64 m = modulus_or_throw(p, v);
    std::size_t n = x.size();
    if (n > 16) return std::nullopt;
    std::vector<i64> cand(n);
    for (u64 mask = 0; mask < (u64{1} << n); ++mask) {
        for (std::size_t i = 0; i < n; ++i) {
            cand[i] = static_cast<i64>(x[i] % m) - ((mask >> i) & 1 ? static_cast<i64>(m) : 0);
        }
        if (evaluate(h, std::span<const i64>(cand)) == 0) return cand;
    }
    return std::nullopt;
}

PAdicRoot hensel_lift(const MultiPoly& h, const PAdicRoot& root, unsigned target_v, unsigned gamma) {
    if (gamma == 0) throw HypothesisFailed("gamma must be positive");
    const unsigned base = 2 * gamma - 1;
    if (root.precision < base && root.basis != PAdicRoot::Basis::Exact) {
        throw HypothesisFailed("root known only mod p^" + std::to_string(root.precision) + ", need p^" +
                               std::to_string(base));
    }
    if (target_v < base) throw HypothesisFailed("target precision below 2*gamma - 1");
    const u64 p = root.p;
    const bool exact = root.basis == PAdicRoot::Basis::Exact;
    // Lifting starts from every known digit so that lifts to different
    // targets stay consistent with one another.
    const unsigned start = exact ? std::max(target_v, base) : root.precision;
    const unsigned work_v = std::max(target_v, start);
    const u64 top = modulus_or_throw(p, work_v);
    std::vector<u64> x = exact ? root.residue(work_v) : root.value;

    ModPoly eval(h, top);
    if (eval(x) % modulus_or_throw(p, start) != 0) throw HypothesisFailed("representative is not a root");

    // Coordinate with the lowest gradient valuation.
    std::size_t coord = 0;
    unsigned e = gamma;
    auto grad = gradient(h);
    for (std::size_t i = 0; i < grad.size(); ++i) {
        u64 g = ModPoly(grad[i], top)(x);
        unsigned vi = g == 0 ? work_v : valuation(g, p);
        if (vi < e) {
            e = vi;
            coord = i;
        }
    }
    if (e >= gamma) throw HypothesisFailed("gradient vanishes mod p^gamma at the root");
    ModPoly dcoord(grad[coord], top);

    unsigned k = start;
    while (k < work_v) {
        u64 pk = modulus_or_throw(p, k);
        u64 pk1 = pk * p;
        u64 hv = eval(x) % pk1;
        if (hv == 0) {
            ++k;
            continue;
        }
        u64 digit = hv / pk;                       // h(x)/p^k mod p
        u64 unit = (dcoord(x) / modulus_or_throw(p, e)) % p;
        u64 inv = *inverse_mod(unit, p);
        u64 s = mul_mod(p - digit, inv, p);
        u64 step = modulus_or_throw(p, k - e);
        x[coord] = (x[coord] + static_cast<u64>(static_cast<u128>(step) * s % top)) % top;
        if (eval(x) % pk1 != 0) throw HypothesisFailed("Hensel step failed to raise precision");
        ++k;
    }

    PAdicRoot out = PAdicRoot::at(p, target_v, x);
    out.basis = PAdicRoot::Basis::Hensel;
    out.gamma = gamma;
    out.multiplicity = 1;
    return out;
}

namespace {

// Visit each partial derivative of total order 1..max_order once.
void for_each_derivative(const MultiPoly& h, unsigned max_order,
                         const std::function<bool(unsigned, const MultiPoly&)>& f) {
    std::function<bool(const MultiPoly&, unsigned, std::size_t)> rec = [&](const MultiPoly& g, unsigned order,
                                                                           std::size_t min_var) {
        if (order >= max_order) return true;
        for (std::size_t v = min_var; v < h.nvars(); ++v) {
            MultiPoly d = partial(g, v);
            if (d.is_zero()) continue;
            if (!f(order + 1, d)) return false;
            if (!rec(d, order + 1, v)) return false;
        }
        return true;
    };
    rec(h, 0, 0);
}

unsigned exact_multiplicity(const MultiPoly& h, std::span<const i64> z) {
    unsigned deg = h.degree().value_or(0);
    for (unsigned o = 1; o <= deg; ++o) {
        bool found = false;
        // Derivatives of order o only.
        for_each_derivative(h, o, [&](unsigned order, const MultiPoly& d) {
            if (order == o && evaluate(d, z) != 0) {
                found = true;
                return false;
            }
            return true;
        });
        if (found) return o;
    }
    return deg;
}

std::optional<unsigned> residue_multiplicity(const MultiPoly& h, std::span<const u64> x, u64 p, unsigned v) {
    u64 m = modulus_or_throw(p, v);
    unsigned deg = h.degree().value_or(0);
    for (unsigned o = 1; o <= deg; ++o) {
        bool found = false;
        for_each_derivative(h, o, [&](unsigned order, const MultiPoly& d) {
            if (order != o) return true;
            if (d.is_constant()) {
                found = !d.is_zero();
            } else {
                found = ModPoly(d, m)(x) != 0;
            }
            return !found;
        });
        if (found) return o;
    }
    return std::nullopt;
}

}  // namespace

MultiplicityResult multiplicity(const MultiPoly& h, const PAdicRoot& root, unsigned depth_max,
                                const SearchLimits& limits) {
    MultiplicityResult out;
    if (root.basis == PAdicRoot::Basis::Exact) {
        out.value = exact_multiplicity(h, root.exact);
        out.certified = true;
        out.precision = root.precision;
        return out;
    }
    if (auto z = exact_root_near(h, root.value, root.p, root.precision)) {
        out.value = exact_multiplicity(h, *z);
        out.certified = true;
        out.precision = root.precision;
        return out;
    }
    if (root.basis == PAdicRoot::Basis::Hensel) {
        out.value = 1;
        out.certified = true;
        out.precision = root.precision;
        return out;
    }

    // Every lift of the representative is tracked: the genuine approximation
    // of the p-adic root is among them, but which one is not known.
    std::vector<std::vector<u64>> level{root.value};
    unsigned v = root.precision;
    while (true) {
        out.precision = v;
        std::optional<unsigned> agreed;
        bool disagree = false;
        for (const auto& x : level) {
            auto o = residue_multiplicity(h, x, root.p, v);
            if (!agreed) agreed = o;
            else if (o != agreed) disagree = true;
        }
        out.value = disagree ? std::nullopt : agreed;
        if (level.size() == 1 && out.value == 1u) {
            unsigned e = gradient_valuation(h, level.front(), root.p, v);
            if (2 * e + 1 <= v) {
                out.certified = true;
                return out;
            }
        }
        if (v >= depth_max) return out;
        std::vector<std::vector<u64>> next;
        try {
            for (const auto& x : level) {
                auto lifted = lifts_of(h, root.p, x, v, v + 1, limits);
                next.insert(next.end(), lifted.begin(), lifted.end());
                if (next.size() > limits.tree_width) throw SearchCapExceeded("lift tree wider than cap");
            }
        } catch (const SearchCapExceeded&) {
            return out;
        }
        if (next.empty()) {
            out.value.reset();
            return out;
        }
        level = std::move(next);
        ++v;
    }
}

Certificate certify_prime(const MultiPoly& h, RootMode mode, u64 p, unsigned depth_max, const SearchLimits& limits) {
    Certificate cert;
    cert.p = p;
    if (h.is_zero()) throw Error("certify requires a nonzero polynomial");
    const bool unit_only = mode == RootMode::PIntersective;
    for (unsigned j = 1; j <= depth_max; ++j) {
        std::vector<std::vector<u64>> roots;
        try {
            if (!checked_pow(p, j)) {
                cert.status = Certificate::Status::Unknown;
                cert.depth = j - 1;
                cert.reason = "precision cap: p^" + std::to_string(j) + " exceeds 62 bits";
                return cert;
            }
            roots = roots_mod(h, p, j, unit_only, limits);
        } catch (const SearchCapExceeded& ex) {
            cert.status = Certificate::Status::Unknown;
            cert.depth = j;
            cert.reason = std::string("search cap exceeded: ") + ex.what();
            return cert;
        }
        if (roots.empty()) {
            cert.status = Certificate::Status::NotIntersective;
            cert.depth = j;
            cert.reason = unit_only ? "no unit-coordinate root mod p^" + std::to_string(j)
                                    : "no root mod p^" + std::to_string(j);
            return cert;
        }

        std::optional<PAdicRoot> best;
        for (const auto& x : roots) {
            PAdicRoot cand = PAdicRoot::at(p, j, x);
            if (auto z = exact_root_near(h, x, p, j)) {
                cand.basis = PAdicRoot::Basis::Exact;
                cand.exact = *z;
                cand.multiplicity = exact_multiplicity(h, *z);
            } else {
                unsigned e = gradient_valuation(h, x, p, j);
                if (2 * e + 1 > j) continue;
                cand.basis = PAdicRoot::Basis::Hensel;
                cand.gamma = e + 1;
                cand.multiplicity = 1;
            }
            // roots are sorted, so the first at a given multiplicity is lex smallest
            if (!best || *cand.multiplicity < *best->multiplicity) best = std::move(cand);
        }
        if (best) {
            cert.status = Certificate::Status::Certified;
            cert.depth = j;
            cert.reason = best->basis == PAdicRoot::Basis::Exact
                              ? "exact integer root"
                              : "Hensel lift with gamma=" + std::to_string(best->gamma);
            cert.root = std::move(best);
            return cert;
        }
    }
    cert.status = Certificate::Status::Unknown;
    cert.depth = depth_max;
    cert.reason = "roots exist to depth " + std::to_string(depth_max) + " but none satisfies the Hensel hypothesis";
    return cert;
}

std::vector<Certificate> certify(const MultiPoly& h, RootMode mode, u64 p_max, unsigned depth_max,
                                 const SearchLimits& limits) {
    std::vector<Certificate> out;
    for (u64 p : primes_up_to(p_max).primes()) out.push_back(certify_prime(h, mode, p, depth_max, limits));
    return out;
}

}  // namespace primediff
