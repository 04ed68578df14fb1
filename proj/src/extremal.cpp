#include "primediff/extremal.hpp"

#include <algorithm>
#include <bitset>
#include <cmath>
#include <numbers>
#include <sstream>

#include "primediff/error.hpp"

namespace primediff {

DifferenceSet make_difference_set(std::vector<u64> values, u64 N, std::string provenance) {
    if (N == 0) throw Error("N must be positive");
    DifferenceSet out;
    out.N = N;
    out.provenance = std::move(provenance);
    for (u64 v : values) {
        if (v >= 1 && v <= N - 1) out.X.push_back(v);
    }
    std::sort(out.X.begin(), out.X.end());
    out.X.erase(std::unique(out.X.begin(), out.X.end()), out.X.end());
    return out;
}

namespace {

template <typename F>
void for_each_box_point(std::size_t n, i64 lo, i64 hi, u64 cap, F&& f) {
    if (lo > hi) return;
    u64 side = static_cast<u64>(hi - lo + 1), total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (total > cap / side) throw SearchCapExceeded("input box exceeds point cap");
        total *= side;
    }
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

void collect_value(const mpz_class& v, u64 N, std::vector<u64>& out) {
    if (v >= 1 && v < mpz_class(static_cast<unsigned long>(N))) out.push_back(v.get_ui());
}

}  // namespace

DifferenceSet build_difference_set(const AuxPoly& aux, i64 box, u64 N, u64 point_cap) {
    std::vector<u64> values;
    for_each_box_point(aux.h_d.nvars(), 1, box, point_cap, [&](const std::vector<i64>& n) {
        if (in_lambda(aux.r, aux.d, n)) collect_value(evaluate(aux.h_d, std::span<const i64>(n)), N, values);
    });
    std::ostringstream os;
    os << "h_d(Lambda_d): h_d=" << to_string(aux.h_d) << " d=" << aux.d << " r_d=(";
    for (std::size_t i = 0; i < aux.r.size(); ++i) os << (i ? "," : "") << aux.r[i];
    os << ") box=[1," << box << "]^" << aux.h_d.nvars();
    return make_difference_set(std::move(values), N, os.str());
}

DifferenceSet build_difference_set_unrestricted(const MultiPoly& h, i64 box, u64 N, u64 point_cap) {
    std::vector<u64> values;
    for_each_box_point(h.nvars(), -box, box, point_cap, [&](const std::vector<i64>& n) {
        collect_value(evaluate(h, std::span<const i64>(n)), N, values);
    });
    std::ostringstream os;
    os << "h(Z^l): h=" << to_string(h) << " box=[-" << box << "," << box << "]^" << h.nvars();
    return make_difference_set(std::move(values), N, os.str());
}

std::string to_string(SolveMethod m) {
    switch (m) {
        case SolveMethod::Exhaustive: return "exhaustive";
        case SolveMethod::BranchAndBound: return "branch-and-bound";
        case SolveMethod::GreedyLowerBound: return "greedy-lower-bound";
    }
    return "unknown";
}

bool is_difference_free(const std::vector<u64>& A, const std::vector<u64>& X) {
    std::vector<u64> xs(X);
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i < A.size(); ++i) {
        for (std::size_t j = 0; j < A.size(); ++j) {
            if (A[j] > A[i] && std::binary_search(xs.begin(), xs.end(), A[j] - A[i])) return false;
        }
    }
    return true;
}

FreeSetResult free_subset_exhaustive(const DifferenceSet& X) {
    if (X.N > 26) throw SearchCapExceeded("exhaustive search needs N <= 26");
    FreeSetResult res;
    res.N = X.N;
    res.X = X.X;
    res.method = SolveMethod::Exhaustive;
    const u64 full = u64{1} << X.N;
    u64 best_mask = 0;
    int best = -1;
    for (u64 mask = 0; mask < full; ++mask) {
        int c = std::popcount(mask);
        if (c <= best) continue;
        bool ok = true;
        for (u64 x : X.X) {
            if (mask & (mask >> x)) {
                ok = false;
                break;
            }
        }
        if (ok) {
            best = c;
            best_mask = mask;
        }
    }
    res.nodes = full;
    res.size = static_cast<u64>(best);
    for (u64 i = 0; i < X.N; ++i) {
        if (best_mask >> i & 1) res.witness.push_back(i + 1);
    }
    return res;
}

FreeSetResult free_subset_greedy(const DifferenceSet& X) {
    FreeSetResult res;
    res.N = X.N;
    res.X = X.X;
    res.method = SolveMethod::GreedyLowerBound;
    std::vector<char> forbidden(X.N + 1, 0);
    for (u64 i = 1; i <= X.N; ++i) {
        if (forbidden[i]) continue;
        res.witness.push_back(i);
        for (u64 x : X.X) {
            if (i + x <= X.N) forbidden[i + x] = 1;
        }
    }
    res.size = res.witness.size();
    return res;
}

namespace {

using Bits = std::bitset<kBranchBoundMaxN + 1>;

struct BranchBound {
    const std::vector<u64>& X;
    const std::vector<u64>& D;  // D[m] for m < n
    u64 n = 0;
    u64 target = 0;
    u64 nodes = 0;
    u64 node_cap = 0;
    bool capped = false;
    Bits range;  // positions 1..n
    std::vector<u64> chosen;

    BranchBound(const std::vector<u64>& x, const std::vector<u64>& d) : X(x), D(d) {}

    // Decides positions i..n given the forbidden set.
    bool search(u64 i, const Bits& forbidden) {
        if (++nodes > node_cap) {
            capped = true;
            return false;
        }
        if (forbidden[n]) return false;
        if (chosen.size() == target) return true;
        while (i <= n && forbidden[i]) ++i;
        if (i > n) return false;
        Bits rest = range & ~forbidden;
        rest >>= i;
        rest <<= i;
        u64 bound = std::min<u64>(rest.count(), D[n - i + 1]);
        if (chosen.size() + bound < target) return false;

        Bits next = forbidden;
        for (u64 x : X) {
            if (i + x <= n) next.set(i + x);
        }
        chosen.push_back(i);
        if (search(i + 1, next)) return true;
        chosen.pop_back();
        if (capped) return false;
        if (i == n) return false;  // n must be chosen
        Bits skip = forbidden;
        skip.set(i);
        return search(i + 1, skip);
    }
};

}  // namespace

FreeSetResult free_subset_branch_bound(const DifferenceSet& X, u64 node_cap) {
    if (X.N > kBranchBoundMaxN) {
        auto g = free_subset_greedy(X);
        return g;
    }
    FreeSetResult res;
    res.N = X.N;
    res.X = X.X;
    res.method = SolveMethod::BranchAndBound;

    std::vector<u64> D(X.N + 1, 0);
    std::vector<u64> witness;
    D[1] = 1;
    witness = {1};
    u64 nodes = 0;
    for (u64 n = 2; n <= X.N; ++n) {
        std::vector<u64> Xn;
        for (u64 x : X.X) {
            if (x < n) Xn.push_back(x);
        }
        BranchBound bb(Xn, D);
        bb.n = n;
        bb.target = D[n - 1] + 1;
        bb.node_cap = node_cap - std::min(node_cap, nodes);
        for (u64 i = 1; i <= n; ++i) bb.range.set(i);
        Bits forbidden;
        for (u64 x : Xn) forbidden.set(1 + x);
        bb.chosen.push_back(1);
        bool found = bb.target == 1 || bb.search(2, forbidden);
        nodes += bb.nodes;
        if (bb.capped) {
            auto g = free_subset_greedy(X);
            if (g.size < witness.size()) {
                g.size = witness.size();
                g.witness = witness;
            }
            g.nodes = nodes;
            return g;
        }
        if (found) {
            D[n] = D[n - 1] + 1;
            witness = bb.chosen;
        } else {
            D[n] = D[n - 1];
        }
    }
    res.size = D[X.N];
    res.witness = witness;
    res.nodes = nodes;
    if (!is_difference_free(res.witness, res.X) || res.witness.size() != res.size) {
        throw Error("branch and bound produced an invalid witness");
    }
    return res;
}

FreeSetResult max_free_subset(const DifferenceSet& X, u64 node_cap) {
    FreeSetResult res = X.N <= kExhaustiveMaxN ? free_subset_exhaustive(X) : free_subset_branch_bound(X, node_cap);
    if (!is_difference_free(res.witness, res.X)) throw Error("witness is not difference-free");
    return res;
}

std::vector<DTableRow> d_table(const AuxPoly& aux, const std::vector<u64>& Ns, i64 box, u64 node_cap) {
    std::vector<DTableRow> rows;
    for (u64 N : Ns) {
        auto X = build_difference_set(aux, box, N);
        auto r = max_free_subset(X, node_cap);
        rows.push_back({N, r.size, static_cast<double>(r.size) / static_cast<double>(N), r.method, X.X.size()});
    }
    return rows;
}

std::vector<double> balanced_function(const std::vector<u64>& A, u64 L) {
    if (L == 0) throw Error("L must be positive");
    std::vector<double> f(L, 0.0);
    std::vector<char> in(L + 1, 0);
    u64 size = 0;
    for (u64 a : A) {
        if (a < 1 || a > L) throw Error("A must lie in [1, L]");
        if (!in[a]) ++size;
        in[a] = 1;
    }
    double delta = static_cast<double>(size) / static_cast<double>(L);
    for (u64 x = 1; x <= L; ++x) f[x - 1] = (in[x] ? 1.0 : 0.0) - delta;
    return f;
}

double fourier_mass(const std::vector<u64>& A, u64 L, u64 q, double gamma) {
    if (q == 0) throw Error("q must be positive");
    if (!(gamma > 0.0)) throw Error("gamma must be positive");
    auto f = balanced_function(A, L);
    auto R = [&](u64 k) {
        CompensatedSum<double> s;
        for (u64 x = 0; x + k < L; ++x) s.add(f[x] * f[x + k]);
        return s.value();
    };
    double r0 = R(0);
    if (2.0 * gamma * static_cast<double>(q) >= 1.0) return r0;
    CompensatedSum<double> mass;
    mass.add(2.0 * gamma * static_cast<double>(q) * r0);
    for (u64 k = q; k < L; k += q) {
        double kd = static_cast<double>(k);
        mass.add(2.0 * R(k) * static_cast<double>(q) * std::sin(2.0 * std::numbers::pi * kd * gamma) /
                 (std::numbers::pi * kd));
    }
    return mass.value();
}

CountIdentityReport count_identity_check(const std::vector<u64>& A, u64 L, const SieveProfile& prof, i64 M) {
    CountIdentityReport rep;
    auto f = balanced_function(A, L);
    std::vector<char> in(L + 1, 0);
    for (u64 a : A) in[a] = 1;
    u64 size = static_cast<u64>(std::count(in.begin(), in.end(), 1));
    rep.delta = static_cast<double>(size) / static_cast<double>(L);
    NuBox box = nu_box(prof, M);
    rep.T = box.total;
    rep.scale = rep.delta * rep.delta * static_cast<double>(L) * rep.T;

    CompensatedSum<double> lhs;
    i64 maxh = 0;
    i64 Li = static_cast<i64>(L);
    for (std::size_t k = 0; k < box.points.size(); ++k) {
        if (!box.h[k].fits_slong_p()) throw SearchCapExceeded("h_d value exceeds 64 bits");
        i64 h = box.h[k].get_si();
        maxh = std::max(maxh, h < 0 ? -h : h);
        CompensatedSum<double> inner;
        for (i64 x = std::max<i64>(1, 1 - h); x <= std::min(Li, Li - h); ++x) inner.add(f[x - 1] * f[x + h - 1]);
        lhs.add(box.nu[k] * inner.value());
    }
    rep.lhs = lhs.value();

    // The integrand is a trigonometric polynomial with frequencies in [-(L + maxh), L + maxh],
    // so the mean over K > 2 (L + maxh) equally spaced nodes is exact.
    u64 K = 8 * (L + static_cast<u64>(maxh));
    rep.grid = K;
    CompensatedSum<double> rhs;
    for (u64 j = 0; j < K; ++j) {
        CompensatedSum<cplx> fh;
        for (u64 x = 1; x <= L; ++x) {
            u64 num = mul_mod(x % K, j, K);
            fh.add(f[x - 1] * unit_phase_exact((K - num) % K, K));
        }
        cplx s = S_alpha(box, FreqPoint::rational(static_cast<i64>(j), K));
        rhs.add(std::norm(fh.value()) * s.real());
    }
    rep.rhs = rhs.value() / static_cast<double>(K);
    rep.diff = std::abs(rep.lhs - rep.rhs);
    return rep;
}

IncrementReport increment_step(const std::vector<u64>& A, u64 L, u64 q, double gamma, std::optional<double> theta) {
    IncrementReport rep;
    if (q == 0) throw Error("q must be positive");
    std::vector<char> in(L + 1, 0);
    for (u64 a : A) {
        if (a < 1 || a > L) throw Error("A must lie in [1, L]");
        in[a] = 1;
    }
    u64 size = static_cast<u64>(std::count(in.begin(), in.end(), 1));
    rep.delta = static_cast<double>(size) / static_cast<double>(L);
    rep.mass = fourier_mass(A, L, q, gamma);
    double d2L = rep.delta * rep.delta * static_cast<double>(L);
    if (theta) {
        if (!(*theta > 0.0 && *theta <= 1.0)) throw Error("theta must lie in (0, 1]");
        rep.theta = *theta;
    } else {
        rep.theta = d2L > 0.0 ? std::min(1.0, rep.mass / d2L) : 0.0;
    }
    rep.required = rep.theta * d2L;
    rep.hypothesis_met = size > 0 && rep.theta > 0.0 && rep.mass >= rep.required * (1.0 - 1e-12);
    rep.target = (1.0 + rep.theta / 32.0) * rep.delta;
    if (!rep.hypothesis_met) return rep;

    double span = std::min(rep.theta * static_cast<double>(L), 1.0 / gamma) / static_cast<double>(q);
    u64 max_len = (L - 1) / q + 1;
    rep.base_length = std::clamp<u64>(static_cast<u64>(std::floor(span)), 1, max_len);

    double best_density = -1.0;
    for (unsigned j = 0; j <= 4; ++j) {
        u64 len = rep.base_length >> j;
        if (len == 0) break;
        if (!rep.lengths_searched.empty() && rep.lengths_searched.back() == len) continue;
        rep.lengths_searched.push_back(len);
        // First element s = x + q runs over [1, L - (len - 1) q].
        u64 last_start = L - (len - 1) * q;
        for (u64 s = 1; s <= last_start; ++s) {
            u64 hits = 0;
            for (u64 a = 0; a < len; ++a) hits += in[s + a * q];
            double dens = static_cast<double>(hits) / static_cast<double>(len);
            if (dens > best_density) {
                best_density = dens;
                rep.progression = Progression{static_cast<i64>(s) - static_cast<i64>(q), q, len};
                rep.hits = hits;
                rep.density = dens;
            }
        }
    }
    rep.conclusion_holds = rep.progression && rep.density >= rep.target;
    return rep;
}

}  // namespace primediff
