#include "primediff/primes.hpp"

#include <algorithm>
#include <cmath>

#include "primediff/error.hpp"

namespace primediff {

bool PrimeTable::contains(u64 n) const {
    return std::binary_search(primes_.begin(), primes_.end(), n);
}

PrimeTable primes_up_to(u64 x, u64 cap) {
    if (x > cap) throw SearchCapExceeded("prime limit " + std::to_string(x) + " exceeds cap " + std::to_string(cap));
    std::vector<u64> out;
    if (x < 2) return PrimeTable(x, {});

    u64 root = static_cast<u64>(std::sqrt(static_cast<double>(x)));
    while (root * root > x) --root;
    while ((root + 1) * (root + 1) <= x) ++root;

    std::vector<char> small(root + 1, 1);
    std::vector<u64> base;
    for (u64 i = 2; i <= root; ++i) {
        if (!small[i]) continue;
        base.push_back(i);
        for (u64 j = i * i; j <= root; j += i) small[j] = 0;
    }

    constexpr u64 kSegment = u64{1} << 18;
    std::vector<char> seg(kSegment);
    for (u64 lo = 2; lo <= x; lo += kSegment) {
        u64 hi = std::min(x, lo + kSegment - 1);
        std::fill(seg.begin(), seg.begin() + static_cast<std::ptrdiff_t>(hi - lo + 1), 1);
        for (u64 p : base) {
            if (p * p > hi) break;
            u64 start = std::max(p * p, (lo + p - 1) / p * p);
            for (u64 j = start; j <= hi; j += p) seg[j - lo] = 0;
        }
        for (u64 n = lo; n <= hi; ++n) {
            if (seg[n - lo]) out.push_back(n);
        }
    }
    return PrimeTable(x, std::move(out));
}

namespace {

const std::vector<bool>& prime_bitmap() {
    static const std::vector<bool> bits = [] {
        std::vector<bool> b(kPrimeBitmapLimit + 1, true);
        b[0] = b[1] = false;
        for (u64 i = 2; i * i <= kPrimeBitmapLimit; ++i) {
            if (!b[i]) continue;
            for (u64 j = i * i; j <= kPrimeBitmapLimit; j += i) b[j] = false;
        }
        return b;
    }();
    return bits;
}

u64 residue_of(i64 a, u64 q) { return reduce_signed(a, q); }

u64 floor_limit(double x) {
    if (!(x >= 0.0)) return 0;
    return static_cast<u64>(std::floor(x));
}

}  // namespace

bool is_prime(u64 n) {
    if (n <= kPrimeBitmapLimit) return prime_bitmap()[n];
    return is_prime_u64(n);
}

bool is_prime(i64 n) { return n > 1 && is_prime(static_cast<u64>(n)); }

PsiValue psi(double x, i64 a, u64 q) {
    if (q == 0) throw Error("psi requires q >= 1");
    PsiValue out;
    u64 limit = floor_limit(x);
    if (limit < 2) return out;
    u64 r = residue_of(a, q);
    for (u64 p : primes_up_to(limit).primes()) {
        if (p % q != r) continue;
        out.value += std::log(static_cast<double>(p));
        ++out.count;
    }
    return out;
}

PsiValue psi_weighted(double x, i64 a, u64 q, const MultiPoly& g) {
    if (q == 0) throw Error("psi requires q >= 1");
    if (g.nvars() != 1) throw DimensionMismatch("weight polynomial must be univariate");
    PsiValue out;
    u64 limit = floor_limit(x);
    if (limit < 2) return out;
    u64 r = residue_of(a, q);
    IntEvaluator eval(g);
    for (u64 p : primes_up_to(limit).primes()) {
        if (p % q != r) continue;
        i64 arg[1] = {static_cast<i64>(p)};
        double weight;
        if (auto v = eval(arg)) weight = static_cast<double>(*v);
        else weight = evaluate(g, std::span<const i64>(arg)).get_d();
        out.value += weight * std::log(static_cast<double>(p));
        ++out.count;
    }
    return out;
}

PsiIndex::PsiIndex(const PrimeTable& table, u64 q)
    : q_(q), limit_(table.limit()), primes_(q), cumulative_(q) {
    if (q == 0) throw Error("psi requires q >= 1");
    std::vector<double> running(q, 0.0);
    for (u64 p : table.primes()) {
        u64 r = p % q;
        running[r] += std::log(static_cast<double>(p));
        primes_[r].push_back(p);
        cumulative_[r].push_back(running[r]);
    }
}

PsiValue PsiIndex::operator()(double x, i64 a) const {
    u64 limit = floor_limit(x);
    if (limit > limit_) throw SearchCapExceeded("psi query beyond the indexed prime table");
    u64 r = residue_of(a, q_);
    const auto& ps = primes_[r];
    auto it = std::upper_bound(ps.begin(), ps.end(), limit);
    std::size_t n = static_cast<std::size_t>(it - ps.begin());
    PsiValue out;
    out.count = n;
    out.value = n ? cumulative_[r][n - 1] : 0.0;
    return out;
}

std::complex<double> psi_main_term(double x, i64 a, u64 q, const std::optional<ExceptionalCharacter>& hook) {
    double phi = static_cast<double>(euler_phi(q));
    std::complex<double> main = x / phi;
    if (hook && hook->q0 >= 1 && q % hook->q0 == 0 && !hook->chi.empty()) {
        std::complex<double> chi = hook->chi[reduce_signed(a, hook->q0) % hook->chi.size()];
        main -= chi * std::pow(x, hook->rho) / (phi * hook->rho);
    }
    return main;
}

}  // namespace primediff
