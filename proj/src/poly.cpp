#include "primediff/poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "primediff/error.hpp"

namespace primediff {

unsigned total_degree(const Exponent& e) {
    unsigned s = 0;
    for (unsigned x : e) s += x;
    return s;
}

bool GrlexLess::operator()(const Exponent& a, const Exponent& b) const {
    unsigned da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    return a < b;
}

MultiPoly::MultiPoly(std::size_t nvars) : nvars_(nvars) {
    if (nvars == 0) throw DimensionMismatch("polynomial needs at least one variable");
}

MultiPoly MultiPoly::constant(std::size_t nvars, const mpz_class& c) {
    MultiPoly p(nvars);
    p.add_term(Exponent(nvars, 0), c);
    return p;
}

MultiPoly MultiPoly::variable(std::size_t nvars, std::size_t index) {
    if (index >= nvars) throw DimensionMismatch("variable index out of range");
    Exponent e(nvars, 0);
    e[index] = 1;
    return monomial(std::move(e), 1);
}

MultiPoly MultiPoly::monomial(Exponent e, const mpz_class& c) {
    MultiPoly p(e.size());
    p.add_term(e, c);
    return p;
}

std::optional<unsigned> MultiPoly::degree() const {
    if (terms_.empty()) return std::nullopt;
    return total_degree(terms_.rbegin()->first);
}

std::optional<unsigned> MultiPoly::low_degree() const {
    if (terms_.empty()) return std::nullopt;
    return total_degree(terms_.begin()->first);
}

unsigned MultiPoly::degree_in(std::size_t var) const {
    unsigned d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
    return d;
}

mpz_class MultiPoly::coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? mpz_class(0) : it->second;
}

bool MultiPoly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && total_degree(terms_.begin()->first) == 0);
}

void MultiPoly::add_term(const Exponent& e, const mpz_class& c) {
    if (e.size() != nvars_) throw DimensionMismatch("exponent length != nvars");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

void MultiPoly::check_same_dim(const MultiPoly& o) const {
    if (o.nvars_ != nvars_) throw DimensionMismatch("polynomials have different nvars");
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
    check_same_dim(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
    check_same_dim(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

MultiPoly& MultiPoly::operator*=(const mpz_class& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, v] : terms_) v *= c;
    return *this;
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly r = *this;
    for (auto& [e, v] : r.terms_) v = -v;
    return r;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    a.check_same_dim(b);
    MultiPoly r(a.nvars_);
    Exponent e(a.nvars_);
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            r.add_term(e, ca * cb);
        }
    }
    return r;
}

MultiPoly pow(const MultiPoly& base, unsigned exp) {
    MultiPoly result = MultiPoly::constant(base.nvars(), 1);
    MultiPoly b = base;
    while (exp) {
        if (exp & 1) result = result * b;
        exp >>= 1;
        if (exp) b = b * b;
    }
    return result;
}

mpz_class evaluate(const MultiPoly& h, std::span<const mpz_class> x) {
    if (x.size() != h.nvars()) throw DimensionMismatch("evaluation point has wrong length");
    mpz_class total = 0, term, pw;
    for (const auto& [e, c] : h.terms()) {
        term = c;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            mpz_pow_ui(pw.get_mpz_t(), x[i].get_mpz_t(), e[i]);
            term *= pw;
        }
        total += term;
    }
    return total;
}

mpz_class evaluate(const MultiPoly& h, std::span<const i64> x) {
    std::vector<mpz_class> big(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) big[i] = mpz_class(static_cast<long>(x[i]));
    return evaluate(h, std::span<const mpz_class>(big));
}

MultiPoly shift_scale(const MultiPoly& h, std::span<const mpz_class> r, const mpz_class& d) {
    if (r.size() != h.nvars()) throw DimensionMismatch("shift vector has wrong length");
    MultiPoly current = h;
    for (std::size_t var = 0; var < h.nvars(); ++var) {
        unsigned kmax = current.degree_in(var);
        std::vector<mpz_class> rpow(kmax + 1), dpow(kmax + 1);
        rpow[0] = 1;
        dpow[0] = 1;
        for (unsigned i = 1; i <= kmax; ++i) {
            rpow[i] = rpow[i - 1] * r[var];
            dpow[i] = dpow[i - 1] * d;
        }
        MultiPoly next(h.nvars());
        mpz_class binom;
        for (const auto& [e, c] : current.terms()) {
            unsigned k = e[var];
            Exponent ne = e;
            for (unsigned i = 0; i <= k; ++i) {
                mpz_bin_uiui(binom.get_mpz_t(), k, i);
                ne[var] = i;
                next.add_term(ne, c * binom * rpow[k - i] * dpow[i]);
            }
        }
        current = std::move(next);
    }
    return current;
}

MultiPoly shift_scale(const MultiPoly& h, std::span<const i64> r, i64 d) {
    std::vector<mpz_class> big(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) big[i] = mpz_class(static_cast<long>(r[i]));
    return shift_scale(h, std::span<const mpz_class>(big), mpz_class(static_cast<long>(d)));
}

MultiPoly homogeneous_part(const MultiPoly& h, unsigned i) {
    MultiPoly r(h.nvars());
    for (const auto& [e, c] : h.terms()) {
        if (total_degree(e) == i) r.add_term(e, c);
    }
    return r;
}

bool is_homogeneous(const MultiPoly& h) {
    return h.is_zero() || *h.degree() == *h.low_degree();
}

MultiPoly partial(const MultiPoly& h, std::size_t var) {
    if (var >= h.nvars()) throw DimensionMismatch("variable index out of range");
    MultiPoly r(h.nvars());
    for (const auto& [e, c] : h.terms()) {
        if (e[var] == 0) continue;
        Exponent ne = e;
        --ne[var];
        r.add_term(ne, c * e[var]);
    }
    return r;
}

std::vector<MultiPoly> gradient(const MultiPoly& h) {
    std::vector<MultiPoly> g;
    g.reserve(h.nvars());
    for (std::size_t i = 0; i < h.nvars(); ++i) g.push_back(partial(h, i));
    return g;
}

mpz_class content(const MultiPoly& h) {
    mpz_class g = 0;
    for (const auto& [e, c] : h.terms()) {
        if (total_degree(e) == 0) continue;
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    }
    return g;
}

MultiPoly divide_exact(const MultiPoly& h, const mpz_class& m) {
    if (m < 1) throw Error("divide_exact requires a positive divisor");
    MultiPoly r(h.nvars());
    mpz_class q;
    for (const auto& [e, c] : h.terms()) {
        if (!mpz_divisible_p(c.get_mpz_t(), m.get_mpz_t())) throw NotDivisible(c.get_str(), m.get_str());
        mpz_divexact(q.get_mpz_t(), c.get_mpz_t(), m.get_mpz_t());
        r.add_term(e, q);
    }
    return r;
}

MultiPoly reduce_mod(const MultiPoly& h, const mpz_class& m) {
    if (m < 2) throw Error("reduce_mod requires modulus >= 2");
    MultiPoly r(h.nvars());
    mpz_class v;
    for (const auto& [e, c] : h.terms()) {
        mpz_fdiv_r(v.get_mpz_t(), c.get_mpz_t(), m.get_mpz_t());
        r.add_term(e, v);
    }
    return r;
}

mpz_class coefficient_norm(const MultiPoly& h) {
    mpz_class s = 0;
    for (const auto& [e, c] : h.terms()) s += abs(c);
    return s;
}

std::string to_string(const MultiPoly& h) {
    if (h.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = h.terms().rbegin(); it != h.terms().rend(); ++it) {
        const auto& [e, c] = *it;
        bool negative = c < 0;
        mpz_class mag = abs(c);
        if (first) {
            if (negative) os << '-';
        } else {
            os << (negative ? " - " : " + ");
        }
        first = false;
        bool constant = total_degree(e) == 0;
        bool wrote = false;
        if (mag != 1 || constant) {
            os << mag.get_str();
            wrote = true;
        }
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (wrote) os << '*';
            os << 'x' << (i + 1);
            if (e[i] > 1) os << '^' << e[i];
            wrote = true;
        }
    }
    return os.str();
}

namespace {

struct Token {
    enum Kind { Number, Var, Op, LParen, RParen, End } kind;
    std::string text;
    std::size_t var = 0;
};

std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char ch = s[i];
        if (std::isspace(static_cast<unsigned char>(ch))) {
            ++i;
        } else if (std::isdigit(static_cast<unsigned char>(ch))) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            out.push_back({Token::Number, s.substr(i, j - i)});
            i = j;
        } else if (ch == 'x' || ch == 'y' || ch == 'z' || ch == 'w') {
            std::size_t j = i + 1;
            if (j < s.size() && s[j] == '_') ++j;
            std::size_t k = j;
            while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
            Token t{Token::Var, s.substr(i, k - i)};
            if (ch == 'x' && k > j) {
                unsigned long idx = std::stoul(s.substr(j, k - j));
                if (idx == 0) throw ParseError("variables are numbered from x1");
                t.var = idx - 1;
                i = k;
            } else {
                t.var = ch == 'x' ? 0 : ch == 'y' ? 1 : ch == 'z' ? 2 : 3;
                i = i + 1;
            }
            out.push_back(t);
        } else if (ch == '+' || ch == '-' || ch == '*' || ch == '^') {
            out.push_back({Token::Op, std::string(1, ch)});
            ++i;
        } else if (ch == '(') {
            out.push_back({Token::LParen, "("});
            ++i;
        } else if (ch == ')') {
            out.push_back({Token::RParen, ")"});
            ++i;
        } else {
            throw ParseError(std::string("unexpected character '") + ch + "' in polynomial");
        }
    }
    out.push_back({Token::End, ""});
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> toks, std::size_t nvars) : toks_(std::move(toks)), nvars_(nvars) {}

    MultiPoly parse() {
        MultiPoly r = expr();
        if (peek().kind != Token::End) throw ParseError("trailing input near '" + peek().text + "'");
        return r;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    bool is_op(char c) const { return peek().kind == Token::Op && peek().text[0] == c; }

    MultiPoly expr() {
        MultiPoly r = term();
        while (is_op('+') || is_op('-')) {
            bool minus = is_op('-');
            ++pos_;
            MultiPoly t = term();
            if (minus) r -= t;
            else r += t;
        }
        return r;
    }

    bool starts_primary() const {
        auto k = peek().kind;
        return k == Token::Number || k == Token::Var || k == Token::LParen;
    }

    MultiPoly term() {
        MultiPoly r = unary();
        while (true) {
            if (is_op('*')) {
                ++pos_;
                r = r * unary();
            } else if (starts_primary()) {
                r = r * power();
            } else {
                break;
            }
        }
        return r;
    }

    MultiPoly unary() {
        if (is_op('-')) {
            ++pos_;
            return -unary();
        }
        if (is_op('+')) {
            ++pos_;
            return unary();
        }
        return power();
    }

    MultiPoly power() {
        MultiPoly base = primary();
        if (is_op('^')) {
            ++pos_;
            if (peek().kind != Token::Number) throw ParseError("exponent must be a nonnegative integer");
            unsigned long e = std::stoul(peek().text);
            ++pos_;
            return pow(base, static_cast<unsigned>(e));
        }
        return base;
    }

    MultiPoly primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Token::Number: {
                ++pos_;
                return MultiPoly::constant(nvars_, mpz_class(t.text));
            }
            case Token::Var: {
                ++pos_;
                return MultiPoly::variable(nvars_, t.var);
            }
            case Token::LParen: {
                ++pos_;
                MultiPoly r = expr();
                if (peek().kind != Token::RParen) throw ParseError("missing ')'");
                ++pos_;
                return r;
            }
            default:
                throw ParseError("unexpected token '" + t.text + "'");
        }
    }

    std::vector<Token> toks_;
    std::size_t nvars_;
    std::size_t pos_ = 0;
};

}  // namespace

MultiPoly parse_poly(const std::string& text, std::size_t min_nvars) {
    auto toks = tokenize(text);
    std::size_t nvars = std::max<std::size_t>(1, min_nvars);
    for (const auto& t : toks) {
        if (t.kind == Token::Var) nvars = std::max(nvars, t.var + 1);
    }
    return Parser(std::move(toks), nvars).parse();
}

ModPoly::ModPoly(const MultiPoly& h, u64 modulus)
    : modulus_(modulus), nvars_(h.nvars()), max_exp_(h.nvars(), 0) {
    for (const auto& [e, c] : h.terms()) {
        u64 r = reduce_mpz(c, modulus);
        if (r == 0) continue;
        terms_.push_back({r, e});
        for (std::size_t i = 0; i < e.size(); ++i) max_exp_[i] = std::max(max_exp_[i], e[i]);
    }
}

u64 ModPoly::operator()(std::span<const u64> x) const {
    if (x.size() != nvars_) throw DimensionMismatch("evaluation point has wrong length");
    // powers[i][k] = x_i^k mod m
    thread_local std::vector<std::vector<u64>> powers;
    powers.resize(nvars_);
    for (std::size_t i = 0; i < nvars_; ++i) {
        auto& pw = powers[i];
        pw.resize(max_exp_[i] + 1);
        pw[0] = 1 % modulus_;
        u64 xi = x[i] % modulus_;
        for (unsigned k = 1; k <= max_exp_[i]; ++k) pw[k] = mul_mod(pw[k - 1], xi, modulus_);
    }
    u64 acc = 0;
    for (const auto& t : terms_) {
        u64 v = t.coeff;
        for (std::size_t i = 0; i < nvars_; ++i) {
            if (t.exps[i]) v = mul_mod(v, powers[i][t.exps[i]], modulus_);
        }
        acc = add_mod(acc, v, modulus_);
    }
    return acc;
}

IntEvaluator::IntEvaluator(const MultiPoly& h) : poly_(h) {
    for (const auto& [e, c] : h.terms()) {
        if (mpz_sizeinbase(c.get_mpz_t(), 2) > 120) {
            fits_ = false;
            terms_.clear();
            return;
        }
        // Build the i128 coefficient from its decimal form.
        std::string s = c.get_str();
        bool neg = s[0] == '-';
        i128 v = 0;
        for (std::size_t i = neg ? 1 : 0; i < s.size(); ++i) v = v * 10 + (s[i] - '0');
        terms_.push_back({neg ? -v : v, e});
    }
}

std::optional<i128> IntEvaluator::operator()(std::span<const i64> x) const {
    if (x.size() != poly_.nvars()) throw DimensionMismatch("evaluation point has wrong length");
    if (!fits_) return std::nullopt;
    i128 acc = 0;
    for (const auto& t : terms_) {
        i128 v = t.coeff;
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (unsigned k = 0; k < t.exps[i]; ++k) {
                if (__builtin_mul_overflow(v, static_cast<i128>(x[i]), &v)) return std::nullopt;
            }
        }
        if (__builtin_add_overflow(acc, v, &acc)) return std::nullopt;
    }
    return acc;
}

}  // namespace primediff
