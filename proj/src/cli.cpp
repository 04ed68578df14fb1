#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "primediff/cli.hpp"
#include "primediff/error.hpp"
#include "primediff/extremal.hpp"
#include "primediff/poly_json.hpp"
#include "primediff/primes.hpp"

namespace primediff {

namespace {

using nlohmann::json;

class InvariantViolation : public Error {
public:
    using Error::Error;
};

json poly_json(const MultiPoly& h) { return json{{"text", to_string(h)}, {"json", poly_to_json(h)}}; }

json complex_json(cplx z) {
    return json{{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}, {"arg", std::arg(z)}};
}

json root_json(const PAdicRoot& r) {
    json j{{"p", r.p},
           {"precision", r.precision},
           {"value", r.value},
           {"basis", to_string(r.basis)},
           {"unit_coords", r.unit_coords}};
    if (r.basis == PAdicRoot::Basis::Hensel) j["gamma"] = r.gamma;
    if (r.basis == PAdicRoot::Basis::Exact) j["exact"] = r.exact;
    j["multiplicity"] = r.multiplicity ? json(*r.multiplicity) : json(nullptr);
    return j;
}

json choice_json(const RootChoice& c) {
    json roots = json::array();
    for (const auto& [p, r] : c.roots()) roots.push_back(root_json(r));
    return json{{"mode", to_string(c.mode())}, {"roots", roots}};
}

std::string rational_str(const mpq_class& q) {
    mpq_class c = q;
    c.canonicalize();
    return c.get_str();
}

mpq_class parse_rational(const std::string& s) {
    mpq_class q;
    std::string t = s;
    auto dot = t.find('.');
    if (dot != std::string::npos) {
        // Decimal literal: exact conversion of the written digits.
        bool neg = !t.empty() && t[0] == '-';
        std::string digits = t.substr(neg ? 1 : 0);
        dot = digits.find('.');
        std::string whole = digits.substr(0, dot), frac = digits.substr(dot + 1);
        if ((whole + frac).empty() || (whole + frac).find_first_not_of("0123456789") != std::string::npos) {
            throw ParseError("bad rational '" + s + "'");
        }
        mpz_class num(whole + frac, 10), den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
        q = mpq_class(neg ? mpz_class(-num) : num, den);
    } else {
        if (q.set_str(t, 10) != 0) throw ParseError("bad rational '" + s + "'");
    }
    q.canonicalize();
    return q;
}

FreqPoint parse_freq(const std::string& s) {
    mpq_class q = parse_rational(s);
    mpz_class den = q.get_den();
    if (den.fits_ulong_p() && den <= mpz_class(1'000'000'000UL)) {
        mpz_class num = q.get_num();
        mpz_class r;
        mpz_fdiv_r(r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        return FreqPoint::rational(static_cast<i64>(r.get_si()), den.get_ui());
    }
    return FreqPoint::real(q.get_d());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// A JSON array, or whitespace/comma separated tokens.
std::vector<std::string> read_tokens(const std::string& path) {
    std::string text = read_file(path);
    std::vector<std::string> out;
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
        json j = json::parse(text);
        for (const auto& v : j) out.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        return out;
    }
    for (char& ch : text) {
        if (ch == ',') ch = ' ';
    }
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

std::vector<u64> read_integers(const std::string& path) {
    std::vector<u64> out;
    for (const auto& t : read_tokens(path)) {
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(t, &pos);
        } catch (const std::exception&) {
            throw ParseError("not an integer: '" + t + "'");
        }
        if (pos != t.size() || v < 1) throw ParseError("expected a positive integer, got '" + t + "'");
        out.push_back(static_cast<u64>(v));
    }
    return out;
}

std::vector<unsigned> parse_uint_list(const std::string& s) {
    std::vector<unsigned> out;
    std::string t = s;
    for (char& ch : t) {
        if (ch == ',') ch = ' ';
    }
    std::istringstream is(t);
    long long v;
    while (is >> v) {
        if (v < 0) throw ParseError("negative truncation level");
        out.push_back(static_cast<unsigned>(v));
    }
    if (!is.eof()) throw ParseError("bad integer list '" + s + "'");
    return out;
}

u64 largest_prime_factor(u64 d) {
    u64 best = 1;
    for (auto [p, e] : factorize(d)) best = std::max(best, p);
    return best;
}

json certificate_json(const Certificate& c) {
    json j{{"p", c.p}, {"status", to_string(c.status)}, {"depth", c.depth}, {"reason", c.reason}};
    j["root"] = c.root ? root_json(*c.root) : json(nullptr);
    return j;
}

json verdict_json(const DeligneVerdict& v) {
    json j{{"status", to_string(v.status)},
           {"deligne", v.deligne()},
           {"k", v.k},
           {"smooth", v.smooth.smooth},
           {"ext_checked", v.smooth.ext_checked}};
    if (v.smooth.witness) {
        const auto& w = *v.smooth.witness;
        j["witness"] = json{{"p", w.p}, {"m", w.m}, {"modulus", w.modulus}, {"coords", w.coords}};
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

json criterion_json(const CriterionResult& r) {
    return json{{"status", to_string(r.status)}, {"evidence", r.evidence}};
}

json profile_json(const SieveProfile& prof) {
    json primes = json::array();
    for (const auto& sp : prof.primes) {
        primes.push_back(
            json{{"p", sp.p}, {"gamma", sp.gamma}, {"j", sp.j}, {"J_size", sp.J_size}, {"eps", sp.eps}});
    }
    return json{{"d", prof.d},
                {"Y", prof.Y},
                {"r_d", prof.r},
                {"lambda", prof.lambda.get_str()},
                {"h_d", poly_json(prof.h_d)},
                {"primes", primes},
                {"w_d", rational_str(prof.w_exact)},
                {"w_d_float", prof.w}};
}

struct Context {
    RunConfig config;
    std::optional<MultiPoly> poly;
    std::optional<RootChoice> choice;
    std::ostream* out;
    std::ostream* err;

    SearchLimits limits() const { return SearchLimits{config.tree_width, config.work}; }
    GammaOptions gamma_options() const { return GammaOptions{std::nullopt, config.class_cap}; }

    void emit(const std::string& command, json result) const {
        json prov{{"config_hash", config_hash(config)}, {"version", kVersion}, {"seed", config.seed}};
        prov["polynomial"] = poly ? json(to_string(*poly)) : json(nullptr);
        prov["root_choice"] = choice ? choice_json(*choice) : json(nullptr);
        json j{{"command", command}, {"provenance", prov}, {"result", std::move(result)}};
        *out << j.dump(2) << "\n";
    }

    const RootChoice& certified_choice(RootMode mode, u64 p_max) {
        choice = RootChoice::certified(*poly, mode, p_max, config.depth, limits());
        return *choice;
    }
};

}  // namespace

int dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Intersective polynomials, auxiliary polynomials, sieve weights and difference-free sets",
                 "primediff"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    std::string config_path, format;
    std::optional<u64> seed, point_cap, node_cap, tree_width, work;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--format", format, "json or csv");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--point-cap", point_cap, "enumeration volume cap");
    app.add_option("--node-cap", node_cap, "branch-and-bound node cap");
    app.add_option("--tree-width", tree_width, "p-adic root tree width cap");
    app.add_option("--work", work, "evaluation budget per root search");

    std::string poly_text, mode_text = "p-intersective";
    std::optional<u64> pmax;
    std::optional<unsigned> depth, ext;
    u64 d = 1, Y = 7, p = 0, q = 1, dmax = 10, N = 0, nmax = 0, nmin = 2, step = 1, L = 0;
    i64 a = 1, box = 0, M = 0;
    double x = 0, gamma = 0;
    std::optional<double> theta;
    unsigned m = 2;
    std::string t_list = "0,1,2", weight, eps = "0", set_file, x_file, alpha;

    auto add_poly = [&](CLI::App* sub) { sub->add_option("poly", poly_text, "polynomial")->required(); };
    auto add_mode = [&](CLI::App* sub) {
        sub->add_option("--mode", mode_text, "intersective or p-intersective");
        sub->add_option("--pmax", pmax, "largest prime for root certification");
    };

    auto* classify = app.add_subcommand("classify", "certify (P-)intersectivity prime by prime");
    add_poly(classify);
    add_mode(classify);
    classify->add_option("--depth", depth, "maximum p-adic depth");

    auto* aux = app.add_subcommand("aux", "auxiliary polynomial h_d");
    aux->add_option("poly", poly_text, "polynomial");
    aux->add_option("--d", d, "scaling modulus");
    add_mode(aux);
    auto* aux_scan = aux->add_subcommand("scan", "Deligne status of h_d for d <= dmax, p <= pmax");
    add_poly(aux_scan);
    aux_scan->add_option("--dmax", dmax, "largest d");
    aux_scan->add_option("--pmax", pmax, "largest prime");
    aux_scan->add_option("--mode", mode_text, "intersective or p-intersective");
    aux_scan->add_option("--ext", ext, "extension degree cap");
    aux->require_subcommand(0, 1);

    auto* deligne = app.add_subcommand("deligne", "smoothness and Deligne checks");
    deligne->require_subcommand(1);
    auto* del_check = deligne->add_subcommand("check", "is h Deligne mod p");
    add_poly(del_check);
    del_check->add_option("--p", p, "prime")->required();
    del_check->add_option("--ext", ext, "extension degree cap");
    auto* del_crit = deligne->add_subcommand("criteria", "criteria for P-Deligne");
    add_poly(del_crit);
    del_crit->add_option("--pmax", pmax, "largest prime");
    del_crit->add_option("--ext", ext, "extension degree cap");
    del_crit->add_option("--depth", depth, "maximum p-adic depth");

    auto* primes = app.add_subcommand("primes", "prime counting");
    primes->require_subcommand(1);
    auto* psi_cmd = primes->add_subcommand("psi", "psi(x, a, q)");
    psi_cmd->add_option("--x", x, "cutoff")->required();
    psi_cmd->add_option("--a", a, "residue");
    psi_cmd->add_option("--q", q, "modulus");
    psi_cmd->add_option("--weight", weight, "univariate weight polynomial g");

    auto* sieve = app.add_subcommand("sieve", "gradient sieve");
    sieve->require_subcommand(1);
    auto* sv_profile = sieve->add_subcommand("profile", "gamma_d(p), j_d(p), w_d");
    auto* sv_sandwich = sieve->add_subcommand("sandwich", "truncated inclusion-exclusion against the exact sum");
    for (auto* sub : {sv_profile, sv_sandwich}) {
        add_poly(sub);
        add_mode(sub);
        sub->add_option("--d", d, "scaling modulus");
        sub->add_option("--Y", Y, "sieve cutoff");
    }
    sv_sandwich->add_option("--box", box, "box [1, box]^l")->required();
    sv_sandwich->add_option("--t", t_list, "truncation levels, comma separated");

    auto* expsum = app.add_subcommand("expsum", "exponential sums");
    expsum->require_subcommand(1);
    auto* ex_complete = expsum->add_subcommand("complete", "sum over F_p^l of e(g(x)/p)");
    add_poly(ex_complete);
    ex_complete->add_option("--p", p, "prime")->required();
    auto* ex_local = expsum->add_subcommand("local", "G(a, q)");
    auto* ex_salpha = expsum->add_subcommand("salpha", "S(alpha)");
    for (auto* sub : {ex_local, ex_salpha}) {
        add_poly(sub);
        add_mode(sub);
        sub->add_option("--d", d, "scaling modulus");
        sub->add_option("--Y", Y, "sieve cutoff");
    }
    ex_local->add_option("--a", a, "numerator")->required();
    ex_local->add_option("--q", q, "denominator")->required();
    ex_salpha->add_option("--alpha", alpha, "a/q or decimal")->required();
    ex_salpha->add_option("--M", M, "box [1, M]^l")->required();
    auto* ex_energy = expsum->add_subcommand("energy", "E_2m(B, eps)");
    ex_energy->add_option("--m", m, "order");
    ex_energy->add_option("--eps", eps, "torus tolerance, rational");
    ex_energy->add_option("--set", set_file, "file of rationals")->required();

    auto* extremal = app.add_subcommand("extremal", "D(X, N) and density increments");
    extremal->require_subcommand(1);
    auto* xt_dtable = extremal->add_subcommand("dtable", "D(h_d(Lambda_d), N) over a range of N");
    xt_dtable->add_option("--poly", poly_text, "polynomial")->required();
    xt_dtable->add_option("--nmax", nmax, "largest N")->required();
    xt_dtable->add_option("--nmin", nmin, "smallest N");
    xt_dtable->add_option("--step", step, "N increment");
    xt_dtable->add_option("--box", box, "input box [1, box]^l");
    xt_dtable->add_option("--d", d, "scaling modulus");
    add_mode(xt_dtable);
    auto* xt_solve = extremal->add_subcommand("solve", "D(X, N) for an explicit X");
    xt_solve->add_option("--x-file", x_file, "file of positive integers")->required();
    xt_solve->add_option("--N", N, "ambient size")->required();
    auto* xt_inc = extremal->add_subcommand("increment", "density increment step");
    xt_inc->add_option("--set-file", set_file, "file of elements of A")->required();
    xt_inc->add_option("--q", q, "step")->required();
    xt_inc->add_option("--gamma", gamma, "arc radius")->required();
    xt_inc->add_option("--L", L, "ambient interval [1, L]; default max A");
    xt_inc->add_option("--theta", theta, "theta in (0, 1]; default measured");

    auto* verify = app.add_subcommand("verify", "run the invariant suite");

    std::vector<const char*> cargv;
    for (const auto& s : argv) cargv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    Context ctx;
    ctx.out = &out;
    ctx.err = &err;
    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = config_from_json(json::parse(read_file(config_path)), cfg);
        cfg = config_from_env(cfg);
        if (!format.empty()) cfg.format = format;
        if (seed) cfg.seed = *seed;
        if (point_cap) cfg.point_cap = *point_cap;
        if (node_cap) cfg.node_cap = *node_cap;
        if (tree_width) cfg.tree_width = *tree_width;
        if (work) cfg.work = *work;
        if (pmax) cfg.p_max = *pmax;
        if (depth) cfg.depth = *depth;
        if (ext) cfg.ext_cap = *ext;
        cfg.validate();
        ctx.config = cfg;
    } catch (const json::exception& e) {
        err << "error: config: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    const RunConfig& cfg = ctx.config;

    try {
        if (!poly_text.empty()) ctx.poly = poly_from_arg(poly_text);
        RootMode mode = root_mode_from_string(mode_text);

        if (classify->parsed()) {
            auto certs = certify(*ctx.poly, mode, cfg.p_max, cfg.depth, ctx.limits());
            json list = json::array();
            bool all = true;
            for (const auto& c : certs) {
                list.push_back(certificate_json(c));
                all = all && c.status == Certificate::Status::Certified;
            }
            ctx.emit("classify", json{{"mode", to_string(mode)},
                                      {"p_max", cfg.p_max},
                                      {"depth", cfg.depth},
                                      {"certificates", list},
                                      {"all_certified", all}});
            return kExitOk;
        }

        if (aux_scan->parsed()) {
            const auto& choice = ctx.certified_choice(mode, std::max<u64>(cfg.p_max, dmax));
            auto rep = scan_strongly_deligne(choice, dmax, cfg.p_max, cfg.ext_cap);
            json bad = json::array();
            for (const auto& e : rep.entries) {
                if (!e.verdict.deligne()) {
                    bad.push_back(json{{"d", e.d}, {"p", e.p}, {"status", to_string(e.verdict.status)}});
                }
            }
            json failures = json::array();
            for (const auto& [fd, why] : rep.failures) failures.push_back(json{{"d", fd}, {"reason", why}});
            ctx.emit("aux scan", json{{"d_max", dmax},
                                      {"p_max", cfg.p_max},
                                      {"entries", rep.entries.size()},
                                      {"exceptional_primes", std::vector<u64>(rep.exceptional_primes.begin(),
                                                                              rep.exceptional_primes.end())},
                                      {"non_deligne", bad},
                                      {"failures", failures}});
            return kExitOk;
        }

        if (aux->parsed()) {
            if (!ctx.poly) throw ParseError("aux needs a polynomial");
            const auto& choice = ctx.certified_choice(mode, std::max(cfg.p_max, largest_prime_factor(d)));
            auto ad = build_aux(choice, d);
            ctx.emit("aux", json{{"d", d}, {"r_d", ad.r}, {"lambda", ad.lambda.get_str()}, {"h_d", poly_json(ad.h_d)}});
            return kExitOk;
        }

        if (del_check->parsed()) {
            auto v = is_deligne_mod(*ctx.poly, p, cfg.ext_cap, cfg.point_cap);
            if (v.smooth.witness && !witness_is_singular(homogeneous_part(*ctx.poly, v.k), *v.smooth.witness)) {
                throw InvariantViolation("reported singular witness does not re-verify");
            }
            ctx.emit("deligne check", verdict_json(v));
            return kExitOk;
        }

        if (del_crit->parsed()) {
            CriteriaOptions opt;
            opt.p_max = cfg.p_max;
            opt.depth = cfg.depth;
            opt.ext_cap = cfg.ext_cap;
            opt.limits = ctx.limits();
            auto rep = p_deligne_criteria(*ctx.poly, opt);
            json j{{"k", rep.k},
                   {"nvars", rep.nvars},
                   {"primes_certified", rep.primes_certified},
                   {"primes_not_certified", rep.primes_not_certified},
                   {"criterion_i", criterion_json(rep.criterion_i)},
                   {"criterion_ii", criterion_json(rep.criterion_ii)},
                   {"criterion_iii", criterion_json(rep.criterion_iii)},
                   {"criterion_iv", criterion_json(rep.criterion_iv)},
                   {"multiplicity_exceptions", rep.multiplicity_exceptions},
                   {"any_satisfied", rep.any_satisfied()}};
            j["deligne_prime"] = rep.deligne_prime ? json(*rep.deligne_prime) : json(nullptr);
            j["shift"] = rep.shift ? json{rep.shift->first, rep.shift->second} : json(nullptr);
            ctx.emit("deligne criteria", j);
            return kExitOk;
        }

        if (psi_cmd->parsed()) {
            PsiValue v;
            json j{{"x", x}, {"a", a}, {"q", q}};
            if (!weight.empty()) {
                MultiPoly g = poly_from_arg(weight);
                ctx.poly = g;
                v = psi_weighted(x, a, q, g);
            } else {
                v = psi(x, a, q);
            }
            j["value"] = v.value;
            j["count"] = v.count;
            ctx.emit("primes psi", j);
            return kExitOk;
        }

        auto profile_for = [&](u64 dd, u64 YY) {
            const auto& choice = ctx.certified_choice(mode, std::max({cfg.p_max, largest_prime_factor(dd)}));
            return build_profile(choice, dd, YY, ctx.gamma_options());
        };

        if (sv_profile->parsed()) {
            ctx.emit("sieve profile", profile_json(profile_for(d, Y)));
            return kExitOk;
        }

        if (sv_sandwich->parsed()) {
            auto prof = profile_for(d, Y);
            u64 side = static_cast<u64>(std::max<i64>(box, 0));
            u64 volume = 1;
            for (std::size_t i = 0; i < prof.nvars(); ++i) {
                if (side && volume > cfg.point_cap / side) throw SearchCapExceeded("sandwich box exceeds point cap");
                volume *= side;
            }
            auto rep = sieve_sum_sandwich(prof, box, parse_uint_list(t_list));
            json tr = json::array();
            for (const auto& t : rep.truncations) {
                tr.push_back(json{{"t", t.t},
                                  {"value", t.value},
                                  {"brackets", t.brackets},
                                  {"matches_direct", t.matches_direct},
                                  {"exact", t.exact}});
            }
            ctx.emit("sieve sandwich", json{{"profile", profile_json(prof)},
                                            {"box", box},
                                            {"points", rep.points},
                                            {"points_in_lambda", rep.points_in_lambda},
                                            {"weights_nonnegative", rep.weights_nonnegative},
                                            {"true_sum", rep.true_sum},
                                            {"truncations", tr},
                                            {"violations", rep.violations}});
            return rep.violations == 0 ? kExitOk : kExitInvariant;
        }

        if (ex_complete->parsed()) {
            cplx s = complete_sum(*ctx.poly, p, cfg.point_cap);
            json j = complex_json(s);
            auto v = is_deligne_mod(*ctx.poly, p, cfg.ext_cap, cfg.point_cap);
            j["deligne"] = v.deligne();
            j["deligne_bound"] = deligne_bound(v.k, ctx.poly->nvars(), p);
            ctx.emit("expsum complete", j);
            return kExitOk;
        }

        if (ex_local->parsed()) {
            auto prof = profile_for(d, Y);
            LocalSums ls(prof, q, cfg.point_cap);
            json j = complex_json(ls.G(a));
            j["a"] = a;
            j["q"] = q;
            j["terms"] = ls.terms();
            j["total_weight"] = rational_str(ls.total_weight());
            ctx.emit("expsum local", j);
            return kExitOk;
        }

        if (ex_salpha->parsed()) {
            auto prof = profile_for(d, Y);
            FreqPoint f = parse_freq(alpha);
            auto nb = nu_box(prof, M, cfg.point_cap);
            json j = complex_json(S_alpha(nb, f));
            j["alpha"] = json{{"a", f.a}, {"q", f.q}, {"beta", f.beta}};
            j["M"] = M;
            j["T"] = nb.total;
            j["admissible_points"] = nb.points.size();
            ctx.emit("expsum salpha", j);
            return kExitOk;
        }

        if (ex_energy->parsed()) {
            std::vector<mpq_class> B;
            json elems = json::array();
            for (const auto& t : read_tokens(set_file)) {
                B.push_back(parse_rational(t));
                elems.push_back(rational_str(B.back()));
            }
            mpq_class e = parse_rational(eps);
            u64 E = additive_energy(B, m, e, cfg.point_cap);
            ctx.emit("expsum energy", json{{"m", m}, {"eps", rational_str(e)}, {"set", elems}, {"energy", E}});
            return kExitOk;
        }

        auto solve = [&](const DifferenceSet& X) {
            auto r = X.N <= cfg.exhaustive_n ? free_subset_exhaustive(X) : free_subset_branch_bound(X, cfg.node_cap);
            if (!is_difference_free(r.witness, r.X)) throw InvariantViolation("witness is not difference-free");
            return r;
        };

        if (xt_dtable->parsed()) {
            if (nmax < 1 || step < 1 || nmin < 1) throw ParseError("N range must be positive");
            const auto& choice = ctx.certified_choice(mode, std::max(cfg.p_max, largest_prime_factor(d)));
            auto ad = build_aux(choice, d);
            i64 bx = box;
            if (bx <= 0) {
                double root = std::pow(static_cast<double>(cfg.point_cap), 1.0 / static_cast<double>(ad.h_d.nvars()));
                bx = static_cast<i64>(std::min<double>(static_cast<double>(nmax), std::floor(root)));
            }
            json rows = json::array();
            std::ostringstream csv;
            csv << "N,D,ratio,method,x_size\n";
            for (u64 n = nmin; n <= nmax; n += step) {
                auto X = build_difference_set(ad, bx, n, cfg.point_cap);
                auto r = solve(X);
                double ratio = static_cast<double>(r.size) / static_cast<double>(n);
                rows.push_back(json{{"N", n}, {"D", r.size}, {"ratio", ratio}, {"method", to_string(r.method)},
                                    {"x_size", X.X.size()}});
                csv << n << "," << r.size << "," << ratio << "," << to_string(r.method) << "," << X.X.size() << "\n";
            }
            if (cfg.format == "csv") {
                out << csv.str();
            } else {
                ctx.emit("extremal dtable", json{{"d", d}, {"box", bx}, {"rows", rows}});
            }
            return kExitOk;
        }

        if (xt_solve->parsed()) {
            auto X = make_difference_set(read_integers(x_file), N, "file " + x_file);
            auto r = solve(X);
            ctx.emit("extremal solve", json{{"N", N},
                                            {"X", X.X},
                                            {"D", r.size},
                                            {"witness", r.witness},
                                            {"method", to_string(r.method)},
                                            {"exact", r.exact()},
                                            {"nodes", r.nodes}});
            return kExitOk;
        }

        if (xt_inc->parsed()) {
            auto A = read_integers(set_file);
            u64 LL = L;
            for (u64 v : A) LL = std::max(LL, v);
            if (LL == 0) throw ParseError("empty set and no --L");
            auto rep = increment_step(A, LL, q, gamma, theta);
            json j{{"L", LL},
                   {"q", q},
                   {"gamma", gamma},
                   {"delta", rep.delta},
                   {"mass", rep.mass},
                   {"theta", rep.theta},
                   {"required", rep.required},
                   {"hypothesis_met", rep.hypothesis_met},
                   {"target_density", rep.target},
                   {"base_length", rep.base_length},
                   {"lengths_searched", rep.lengths_searched}};
            if (rep.progression) {
                j["progression"] = json{{"x", rep.progression->x}, {"q", rep.progression->q},
                                        {"length", rep.progression->length}};
                j["hits"] = rep.hits;
                j["density"] = rep.density;
                j["conclusion_holds"] = rep.conclusion_holds;
            } else {
                j["progression"] = nullptr;
            }
            ctx.emit("extremal increment", j);
            if (rep.hypothesis_met && !rep.conclusion_holds) return kExitInvariant;
            return kExitOk;
        }

        if (verify->parsed()) {
            auto checks = run_invariant_suite(cfg);
            json list = json::array();
            bool all = true;
            for (const auto& c : checks) {
                list.push_back(json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
                all = all && c.pass;
                if (!c.pass) err << "FAIL " << c.name << ": " << c.detail << "\n";
            }
            ctx.emit("verify", json{{"checks", list}, {"all_passed", all}});
            return all ? kExitOk : kExitInvariant;
        }
    } catch (const SearchCapExceeded& e) {
        err << "error: cap exceeded: " << e.what() << "\n";
        return kExitCap;
    } catch (const InvariantViolation& e) {
        err << "error: invariant violation: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    err << "error: no command\n";
    return kExitUsage;
}

}  // namespace primediff
