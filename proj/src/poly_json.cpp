#include "primediff/poly_json.hpp"

#include "primediff/error.hpp"

namespace primediff {

nlohmann::json poly_to_json(const MultiPoly& h) {
    nlohmann::json terms = nlohmann::json::array();
    for (auto it = h.terms().rbegin(); it != h.terms().rend(); ++it) {
        terms.push_back({{"e", it->first}, {"c", it->second.get_str()}});
    }
    return {{"nvars", h.nvars()}, {"terms", terms}};
}

MultiPoly poly_from_json(const nlohmann::json& j) {
    try {
        std::size_t nvars = j.at("nvars").get<std::size_t>();
        MultiPoly h(nvars);
        for (const auto& t : j.at("terms")) {
            Exponent e = t.at("e").get<Exponent>();
            if (e.size() != nvars) throw DimensionMismatch("term exponent length != nvars");
            const auto& c = t.at("c");
            mpz_class coeff = c.is_string() ? mpz_class(c.get<std::string>()) : mpz_class(c.get<long>());
            if (coeff == 0) throw ParseError("zero coefficient stored in polynomial JSON");
            h.add_term(e, coeff);
        }
        return h;
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("bad polynomial JSON: ") + ex.what());
    } catch (const std::invalid_argument&) {
        throw ParseError("bad coefficient string in polynomial JSON");
    }
}

MultiPoly poly_from_any(const nlohmann::json& j, std::size_t min_nvars) {
    if (j.is_string()) return parse_poly(j.get<std::string>(), min_nvars);
    return poly_from_json(j);
}

MultiPoly poly_from_arg(const std::string& arg, std::size_t min_nvars) {
    auto first = arg.find_first_not_of(" \t\n");
    if (first != std::string::npos && arg[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(arg);
        } catch (const nlohmann::json::exception& ex) {
            throw ParseError(std::string("bad polynomial JSON: ") + ex.what());
        }
        return poly_from_json(j);
    }
    return parse_poly(arg, min_nvars);
}

}  // namespace primediff
