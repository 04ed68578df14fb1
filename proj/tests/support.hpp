#pragma once

#include <random>
#include <vector>

#include "primediff/poly.hpp"

namespace testsupport {

using primediff::MultiPoly;

// Random polynomial with nvars variables, total degree <= max_deg and
// coefficients in [-cmax, cmax].
inline MultiPoly random_poly(std::mt19937_64& rng, std::size_t nvars, unsigned max_deg, long cmax,
                             unsigned max_terms = 6) {
    std::uniform_int_distribution<unsigned> nterms(1, max_terms);
    std::uniform_int_distribution<long> coeff(-cmax, cmax);
    MultiPoly h(nvars);
    unsigned n = nterms(rng);
    for (unsigned t = 0; t < n; ++t) {
        primediff::Exponent e(nvars, 0);
        std::uniform_int_distribution<unsigned> deg(0, max_deg);
        unsigned budget = deg(rng);
        for (unsigned k = 0; k < budget; ++k) {
            std::uniform_int_distribution<std::size_t> var(0, nvars - 1);
            ++e[var(rng)];
        }
        h.add_term(e, coeff(rng));
    }
    return h;
}

inline std::vector<primediff::i64> random_point(std::mt19937_64& rng, std::size_t n, long lo, long hi) {
    std::uniform_int_distribution<long> dist(lo, hi);
    std::vector<primediff::i64> x(n);
    for (auto& c : x) c = dist(rng);
    return x;
}

}  // namespace testsupport
