#pragma once

#include <json.hpp>

#include "primediff/poly.hpp"

namespace primediff {

// {"nvars": l, "terms": [{"e": [...], "c": "<decimal>"}]}, leading term first.
nlohmann::json poly_to_json(const MultiPoly& h);
MultiPoly poly_from_json(const nlohmann::json& j);

// Accepts either the JSON object or a JSON string in the text grammar.
MultiPoly poly_from_any(const nlohmann::json& j, std::size_t min_nvars = 1);

// Reads a CLI polynomial argument: JSON when it starts with '{', text otherwise.
MultiPoly poly_from_arg(const std::string& arg, std::size_t min_nvars = 1);

}  // namespace primediff
