#include <cctype>
#include <cstdlib>
#include <cstdio>

#include "primediff/cli.hpp"
#include "primediff/error.hpp"

namespace primediff {

void RunConfig::validate() const {
    auto positive = [](u64 v, const char* name) {
        if (v == 0) throw Error(std::string("config: ") + name + " must be positive");
    };
    positive(tree_width, "tree_width");
    positive(work, "work");
    positive(point_cap, "point_cap");
    positive(exhaustive_n, "exhaustive_n");
    positive(node_cap, "node_cap");
    positive(class_cap, "class_cap");
    positive(p_max, "p_max");
    positive(depth, "depth");
    positive(ext_cap, "ext_cap");
    if (exhaustive_n > 26) throw Error("config: exhaustive_n must be at most 26");
    if (!(float_slack > 0.0)) throw Error("config: float_slack must be positive");
    if (format != "json" && format != "csv") throw Error("config: format must be json or csv");
}

nlohmann::json config_to_json(const RunConfig& c) {
    return nlohmann::json{{"tree_width", c.tree_width}, {"work", c.work},           {"point_cap", c.point_cap},
                          {"exhaustive_n", c.exhaustive_n}, {"node_cap", c.node_cap}, {"class_cap", c.class_cap},
                          {"float_slack", c.float_slack},   {"p_max", c.p_max},       {"depth", c.depth},
                          {"ext_cap", c.ext_cap},           {"format", c.format},     {"seed", c.seed}};
}

RunConfig config_from_json(const nlohmann::json& j, RunConfig c) {
    if (!j.is_object()) throw ParseError("config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const auto& v = it.value();
        try {
            if (k == "tree_width") c.tree_width = v.get<u64>();
            else if (k == "work") c.work = v.get<u64>();
            else if (k == "point_cap") c.point_cap = v.get<u64>();
            else if (k == "exhaustive_n") c.exhaustive_n = v.get<u64>();
            else if (k == "node_cap") c.node_cap = v.get<u64>();
            else if (k == "class_cap") c.class_cap = v.get<u64>();
            else if (k == "float_slack") c.float_slack = v.get<double>();
            else if (k == "p_max") c.p_max = v.get<u64>();
            else if (k == "depth") c.depth = v.get<unsigned>();
            else if (k == "ext_cap") c.ext_cap = v.get<unsigned>();
            else if (k == "format") c.format = v.get<std::string>();
            else if (k == "seed") c.seed = v.get<u64>();
            else throw ParseError("config: unknown key '" + k + "'");
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("config: bad value for '" + k + "': " + e.what());
        }
    }
    c.validate();
    return c;
}

RunConfig config_from_env(RunConfig c) {
    nlohmann::json j = nlohmann::json::object();
    const nlohmann::json current = config_to_json(c);
    for (const auto& [key, value] : current.items()) {
        std::string name = "PRIMEDIFF_";
        for (char ch : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        const char* env = std::getenv(name.c_str());
        if (!env) continue;
        std::string text(env);
        if (value.is_string()) {
            j[key] = text;
        } else {
            try {
                j[key] = nlohmann::json::parse(text);
            } catch (const nlohmann::json::exception&) {
                throw ParseError("environment variable " + name + " is not a number: " + text);
            }
        }
    }
    return config_from_json(j, c);
}

std::string config_hash(const RunConfig& c) {
    std::string s = config_to_json(c).dump();
    u64 h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace primediff
