#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "primediff/arith.hpp"

namespace primediff {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitUsage = 2, kExitCap = 3, kExitInvariant = 4 };

struct RunConfig {
    u64 tree_width = 200'000;        // p-adic root tree width
    u64 work = 50'000'000;           // polynomial evaluations per root search
    u64 point_cap = 50'000'000;      // box and field enumeration volume
    u64 exhaustive_n = 24;           // D(X, N) by exhaustive search up to this N
    u64 node_cap = 200'000'000;      // branch-and-bound nodes
    u64 class_cap = 20'000'000;      // residue classes per gamma level
    double float_slack = 1e-9;       // relative tolerance for float checks
    u64 p_max = 50;
    unsigned depth = 8;
    unsigned ext_cap = 2;
    std::string format = "json";     // json or csv
    u64 seed = 1;

    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

nlohmann::json config_to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});

// PRIMEDIFF_<FIELD> environment variables, e.g. PRIMEDIFF_POINT_CAP.
RunConfig config_from_env(RunConfig base);

// FNV-1a of the compact JSON form, as 16 hex digits.
std::string config_hash(const RunConfig& c);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Fast invariant battery used by `primediff verify`.
std::vector<CheckResult> run_invariant_suite(const RunConfig& c);

// Runs one command line. argv[0] is the program name.
int dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace primediff
