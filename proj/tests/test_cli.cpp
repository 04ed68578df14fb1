#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "primediff/cli.hpp"
#include "primediff/error.hpp"

using namespace primediff;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
    json parsed() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "primediff");
    std::ostringstream out, err;
    int code = dispatch(args, out, err);
    return Run{code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& body) {
    std::string path = "cli_test_" + name;
    std::ofstream(path) << body;
    return path;
}

}  // namespace

TEST_CASE("classify reports a certificate per prime") {
    auto r = run({"classify", "--pmax", "13", "x^2-1"});
    REQUIRE(r.code == kExitOk);
    auto j = r.parsed();
    CHECK(j["command"] == "classify");
    CHECK(j["result"]["all_certified"] == true);
    CHECK(j["result"]["certificates"].size() == 6);
    CHECK(j["provenance"]["polynomial"] == "x1^2 - 1");
}

TEST_CASE("aux d=2 for x^2-1") {
    auto r = run({"aux", "--d", "2", "x1^2-1"});
    REQUIRE(r.code == kExitOk);
    auto res = r.parsed()["result"];
    CHECK(res["r_d"] == json::array({-1}));
    CHECK(res["lambda"] == "2");
    CHECK(res["h_d"]["text"] == "2*x1^2 - 2*x1");
    CHECK(r.parsed()["provenance"]["root_choice"]["mode"] == "p-intersective");
}

TEST_CASE("usage errors exit 2") {
    CHECK(run({"bogus"}).code == kExitUsage);
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"aux", "--d", "2", "x^^2"}).code == kExitUsage);
    CHECK(run({"--format", "xml", "verify"}).code == kExitUsage);
    CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("output is deterministic") {
    std::vector<std::string> args{"sieve", "profile", "--d", "3", "--Y", "7", "x^2+y^2-2"};
    auto a = run(args), b = run(args);
    REQUIRE(a.code == kExitOk);
    CHECK(a.out == b.out);
}

TEST_CASE("cap exceeded exits 3") {
    auto r = run({"--point-cap", "10", "sieve", "sandwich", "--box", "30", "x^2+y^2-2"});
    CHECK(r.code == kExitCap);
    CHECK(r.err.find("cap") != std::string::npos);
}

TEST_CASE("config round trip, file and environment precedence") {
    RunConfig c;
    c.point_cap = 12345;
    c.format = "csv";
    c.float_slack = 1e-7;
    CHECK(config_from_json(config_to_json(c)) == c);
    CHECK(config_hash(c) == config_hash(config_from_json(config_to_json(c))));
    CHECK(config_hash(c) != config_hash(RunConfig{}));
    CHECK_THROWS_AS(config_from_json(json{{"no_such_key", 1}}), ParseError);
    CHECK_THROWS_AS(config_from_json(json{{"exhaustive_n", 40}}), Error);

    auto path = temp_file("config.json", R"({"seed": 7, "point_cap": 10})");
    auto via_file = run({"--config", path, "sieve", "sandwich", "--box", "30", "x^2+y^2-2"});
    CHECK(via_file.code == kExitCap);
    auto flag_wins = run({"--config", path, "--point-cap", "1000000", "--seed", "9", "sieve", "sandwich", "--box",
                          "10", "x^2+y^2-2"});
    REQUIRE(flag_wins.code == kExitOk);
    CHECK(flag_wins.parsed()["provenance"]["seed"] == 9);

    setenv("PRIMEDIFF_SEED", "42", 1);
    auto env = run({"--config", path, "--point-cap", "1000000", "sieve", "profile", "x^2-1"});
    unsetenv("PRIMEDIFF_SEED");
    REQUIRE(env.code == kExitOk);
    CHECK(env.parsed()["provenance"]["seed"] == 42);
}

TEST_CASE("extremal solve and energy from files") {
    auto xs = temp_file("x.txt", "1 4 9\n");
    auto r = run({"extremal", "solve", "--x-file", xs, "--N", "10"});
    REQUIRE(r.code == kExitOk);
    CHECK(r.parsed()["result"]["D"] == 4);
    CHECK(r.parsed()["result"]["exact"] == true);

    auto bs = temp_file("b.txt", "1/3, 2/3\n");
    auto e = run({"expsum", "energy", "--set", bs});
    REQUIRE(e.code == kExitOk);
    CHECK(e.parsed()["result"]["energy"] == 6);
}

TEST_CASE("decimal and rational frequencies agree") {
    auto a = run({"expsum", "salpha", "--alpha", "0.25", "--M", "30", "x^2-1"});
    auto b = run({"expsum", "salpha", "--alpha", "1/4", "--M", "30", "x^2-1"});
    REQUIRE(a.code == kExitOk);
    CHECK(a.parsed()["result"] == b.parsed()["result"]);
    CHECK(a.parsed()["result"]["alpha"]["q"] == 4);
}

TEST_CASE("dtable csv output") {
    auto r = run({"--format", "csv", "extremal", "dtable", "--poly", "x^2-1", "--nmin", "10", "--nmax", "20",
                  "--step", "10"});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.rfind("N,D,ratio,method,x_size\n", 0) == 0);
    CHECK(r.out.find("10,5,") != std::string::npos);
}

TEST_CASE("verify passes") {
    auto r = run({"verify"});
    CHECK(r.code == kExitOk);
    CHECK(r.parsed()["result"]["all_passed"] == true);
}
