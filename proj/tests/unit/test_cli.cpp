#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "support.hpp"

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = mtbn::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("validate") {
    auto ok = run({"validate", model_path("glucose.json")});
    CHECK(ok.code == 0);
    CHECK(ok.out == "OK\n");

    auto bad = run({"validate", model_path("reciprocal_cyclic.json")});
    CHECK(bad.code == 1);
    CHECK(bad.out.find("error[cyclic-structure]") != std::string::npos);

    auto js = nlohmann::json::parse(run({"validate", "--json", model_path("reciprocal_cyclic.json")}).out);
    CHECK(js["valid"] == false);
    CHECK(js["diagnostics"][0]["code"] == "cyclic-structure");

    CHECK(run({"validate", model_path("vasodilator.json")}).code == 0);
}

TEST_CASE("check") {
    auto r = run({"check", model_path("reciprocal_cyclic.json")});
    CHECK(r.code == 1);
    CHECK(r.out.find("cyclic-structure") != std::string::npos);
    auto c = run({"check", model_path("age_cancer.json")});
    CHECK(c.code == 0);
    CHECK(c.out.find("certified") != std::string::npos);
}

TEST_CASE("exact query prints the oracle value") {
    auto r = run({"query", model_path("glucose.json"), "--target", "G@3=high", "--evidence",
                  "DM@1=yes,DM@2=yes,DM@3=yes,G@1=high", "--method", "exact"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("p = 0.322121", 0) == 0);
    CHECK(r.out.find("method = exact") != std::string::npos);

    auto js = nlohmann::json::parse(run({"query", model_path("glucose.json"), "--target", "G@3=high", "--evidence",
                                         "DM@1=yes,DM@2=yes,DM@3=yes,G@1=high", "--json"})
                                        .out);
    CHECK(js["p"].get<double>() == doctest::Approx(0.322121).epsilon(1e-12));
}

TEST_CASE("sampling queries are reproducible") {
    std::vector<std::string> args{"query", model_path("glucose_tr3.json"), "--target", "G@3=high", "--evidence",
                                  "G@1=high", "--method", "lw", "--n", "20000", "--seed", "5"};
    auto a = run(args);
    auto b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    args.insert(args.end(), {"--workers", "3"});
    auto c = run(args);
    CHECK(c.out.substr(0, c.out.find('\n')) == a.out.substr(0, a.out.find('\n')));
    CHECK(c.out.find("workers = 3") != std::string::npos);
}

TEST_CASE("intervene") {
    auto r = run({"intervene", model_path("vasodilator.json"), "--do", "C=yes", "--target", "V=yes"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("p = 0.4", 0) == 0);
    CHECK(r.out.find("do = C=yes") != std::string::npos);
    auto stamped = run({"intervene", model_path("vasodilator.json"), "--do", "C@1=yes", "--target", "V=yes"});
    CHECK(stamped.code == 1);
    auto nodummy = run({"intervene", model_path("glucose_tr2.json"), "--do", "G=low", "--target", "I@2=low"});
    CHECK(nodummy.code == 1);
    CHECK(nodummy.err.find("manipulation") != std::string::npos);
}

TEST_CASE("deploy, simulate and export write JSON") {
    auto d = nlohmann::json::parse(run({"deploy", model_path("two_slice.json")}).out);
    CHECK(d["instances"].size() == 8);

    auto s = run({"simulate", model_path("two_slice.json"), "--n", "3", "--seed", "1"});
    CHECK(s.code == 0);
    std::istringstream lines(s.out);
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        auto j = nlohmann::json::parse(line);
        CHECK(j.contains("B@2"));
        ++count;
    }
    CHECK(count == 3);
    CHECK(s.out == run({"simulate", model_path("two_slice.json"), "--n", "3", "--seed", "1"}).out);

    auto path = std::filesystem::temp_directory_path() / "mtbn_cli_export.json";
    CHECK(run({"export-bn", model_path("two_slice.json"), "-o", path.string()}).code == 0);
    std::ifstream f(path);
    auto bn = nlohmann::json::parse(f);
    CHECK(bn.contains("nodes"));
    std::filesystem::remove(path);

    CHECK(run({"export-bn", model_path("reciprocal_cyclic.json")}).code == 1);
}

TEST_CASE("usage and runtime errors") {
    CHECK(run({}).code == 2);
    CHECK(run({"query", model_path("glucose.json")}).code == 2);
    CHECK(run({"query", model_path("glucose.json"), "--target", "G@3=high", "--method", "magic"}).code == 2);
    CHECK(run({"validate", "/nonexistent/model.json"}).code == 2);
    auto unknown = run({"query", model_path("glucose.json"), "--target", "G@99=high"});
    CHECK(unknown.code == 1);
    CHECK(unknown.err.find("G@99") != std::string::npos);
    auto zero = run({"query", model_path("glucose.json"), "--target", "G@3=high", "--evidence", "DM@1=yes,DM@2=no"});
    CHECK(zero.code == 1);
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"--version"}).out == "mtbn 0.1.0\n");
}

}  // TEST_SUITE
