#include <doctest.h>

#include <algorithm>

#include "mtbn/error.hpp"
#include "mtbn/model.hpp"
#include "mtbn/query.hpp"
#include "mtbn/validate.hpp"
#include "support.hpp"

using namespace mtbn;

namespace {

const char* kSingle = R"({
  "range": {"t1": 1, "tn": 5}, "granularity": "1 day",
  "variables": [{"name": "X", "domain": ["a", "b"], "temporality": "indexed"}],
  "mechanisms": [], "lags": [],
  "cpds": [{"variable": "X", "rows": [{"context": "boundary", "probabilities": [0.5, 0.5]}]}]
})";

bool has_code(const ValidationReport& r, const std::string& code) {
    return std::any_of(r.begin(), r.end(), [&](const Diagnostic& d) { return d.code == code; });
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("glucose fixture parses with three variables, six mechanisms, six lags") {
    auto m = fixture("glucose.json");
    CHECK(m.variables.size() == 3);
    CHECK(m.mechanisms.size() == 6);
    CHECK(m.lags.size() == 6);
    CHECK(m.range == TemporalRange{1, 10});
    for (const auto& mech : m.mechanisms) CHECK(mech.constancy == Constancy::constant_active);
}

TEST_CASE("single indexed variable without arcs") {
    auto m = parse_model(kSingle);
    CHECK(m.variables.size() == 1);
    CHECK(m.mechanisms.empty());
    CHECK(m.lags.empty());
}

TEST_CASE("serialization round-trips every fixture") {
    for (const char* f : {"glucose.json", "two_slice.json", "chain_abc.json", "age_cancer.json", "vasodilator.json",
                          "facts_events.json", "appendicitis.json", "same_year.json"}) {
        CAPTURE(f);
        auto m = fixture(f);
        CHECK(parse_model(serialize_model(m)) == m);
    }
}

TEST_CASE("malformed input") {
    CHECK_THROWS_AS(parse_model("{"), ParseError);
    CHECK_THROWS_AS(parse_model("[]"), ModelError);

    std::string dangling = kSingle;
    const std::string none = R"("mechanisms": [])";
    dangling.replace(dangling.find(none), none.size(),
                     R"("mechanisms": [{"cause": "X", "effect": "Z", "constancy": "constant-active"}])");
    CHECK_THROWS_AS(parse_model(dangling), ModelError);
    try {
        parse_model(dangling);
    } catch (const ModelError& e) {
        CHECK(std::string(e.what()).find("Z") != std::string::npos);
    }
}

TEST_CASE("context keys ignore authoring order") {
    ContextEntry a{"G", ContextTag::lag, 1, "low"};
    ContextEntry b{"I", ContextTag::lag, 2, "high"};
    CHECK(ContextKey({a, b}) == ContextKey({b, a}));
    CHECK(ContextKey().is_boundary());
}

TEST_CASE("structural variable set") {
    auto two_slice = structural_variable_set(fixture("two_slice.json"));
    REQUIRE(two_slice.size() == 2);
    CHECK(two_slice[0].name == "LAG[A->B]");
    CHECK(two_slice[0].constant);
    CHECK(two_slice[1].name == "[A->B]");
    CHECK_FALSE(two_slice[1].constant);

    std::vector<std::string> free;
    for (const auto& s : structural_variable_set(fixture("glucose.json")))
        if (!s.constant) free.push_back(s.name);
    CHECK(free == std::vector<std::string>{"LAG[I->G]"});

    CHECK(structural_variable_set(parse_model(kSingle)).empty());
}

TEST_CASE("with_range changes only the range") {
    auto m = fixture("glucose.json");
    auto r = with_range(m, 1, 3);
    CHECK(r.range == TemporalRange{1, 3});
    CHECK(r == fixture("glucose_tr3.json"));
    r.range = m.range;
    CHECK(r == m);
}

TEST_CASE("reference checks") {
    auto m = fixture("two_slice.json");
    CHECK(check_references(m).empty());

    auto dup = m;
    dup.variables.push_back(dup.variables[0]);
    CHECK(has_code(check_references(dup), "duplicate-name"));

    auto loop0 = m;
    loop0.mechanisms.push_back({"A", "A", Constancy::constant_active});
    loop0.lags.push_back({"[A->A]", {0}, true});
    CHECK(has_code(check_references(loop0), "self-loop"));

    auto loop1 = loop0;
    loop1.lags.back().values = {1};
    CHECK_FALSE(has_code(check_references(loop1), "self-loop"));

    auto nolag = m;
    nolag.lags.clear();
    CHECK(has_code(check_references(nolag), "missing-lag"));

    auto badname = m;
    badname.variables[0].name = "A@1";
    CHECK(has_code(check_references(badname), "name"));
}

TEST_CASE("literal parsing") {
    auto l = parse_literal("G@3=high");
    CHECK(l.instance.variable == "G");
    CHECK(l.instance.stamp == 3);
    CHECK(l.value == "high");
    CHECK(parse_literal("[A->B]@1=active").instance.variable == "[A->B]");
    CHECK_FALSE(parse_literal("AGE=old").instance.stamp);
    CHECK(parse_literals("").empty());
    CHECK(parse_literals("DM@1=yes,DM@2=no").size() == 2);
    CHECK_THROWS_AS(parse_literal("G@3"), ModelError);
}

}  // TEST_SUITE
