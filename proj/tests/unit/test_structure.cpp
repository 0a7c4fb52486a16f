#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "mtbn/error.hpp"
#include "mtbn/network.hpp"
#include "mtbn/structure.hpp"
#include "support.hpp"

using namespace mtbn;

namespace {

std::string label(const Network& net, const Structure& s, const std::string& name) {
    auto x = net.index_of(parse_instance(name));
    return net.variable_of(x).labels[static_cast<std::size_t>(s.value(x))];
}

std::set<std::string> parent_names(const Network& net, const Structure& s, const std::string& name) {
    std::set<std::string> out;
    for (const auto& p : active_parents(net, s, parse_instance(name))) out.insert(p.name());
    return out;
}

std::vector<std::size_t> indices(const Network& net, const std::vector<std::string>& names) {
    std::vector<std::size_t> out;
    for (const auto& n : names) out.push_back(net.index_of(parse_instance(n)));
    return out;
}

// A before B at lag 0, B before A at lag 1.
CondensedModel chain_model() {
    CondensedModel m;
    m.range = {1, 2};
    m.granularity = {"1 day"};
    m.variables = {{"A", {"no", "yes"}}, {"B", {"no", "yes"}}};
    m.mechanisms = {{"A", "B", Constancy::constant_active}, {"B", "A", Constancy::constant_active}};
    m.lags = {{"[A->B]", {0}, true}, {"[B->A]", {1}, true}};
    return m;
}

}  // namespace

TEST_SUITE("structure") {

TEST_CASE("two-slice model has four structures in label order") {
    Network net(fixture("two_slice.json"));
    REQUIRE(structure_count(net) == 4);
    const std::vector<std::pair<std::string, std::string>> want{
        {"active", "active"}, {"active", "inactive"}, {"inactive", "active"}, {"inactive", "inactive"}};
    for (std::uint64_t i = 0; i < 4; ++i) {
        auto s = structure_at(net, i);
        CHECK(s.index == i);
        CHECK(label(net, s, "[A->B]@1") == want[i].first);
        CHECK(label(net, s, "[A->B]@2") == want[i].second);
        CHECK(label(net, s, "LAG[A->B]@1") == "0");
    }
}

TEST_CASE("cursor visits the same structures as structure_at") {
    Network net(fixture("glucose_tr3.json"));
    StructureCursor c(net);
    std::uint64_t i = 0;
    while (c.next()) {
        CHECK(c.current().values == structure_at(net, i).values);
        ++i;
    }
    CHECK(i == structure_count(net));
    CHECK(i == 8);
}

TEST_CASE("structure counts") {
    CHECK(structure_count(Network(fixture("glucose_tr2.json"))) == 4);
    CHECK(structure_count(Network(fixture("reciprocal_cyclic.json"))) == 1);
    CHECK(structure_count(Network(fixture("chain_abc.json"))) == 2);
}

TEST_CASE("substructures split by stamp") {
    Network net(fixture("two_slice.json"));
    auto subs = substructures(net, structure_at(net, 1));
    REQUIRE(subs.size() == 2);
    CHECK(subs[0].stamp == 1);
    CHECK(subs[1].stamp == 2);
    for (const auto& sub : subs)
        for (auto x : sub.instances) CHECK(net.instance(x).stamp == sub.stamp);
}

TEST_CASE("active parents in the two-slice model") {
    Network net(fixture("two_slice.json"));
    auto s11 = structure_at(net, 0);
    CHECK(parent_names(net, s11, "B@1") == std::set<std::string>{"A@1"});
    CHECK(parent_names(net, s11, "B@2") == std::set<std::string>{"A@2"});
    auto s21 = structure_at(net, 1);
    CHECK(parent_names(net, s21, "B@1") == std::set<std::string>{"A@1"});
    CHECK(parent_names(net, s21, "B@2").empty());
}

TEST_CASE("lag selects the insulin parent of G@3") {
    Network net(fixture("glucose_tr3.json"));
    StructureCursor c(net);
    bool seen = false;
    while (c.next()) {
        const auto& s = c.current();
        if (label(net, s, "LAG[I->G]@1") == "2" && label(net, s, "LAG[I->G]@2") == "2") {
            CHECK(parent_names(net, s, "G@3") == std::set<std::string>{"I@1", "G@2"});
            seen = true;
        }
        if (label(net, s, "LAG[I->G]@1") == "1" && label(net, s, "LAG[I->G]@2") == "2")
            CHECK(parent_names(net, s, "G@3") == std::set<std::string>{"G@2"});
    }
    CHECK(seen);
}

TEST_CASE("acyclicity") {
    Network two_slice(fixture("two_slice.json"));
    for (std::uint64_t i = 0; i < 4; ++i) CHECK(is_acyclic(two_slice, structure_at(two_slice, i)));

    Network rec(fixture("reciprocal_cyclic.json"));
    auto s = structure_at(rec, 0);
    CHECK_FALSE(is_acyclic(rec, s));
    CHECK_THROWS_AS(ancestral_ordering(rec, s), CyclicStructureError);
    CHECK_FALSE(try_ancestral_ordering(rec, s.values));

    Network chain(chain_model());
    auto cs = structure_at(chain, 0);
    CHECK(is_acyclic(chain, cs));
    auto order = ancestral_ordering(chain, cs);
    auto pos = [&](const char* n) {
        return std::find(order.begin(), order.end(), chain.index_of(parse_instance(n))) - order.begin();
    };
    CHECK(pos("A@1") < pos("B@1"));
    CHECK(pos("B@1") < pos("A@2"));
    CHECK(pos("A@2") < pos("B@2"));
}

TEST_CASE("chain orderings") {
    Network net(fixture("chain_abc.json"));
    auto listed = indices(net, {"A@1", "[A->B]@1", "B@1", "[B->C]@1", "C@1"});
    auto c_first = indices(net, {"C@1", "A@1", "[A->B]@1", "B@1", "[B->C]@1"});
    for (std::uint64_t i = 0; i < 2; ++i) {
        auto s = structure_at(net, i);
        CHECK(is_ancestral_ordering(net, s, ancestral_ordering(net, s)));
        CHECK(is_ancestral_ordering(net, s, listed));
    }
    CHECK_FALSE(is_ancestral_ordering(net, structure_at(net, 0), c_first));
    CHECK(is_ancestral_ordering(net, structure_at(net, 1), c_first));

    auto s = structure_at(net, 0);
    auto missing = listed;
    missing.pop_back();
    CHECK_FALSE(is_ancestral_ordering(net, s, missing));
    auto twice = listed;
    twice.push_back(listed[0]);
    CHECK_FALSE(is_ancestral_ordering(net, s, twice));
}

TEST_CASE("single instance ordering") {
    CondensedModel m;
    m.range = {1, 1};
    m.granularity = {"1 day"};
    m.variables = {{"X", {"a", "b"}}};
    m.cpds = {{"X", {{ContextKey::boundary(), {0.5, 0.5}}}}};
    Network net(m);
    CHECK(ancestral_ordering(net, structure_at(net, 0)) == std::vector<std::size_t>{0});
}

TEST_CASE("property: orderings respect active parents on random glucose structures") {
    Network net(fixture("glucose.json"));
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::uint64_t> pick(0, structure_count(net) - 1);
    for (int k = 0; k < 50; ++k) {
        auto s = structure_at(net, pick(rng));
        auto order = ancestral_ordering(net, s);
        CHECK(order.size() == net.size());
        std::vector<std::size_t> pos(net.size());
        for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
        for (std::size_t x = 0; x < net.size(); ++x)
            for (auto p : active_parents(net, s, x)) CHECK(pos[p] < pos[x]);
        CHECK(is_ancestral_ordering(net, s, order));
    }
}

TEST_CASE("well-definedness certification") {
    auto two_slice = check_well_defined(Network(fixture("two_slice.json")));
    CHECK(two_slice.certified);
    CHECK(two_slice.trivially_acyclic);

    Network ac(fixture("age_cancer.json"));
    auto r = check_well_defined(ac);
    CHECK(r.certified);
    CHECK_FALSE(r.trivially_acyclic);
    REQUIRE(r.families.size() == 1);
    REQUIRE(r.families[0].witness);
    CHECK(ac.instance_name(r.families[0].witness->instance) == "[CANCER->AGE]");

    auto rec = check_well_defined(Network(fixture("reciprocal_cyclic.json")));
    CHECK_FALSE(rec.certified);
    CHECK(has_errors(rec.diagnostics));
    CHECK(rec.diagnostics[0].code == "cyclic-structure");

    CHECK(check_well_defined(Network(chain_model())).certified);
}

TEST_CASE("zero witness needs a zero in every consistent row") {
    auto m = fixture("age_cancer.json");
    // Let both arcs be active together with small probability.
    auto* t = m.find_cpd("[CANCER->AGE]");
    t->rows[0].probabilities = {0.1, 0.9};
    auto r = check_well_defined(Network(m));
    CHECK_FALSE(r.certified);
}

}  // TEST_SUITE
