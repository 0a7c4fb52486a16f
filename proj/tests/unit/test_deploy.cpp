#include <doctest.h>

#include <algorithm>
#include <set>

#include "mtbn/deploy.hpp"
#include "mtbn/error.hpp"
#include "mtbn/network.hpp"
#include "support.hpp"

using namespace mtbn;

namespace {

std::set<std::string> names_of(const Network& net, bool include_constant) {
    std::set<std::string> out;
    for (std::size_t x = 0; x < net.size(); ++x)
        if (include_constant || !net.is_constant(x)) out.insert(net.instance_name(x));
    return out;
}

bool has_edge(const DeployedGraph& g, const std::string& parent, const std::string& child, int lag) {
    const auto& in = g.instances();
    return std::any_of(g.edges().begin(), g.edges().end(), [&](const CandidateEdge& e) {
        return in[e.parent].name() == parent && in[e.child].name() == child && e.lag_value == lag;
    });
}

}  // namespace

TEST_SUITE("deploy") {

TEST_CASE("instance names") {
    CHECK(Instance{"G", 3}.name() == "G@3");
    CHECK(Instance{"AGE", std::nullopt}.name() == "AGE");
    CHECK(parse_instance("[I->G]@2") == Instance{"[I->G]", 2});
    CHECK(parse_instance("AGE") == Instance{"AGE", std::nullopt});
    CHECK_THROWS_AS(parse_instance("G@x"), ModelError);
}

TEST_CASE("two-slice deployment") {
    Network net(fixture("two_slice.json"));
    // Constant lags stay deployed as fixed-value nodes; without them the set
    // is the six instances of the figure.
    CHECK(names_of(net, false) == std::set<std::string>{"A@1", "A@2", "B@1", "B@2", "[A->B]@1", "[A->B]@2"});
    CHECK(names_of(net, true).size() == 8);
    CHECK(has_edge(net.graph(), "A@1", "B@1", 0));
    CHECK(has_edge(net.graph(), "A@2", "B@2", 0));
    CHECK(net.graph().edges().size() == 2);
}

TEST_CASE("abstract variable has one instance") {
    auto m = fixture("age_cancer.json");
    m.range = {1, 10};
    Network net(m);
    CHECK(net.size() == 8);  // AGE, CANCER, three mechanisms and their constant lags
    for (std::size_t x = 0; x < net.size(); ++x)
        if (!net.is_structural(x)) CHECK_FALSE(net.instance(x).stamp);
}

TEST_CASE("instance order: unstamped first, then stamp, then name") {
    Network g(fixture("glucose_tr2.json"));
    const auto& in = g.graph().instances();
    for (std::size_t i = 1; i < in.size(); ++i) {
        CHECK(in[i - 1].stamp <= in[i].stamp);
        if (in[i - 1].stamp == in[i].stamp) CHECK(in[i - 1].variable < in[i].variable);
    }
}

TEST_CASE("glucose Tr=[1,3] insulin edges into G@3") {
    auto g = deploy_model(fixture("glucose_tr3.json"));
    CHECK(has_edge(g, "I@1", "G@3", 2));
    CHECK(has_edge(g, "I@2", "G@3", 1));
    CHECK_FALSE(g.find(Instance{"I", 0}));
    for (const auto& e : g.edges()) CHECK(g.instances()[e.parent].stamp >= 1);
    CHECK_FALSE(has_edge(g, "I@1", "G@1", 0));
}

TEST_CASE("candidate parents") {
    auto g = deploy_model(fixture("glucose_tr3.json"));
    auto g2 = candidate_parents(g, Instance{"G", 2});
    std::sort(g2.begin(), g2.end());
    std::vector<CandidateParent> want{{Instance{"G", 1}, Instance{"[G->G]", 1}, 1},
                                      {Instance{"I", 1}, Instance{"[I->G]", 1}, 1}};
    CHECK(g2 == want);

    CHECK(candidate_parents(g, Instance{"DM", 1}).empty());

    auto lag2 = candidate_parents(g, Instance{"LAG[I->G]", 2});
    REQUIRE(lag2.size() == 1);
    CHECK(lag2[0] == CandidateParent{Instance{"DM", 1}, Instance{"[DM->LAG[I->G]]", 1}, 1});

    CHECK_THROWS_AS(candidate_parents(g, Instance{"G", 4}), UnknownInstanceError);
}

TEST_CASE("abstract cause feeds every stamp") {
    auto g = deploy_model(fixture("appendicitis.json"));
    for (int t = 1; t <= 4; ++t) CHECK(has_edge(g, "APPENDICITIS", "RUQ_PAIN@" + std::to_string(t), 0));
}

TEST_CASE("every candidate edge respects its lag") {
    for (const char* f : {"glucose.json", "appendicitis.json", "facts_events.json"}) {
        auto g = deploy_model(fixture(f));
        for (const auto& e : g.edges()) {
            const auto& p = g.instances()[e.parent];
            const auto& c = g.instances()[e.child];
            if (p.stamp && c.stamp) CHECK(*c.stamp - *p.stamp == e.lag_value);
            CHECK(g.instances()[e.mechanism].stamp == p.stamp);
            CHECK(g.instances()[e.lag].stamp == p.stamp);
        }
    }
}

TEST_CASE("deployment JSON lists instances and edges") {
    auto text = deployed_graph_json(deploy_model(fixture("two_slice.json")));
    CHECK(text.find("\"[A->B]@2\"") != std::string::npos);
    CHECK(text.find("\"edges\"") != std::string::npos);
}

}  // TEST_SUITE
