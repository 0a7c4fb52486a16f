#include <doctest.h>

#include <cmath>
#include <cstring>
#include <map>

#include "mtbn/error.hpp"
#include "mtbn/exact.hpp"
#include "mtbn/sample.hpp"
#include "support.hpp"

using namespace mtbn;

namespace {

Assignment lits(const Network& net, const std::string& text) { return resolve(net, parse_literals(text)); }

bool same_bits(const SampleRun& a, const SampleRun& b) {
    if (a.estimates.size() != b.estimates.size()) return false;
    return std::memcmp(a.estimates.data(), b.estimates.data(), a.estimates.size() * sizeof(double)) == 0 &&
           std::memcmp(&a.p, &b.p, sizeof(double)) == 0 && std::memcmp(&a.weight_sum, &b.weight_sum, sizeof(double)) == 0 &&
           std::memcmp(&a.ess, &b.ess, sizeof(double)) == 0;
}

}  // namespace

TEST_SUITE("sample") {

TEST_CASE("uniform streams") {
    CHECK(stream_uniform(1, 2, 3) == stream_uniform(1, 2, 3));
    CHECK(stream_uniform(1, 2, 3) != stream_uniform(1, 2, 4));
    CHECK(stream_uniform(1, 2, 3) != stream_uniform(2, 2, 3));
    double sum = 0.0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        double u = stream_uniform(9, i, 0);
        CHECK((u >= 0.0 && u < 1.0));
        sum += u;
    }
    CHECK(sum / 10000 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("deterministic model gives identical trajectories") {
    auto m = fixture("same_year.json");
    m.find_cpd("YEAR_OF_GI_BLEEDING")->rows[0].probabilities = {0.0, 1.0, 0.0};
    for (auto& row : m.find_cpd("YEAR_OF_WEIGHT_LOSS")->rows)
        for (auto& p : row.probabilities) p = p > 0.5 ? 1.0 : 0.0;
    Network det(m);
    auto cases = forward_simulate(det, {3, 50, 2});
    for (const auto& c : cases) CHECK(c == cases[0]);
}

TEST_CASE("empirical DM@1 frequency") {
    Network net(fixture("glucose_tr3.json"));
    auto cases = forward_simulate(net, {11, 100000, 1});
    auto x = net.index_of(parse_instance("DM@1"));
    double yes = 0;
    for (const auto& c : cases) yes += c[x] == 0;
    CHECK(std::fabs(yes / 100000 - 0.1) <= 0.005);
}

TEST_CASE("empirical joint frequencies track the exact joint") {
    Network net(fixture("glucose_tr2.json"));
    const std::uint64_t n = 200000;
    auto cases = forward_simulate(net, {5, n, 1});
    std::map<std::vector<int>, double> counts;
    for (const auto& c : cases) counts[c] += 1;
    // Pearson statistic over cells with expected count >= 5, compared with a
    // loose bound on its degrees of freedom.
    double chi2 = 0.0;
    std::size_t cells = 0;
    for_each_full(net, [&](std::span<const int> v) {
        const double expected = joint_probability(net, v) * static_cast<double>(n);
        if (expected < 5) return;
        const std::vector<int> key(v.begin(), v.end());
        auto it = counts.find(key);
        const double seen = it == counts.end() ? 0.0 : it->second;
        chi2 += (seen - expected) * (seen - expected) / expected;
        ++cells;
    });
    REQUIRE(cells > 20);
    CHECK(chi2 < 1.5 * static_cast<double>(cells));
}

TEST_CASE("no evidence: logic sampling matches forward simulation and likelihood weighting") {
    Network net(fixture("glucose_tr3.json"));
    const SampleOptions opt{21, 5000, 1};
    auto target = lits(net, "G@3=high");
    auto ls = logic_sampling_query(net, target, {}, opt);
    auto lw = likelihood_weighting_query(net, target, {}, opt);
    CHECK(same_bits(ls, lw) == true);
    CHECK(lw.weight_sum == 5000.0);

    auto cases = forward_simulate(net, opt);
    auto x = net.index_of(parse_instance("G@3"));
    double high = 0;
    for (const auto& c : cases) high += c[x] == 2;
    CHECK(ls.p == high / 5000);
}

TEST_CASE("glucose query converges") {
    Network net(fixture("glucose_tr3.json"));
    auto target = lits(net, "G@3=high");
    auto evidence = lits(net, "DM@1=yes,DM@2=yes,DM@3=yes,G@1=high");
    const double exact = exact_query(net, target, evidence).p;
    auto lw = likelihood_weighting_query(net, target, evidence, {12345, 100000, 1});
    CHECK(std::fabs(lw.p - exact) <= 0.01);
    auto ls = logic_sampling_query(net, target, evidence, {12345, 200000, 1});
    CHECK(std::fabs(ls.p - exact) <= 0.015);
    CHECK(ls.weight_sum < 200000 * 0.02);
}

TEST_CASE("rare leaf evidence") {
    Network net(fixture("glucose_tr3.json"));
    auto target = lits(net, "DM@1=yes");
    auto evidence = lits(net, "G@1=low,G@2=low,G@3=low");
    const auto exact = exact_query(net, target, evidence);
    const SampleOptions opt{77, 100000, 1};
    auto lw = likelihood_weighting_query(net, target, evidence, opt);
    CHECK(std::fabs(lw.p - exact.p) <= 0.02);
    // Acceptance tracks p(evidence), here about one sample in eighty.
    auto ls = logic_sampling_query(net, target, evidence, opt);
    CHECK(exact.evidence_probability < 0.02);
    CHECK(std::fabs(ls.weight_sum / 100000 - exact.evidence_probability) < 0.002);
}

TEST_CASE("impossible evidence is inconclusive") {
    Network net(fixture("glucose_tr3.json"));
    auto target = lits(net, "G@3=high");
    auto evidence = lits(net, "DM@1=yes,DM@2=no");
    CHECK_THROWS_AS(logic_sampling_query(net, target, evidence, {1, 2000, 1}), InconclusiveRunError);
    CHECK_THROWS_AS(likelihood_weighting_query(net, target, evidence, {1, 2000, 1}), InconclusiveRunError);
}

TEST_CASE("results do not depend on the worker count") {
    Network net(fixture("glucose_tr3.json"));
    auto target = lits(net, "G@3=high");
    auto evidence = lits(net, "DM@1=yes,G@1=high");
    for (auto method : {SamplingMethod::logic, SamplingMethod::likelihood}) {
        auto run = [&](unsigned w) {
            return method == SamplingMethod::logic ? logic_sampling_query(net, target, evidence, {8, 30001, w})
                                                   : likelihood_weighting_query(net, target, evidence, {8, 30001, w});
        };
        auto one = run(1);
        CHECK(same_bits(one, run(4)));
        CHECK(same_bits(one, run(1)));
        CHECK(run(3).workers == 3);
    }
    CHECK(forward_simulate(net, {4, 999, 1}) == forward_simulate(net, {4, 999, 4}));
}

TEST_CASE("conjunctive targets") {
    Network net(fixture("glucose_tr3.json"));
    auto target = lits(net, "G@2=high,G@3=high");
    auto run = likelihood_weighting_query(net, target, lits(net, "G@1=high"), {3, 50000, 1});
    CHECK(run.estimates.size() == 1);
    const double exact = exact_query(net, target, lits(net, "G@1=high")).p;
    CHECK(std::fabs(run.p - exact) <= 0.01);
}

TEST_CASE("cyclic candidate graph with a zero-certified structure") {
    Network net(fixture("age_cancer.json"));
    auto target = lits(net, "CANCER=yes");
    auto evidence = lits(net, "AGE=old");
    const double exact = exact_query(net, target, evidence).p;
    auto lw = likelihood_weighting_query(net, target, evidence, {2, 50000, 1});
    CHECK(std::fabs(lw.p - exact) <= 0.01);

    Network rec(fixture("reciprocal_cyclic.json"));
    CHECK_THROWS_AS(forward_simulate(rec, {1, 10, 1}), CyclicStructureError);
}

}  // TEST_SUITE
