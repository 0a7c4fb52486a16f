#include "mtbn/cpd.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "mtbn/error.hpp"

namespace mtbn {

const std::vector<double>& lookup_distribution(const Network& net, const Structure& s, std::size_t x,
                                               std::span<const int> values) {
    std::vector<int> merged(s.values.begin(), s.values.end());
    for (std::size_t i = 0; i < merged.size() && i < values.size(); ++i)
        if (merged[i] < 0) merged[i] = values[i];
    std::vector<const InEdge*> active;
    for (const auto& e : net.in_edges(x)) {
        if (!net.edge_active(e, merged)) continue;
        if (merged[e.parent] < 0)
            throw Error("no value given for active parent " + net.instance_name(e.parent) + " of " +
                        net.instance_name(x));
        active.push_back(&e);
    }
    const auto* dist = net.distribution(x, active, merged);
    if (!dist)
        throw MissingRowError("no CPD row for " + net.instance_name(x) + " under context " +
                              net.context_key(x, active, merged).to_string());
    return *dist;
}

const std::vector<double>& lookup_distribution(const Network& net, const Structure& s, const Instance& x,
                                               const std::map<Instance, std::string>& parent_values) {
    std::vector<int> values(net.size(), -1);
    for (const auto& [inst, label] : parent_values) {
        const auto idx = net.index_of(inst);
        const int v = net.value_index(idx, label);
        if (v < 0) throw ModelError("'" + label + "' is not a value of " + inst.name());
        values[idx] = v;
    }
    return lookup_distribution(net, s, net.index_of(x), values);
}

std::vector<ContextKey> reachable_contexts(const Network& net, std::string_view variable) {
    const auto id = net.variables().id_of(variable);
    std::set<ContextKey> keys;
    const std::vector<int> fixed(net.size(), -1);
    for (std::size_t x = 0; x < net.size(); ++x) {
        if (net.graph().variable_id(x) != id) continue;
        net.for_each_context(x, fixed, [&](std::span<const InEdge* const> active, std::span<const int> values) {
            keys.insert(net.context_key(x, active, values));
            return true;
        });
    }
    return {keys.begin(), keys.end()};
}

ValidationReport validate_cpds(const Network& net) {
    ValidationReport report;
    const auto& vars = net.variables();
    for (std::size_t id = 0; id < vars.size(); ++id) {
        const auto& info = vars[id];
        const auto* cpd = net.compiled_cpd(id);
        if (info.constant()) {
            if (cpd) report.push_back(warning("ignored-cpd", "CPD of constant variable " + info.name + " is ignored"));
            continue;
        }
        if (!cpd) {
            report.push_back(error("missing-cpd", "variable " + info.name + " has no CPD"));
            continue;
        }
        for (const auto& p : cpd->problems) report.push_back(error("cpd-row", p));

        std::set<ContextKey> authored;
        for (const auto& row : cpd->table->rows) {
            authored.insert(row.context);
            const auto where = "CPD of " + info.name + ", row " + row.context.to_string();
            if (row.probabilities.size() != info.labels.size()) {
                report.push_back(error("row-length", where + ": " + std::to_string(row.probabilities.size()) +
                                                         " probabilities for a domain of " +
                                                         std::to_string(info.labels.size())));
                continue;
            }
            double sum = 0.0;
            bool in_range = true;
            for (double p : row.probabilities) {
                if (!(p >= 0.0 && p <= 1.0)) in_range = false;
                sum += p;
            }
            if (!in_range) report.push_back(error("probability-range", where + ": probabilities must lie in [0, 1]"));
            if (std::fabs(sum - 1.0) > kNormalizationTolerance) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.17g", sum);
                report.push_back(error("normalization", where + ": probabilities sum to " + buf));
            }
        }

        const auto reachable = reachable_contexts(net, info.name);
        const std::set<ContextKey> reach(reachable.begin(), reachable.end());
        for (const auto& key : reachable)
            if (!authored.count(key))
                report.push_back(error("missing-row", "CPD of " + info.name + ": no row for reachable context " +
                                                          key.to_string()));
        for (const auto& key : authored)
            if (!reach.count(key))
                report.push_back(warning("unreachable-row", "CPD of " + info.name + ": row " + key.to_string() +
                                                                " is never realized over this temporal range"));
    }
    return report;
}

CpdTable generate_cpd(const Network& net, std::string_view variable,
                      const std::function<std::optional<std::vector<double>>(const ContextKey&)>& fn) {
    CpdTable table;
    table.variable = std::string(variable);
    for (const auto& key : reachable_contexts(net, variable))
        if (auto row = fn(key)) table.rows.push_back({key, std::move(*row)});
    return table;
}

std::vector<double> point_mass(std::size_t size, std::size_t at) {
    std::vector<double> out(size, 0.0);
    out.at(at) = 1.0;
    return out;
}

std::vector<double> uniform(std::size_t size) {
    return std::vector<double>(size, 1.0 / static_cast<double>(size));
}

}  // namespace mtbn
