#include "mtbn/structure.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "mtbn/error.hpp"

namespace mtbn {

namespace {

// Round-based peeling over the active edges of a (possibly partial)
// structure. Returns the instances placed; fewer than net.size() means a cycle.
std::vector<std::size_t> peel(const Network& net, std::span<const int> values,
                              const std::vector<bool>* subset = nullptr) {
    const auto n = net.size();
    std::vector<std::size_t> indegree(n, 0);
    std::vector<std::vector<std::size_t>> children(n);
    for (std::size_t x = 0; x < n; ++x) {
        if (subset && !(*subset)[x]) continue;
        for (const auto& e : net.in_edges(x))
            if (net.edge_active(e, values)) {
                ++indegree[x];
                children[e.parent].push_back(x);
            }
    }
    std::vector<std::size_t> order, round, next;
    order.reserve(n);
    for (std::size_t x = 0; x < n; ++x)
        if (indegree[x] == 0 && (!subset || (*subset)[x])) round.push_back(x);
    while (!round.empty()) {
        next.clear();
        for (auto x : round) {
            order.push_back(x);
            for (auto c : children[x])
                if (--indegree[c] == 0) next.push_back(c);
        }
        std::sort(next.begin(), next.end());
        std::swap(round, next);
    }
    return order;
}

// Advances a mixed-radix counter, last digit fastest. False on wrap-around.
bool advance(std::vector<int>& digits, const std::vector<int>& radix) {
    for (std::size_t i = digits.size(); i-- > 0;) {
        if (++digits[i] < radix[i]) return true;
        digits[i] = 0;
    }
    return false;
}

std::uint64_t saturating_product(const std::vector<int>& radix) {
    std::uint64_t total = 1;
    for (int r : radix) {
        if (total > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(r))
            return std::numeric_limits<std::uint64_t>::max();
        total *= static_cast<std::uint64_t>(r);
    }
    return total;
}

std::string assignment_text(const Network& net, const std::vector<std::pair<std::size_t, int>>& assignment) {
    std::string out = "{";
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (i) out += ", ";
        const auto [x, v] = assignment[i];
        out += net.instance_name(x) + "=" + net.variable_of(x).labels[static_cast<std::size_t>(v)];
    }
    return out + "}";
}

// Tarjan's algorithm, iterative. Returns the component id of every node.
std::vector<std::size_t> strongly_connected(std::size_t n, const std::vector<std::vector<std::size_t>>& succ) {
    constexpr auto unvisited = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> index(n, unvisited), low(n, 0), comp(n, unvisited), stack;
    std::vector<bool> on_stack(n, false);
    std::size_t counter = 0, components = 0;
    std::vector<std::pair<std::size_t, std::size_t>> frames;
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited) continue;
        frames.push_back({root, 0});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            auto& [v, i] = frames.back();
            if (i < succ[v].size()) {
                const auto w = succ[v][i++];
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = components;
                } while (w != v);
                ++components;
            }
            const auto done = v;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
        }
    }
    return comp;
}

}  // namespace

std::vector<int> constant_structural_values(const Network& net) {
    std::vector<int> values(net.size(), -1);
    for (auto x : net.structural_instances())
        if (net.is_constant(x)) values[x] = net.variable_of(x).constant_value;
    return values;
}

std::optional<std::vector<std::size_t>> try_ancestral_ordering(const Network& net, std::span<const int> values,
                                                               const std::vector<bool>* subset) {
    auto order = peel(net, values, subset);
    const auto expected = subset ? static_cast<std::size_t>(std::count(subset->begin(), subset->end(), true)) : net.size();
    if (order.size() != expected) return std::nullopt;
    return order;
}

std::uint64_t structure_count(const Network& net) {
    std::vector<int> radix;
    for (auto x : net.free_structural()) radix.push_back(static_cast<int>(net.domain_size(x)));
    return saturating_product(radix);
}

Structure structure_at(const Network& net, std::uint64_t index) {
    Structure s;
    s.index = index;
    s.values = constant_structural_values(net);
    const auto& free = net.free_structural();
    for (std::size_t i = free.size(); i-- > 0;) {
        const auto d = net.domain_size(free[i]);
        s.values[free[i]] = static_cast<int>(index % d);
        index /= d;
    }
    if (index != 0) throw Error("structure index out of range");
    return s;
}

StructureCursor::StructureCursor(const Network& net) : net_(&net) {}

bool StructureCursor::next() {
    if (done_) return false;
    if (!started_) {
        started_ = true;
        current_ = structure_at(*net_, 0);
        return true;
    }
    const auto& free = net_->free_structural();
    for (std::size_t i = free.size(); i-- > 0;) {
        auto& v = current_.values[free[i]];
        if (++v < static_cast<int>(net_->domain_size(free[i]))) {
            ++current_.index;
            return true;
        }
        v = 0;
    }
    done_ = true;
    return false;
}

std::vector<Substructure> substructures(const Network& net, const Structure& s) {
    (void)s;
    std::map<std::optional<int>, std::vector<std::size_t>> groups;
    for (auto x : net.structural_instances()) groups[net.instance(x).stamp].push_back(x);
    std::vector<Substructure> out;
    for (auto& [stamp, members] : groups) out.push_back({stamp, std::move(members)});
    return out;
}

std::vector<std::size_t> active_parents(const Network& net, const Structure& s, std::size_t x) {
    std::vector<std::size_t> out;
    for (const auto& e : net.in_edges(x))
        if (net.edge_active(e, s.values)) out.push_back(e.parent);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Instance> active_parents(const Network& net, const Structure& s, const Instance& x) {
    std::vector<Instance> out;
    for (auto p : active_parents(net, s, net.index_of(x))) out.push_back(net.instance(p));
    return out;
}

bool is_acyclic(const Network& net, const Structure& s) {
    return peel(net, s.values).size() == net.size();
}

std::vector<std::size_t> ancestral_ordering(const Network& net, const Structure& s) {
    auto order = peel(net, s.values);
    if (order.size() != net.size()) {
        std::vector<bool> placed(net.size(), false);
        for (auto x : order) placed[x] = true;
        std::string stuck;
        for (std::size_t x = 0; x < net.size(); ++x)
            if (!placed[x]) stuck += (stuck.empty() ? "" : ", ") + net.instance_name(x);
        throw CyclicStructureError("structure " + std::to_string(s.index) +
                                   " has a directed cycle of active mechanisms among " + stuck);
    }
    return order;
}

bool is_ancestral_ordering(const Network& net, const Structure& s, std::span<const std::size_t> ordering) {
    constexpr auto absent = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> position(net.size(), absent);
    for (std::size_t i = 0; i < ordering.size(); ++i) {
        const auto x = ordering[i];
        if (x >= net.size() || position[x] != absent) return false;
        position[x] = i;
    }
    for (std::size_t x = 0; x < net.size(); ++x)
        if (position[x] == absent && !(net.is_structural(x) && net.is_constant(x))) return false;
    for (auto x : ordering)
        for (auto p : active_parents(net, s, x)) {
            if (position[p] == absent) continue;
            if (position[p] > position[x]) return false;
        }
    return true;
}

std::optional<ZeroWitness> find_zero_witness(const Network& net, std::span<const int> structural_values) {
    for (auto w : net.free_structural()) {
        const int v = structural_values[w];
        if (v < 0) continue;
        bool zero_everywhere = true;
        net.for_each_context(w, structural_values, [&](std::span<const InEdge* const> active, std::span<const int> vals) {
            const auto* dist = net.distribution(w, active, vals);
            if (!dist || (*dist)[static_cast<std::size_t>(v)] > 0.0) {
                zero_everywhere = false;
                return false;
            }
            return true;
        });
        if (zero_everywhere) return ZeroWitness{w, v};
    }
    return std::nullopt;
}

CertificationReport check_well_defined(const Network& net, std::uint64_t cap) {
    CertificationReport report;
    const auto n = net.size();
    const auto& edges = net.graph().edges();

    std::vector<std::vector<std::size_t>> succ(n);
    for (const auto& e : edges) succ[e.parent].push_back(e.child);
    const auto comp = strongly_connected(n, succ);
    std::vector<std::size_t> comp_size(n, 0);
    for (auto c : comp) ++comp_size[c];

    std::vector<const CandidateEdge*> cyclic_edges;
    for (const auto& e : edges)
        if (comp[e.parent] == comp[e.child] && (comp_size[comp[e.child]] > 1 || e.parent == e.child))
            cyclic_edges.push_back(&e);
    if (cyclic_edges.empty()) {
        report.certified = true;
        report.trivially_acyclic = true;
        return report;
    }

    // Free structural instances gating an edge that lies on some cycle.
    std::vector<bool> gating(n, false);
    for (const auto* e : cyclic_edges) {
        if (!net.is_constant(e->mechanism)) gating[e->mechanism] = true;
        if (!net.is_constant(e->lag)) gating[e->lag] = true;
    }
    std::vector<std::size_t> family_vars, rest_vars;
    for (auto x : net.free_structural()) (gating[x] ? family_vars : rest_vars).push_back(x);
    std::vector<int> family_radix, rest_radix;
    for (auto x : family_vars) family_radix.push_back(static_cast<int>(net.domain_size(x)));
    for (auto x : rest_vars) rest_radix.push_back(static_cast<int>(net.domain_size(x)));

    if (saturating_product(family_radix) > cap) {
        report.diagnostics.push_back(error("certification-cap", "too many cyclic structure families to certify (" +
                                                                    std::to_string(family_vars.size()) +
                                                                    " gating instances); model rejected"));
        return report;
    }

    auto values = constant_structural_values(net);
    std::vector<int> digits(family_vars.size(), 0);
    bool all_ok = true;
    do {
        for (std::size_t i = 0; i < family_vars.size(); ++i) values[family_vars[i]] = digits[i];
        for (auto x : rest_vars) values[x] = -1;

        // Cycle test restricted to edges whose gating is fully known.
        std::vector<std::size_t> indegree(n, 0);
        std::vector<std::vector<std::size_t>> children(n);
        for (const auto* e : cyclic_edges) {
            const bool active = values[e->mechanism] == 0 &&
                                net.lag_number(e->lag, values[e->lag]) == e->lag_value;
            if (!active) continue;
            ++indegree[e->child];
            children[e->parent].push_back(e->child);
        }
        std::vector<std::size_t> ready;
        for (std::size_t x = 0; x < n; ++x)
            if (indegree[x] == 0) ready.push_back(x);
        std::size_t placed = 0;
        while (!ready.empty()) {
            auto x = ready.back();
            ready.pop_back();
            ++placed;
            for (auto c : children[x])
                if (--indegree[c] == 0) ready.push_back(c);
        }
        if (placed == n) continue;

        CyclicFamily family;
        for (std::size_t i = 0; i < family_vars.size(); ++i) family.assignment.push_back({family_vars[i], digits[i]});
        family.witness = find_zero_witness(net, values);
        if (!family.witness) {
            // Try every completion of the remaining structural instances.
            bool covered = saturating_product(rest_radix) <= cap && !rest_vars.empty();
            if (covered) {
                std::vector<int> rest(rest_vars.size(), 0);
                do {
                    for (std::size_t i = 0; i < rest_vars.size(); ++i) values[rest_vars[i]] = rest[i];
                    if (!find_zero_witness(net, values)) {
                        covered = false;
                        break;
                    }
                } while (advance(rest, rest_radix));
            }
            family.certified = covered;
        } else {
            family.certified = true;
        }
        if (!family.certified) {
            all_ok = false;
            std::string members;
            for (std::size_t x = 0; x < n; ++x)
                if (indegree[x] > 0) members += (members.empty() ? "" : ", ") + net.instance_name(x);
            report.diagnostics.push_back(
                error("cyclic-structure", "structures with " + assignment_text(net, family.assignment) +
                                              " have a directed cycle through " + members +
                                              " and no zero-probability witness"));
        }
        report.families.push_back(std::move(family));
    } while (advance(digits, family_radix));

    report.certified = all_ok;
    return report;
}

std::string format_certification(const Network& net, const CertificationReport& report) {
    std::string out;
    if (report.trivially_acyclic) return "certified: no structure can contain a cycle\n";
    for (const auto& f : report.families) {
        out += "cyclic family " + assignment_text(net, f.assignment) + ": ";
        if (f.witness)
            out += "zero witness " + net.instance_name(f.witness->instance) + "=" +
                   net.variable_of(f.witness->instance).labels[static_cast<std::size_t>(f.witness->value)];
        else if (f.certified)
            out += "every completion has a zero witness";
        else
            out += "no witness";
        out += "\n";
    }
    out += report.certified ? "certified\n" : "not certified\n";
    return out;
}

}  // namespace mtbn
