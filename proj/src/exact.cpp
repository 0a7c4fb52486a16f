#include "mtbn/exact.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include <json.hpp>

#include "mtbn/error.hpp"
#include "mtbn/structure.hpp"

namespace mtbn {

namespace {

// Neumaier compensated sum.
struct Accumulator {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    void add(const Accumulator& o) {
        add(o.sum);
        add(o.comp);
    }
    double value() const { return sum + comp; }
};

struct Pair {
    Accumulator num;
    Accumulator den;
};

std::uint64_t mul_sat(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

class Enumerator {
public:
    Enumerator(const Network& net, const std::vector<bool>& relevant, std::vector<int> target, Assignment target_list)
        : net_(net), relevant_(relevant), target_(std::move(target)), target_list_(std::move(target_list)) {}

    // Sums the joint of every completion of `values` (structure fixed),
    // splitting by whether the target holds. Returns false if the structure
    // is cyclic and zero-certified.
    bool run(std::vector<int> values, Pair& out) {
        auto order = try_ancestral_ordering(net_, values, &relevant_);
        if (!order) {
            std::vector<int> structural(values.size(), -1);
            for (auto x : net_.structural_instances()) structural[x] = values[x];
            if (find_zero_witness(net_, structural)) return false;
            throw CyclicStructureError("a structure with a directed cycle of active mechanisms is not certified to "
                                       "have probability 0");
        }
        steps_.clear();
        std::size_t cutoff = 0;
        for (std::size_t i = 0; i < order->size(); ++i) {
            const auto x = (*order)[i];
            Step st{x, {}};
            for (const auto& e : net_.in_edges(x))
                if (net_.edge_active(e, values)) st.active.push_back(&e);
            steps_.push_back(std::move(st));
            if (values[x] >= 0 || target_[x] >= 0) cutoff = i + 1;
        }
        // Free unobserved instances after the last constrained one sum to 1.
        steps_.resize(cutoff);
        values_ = std::move(values);
        dfs(0, 0.0, out);
        return true;
    }

private:
    struct Step {
        std::size_t x;
        std::vector<const InEdge*> active;
    };

    void dfs(std::size_t k, double logp, Pair& out) {
        if (k == steps_.size()) {
            const double w = std::exp(logp);
            out.den.add(w);
            bool hit = true;
            for (const auto& [x, v] : target_list_)
                if (values_[x] != v) hit = false;
            if (hit) out.num.add(w);
            return;
        }
        const auto& st = steps_[k];
        const auto* dist = net_.distribution(st.x, st.active, values_);
        if (!dist)
            throw MissingRowError("no CPD row for " + net_.instance_name(st.x) + " under context " +
                                  net_.context_key(st.x, st.active, values_).to_string());
        const int pinned = values_[st.x];
        if (pinned >= 0) {
            const double p = (*dist)[static_cast<std::size_t>(pinned)];
            if (p > 0.0) dfs(k + 1, logp + std::log(p), out);
            return;
        }
        for (std::size_t v = 0; v < dist->size(); ++v) {
            const double p = (*dist)[v];
            if (p <= 0.0) continue;
            values_[st.x] = static_cast<int>(v);
            dfs(k + 1, logp + std::log(p), out);
        }
        values_[st.x] = -1;
    }

    const Network& net_;
    const std::vector<bool>& relevant_;
    std::vector<int> target_;
    Assignment target_list_;
    std::vector<Step> steps_;
    std::vector<int> values_;
};

}  // namespace

double joint_probability(const Network& net, std::span<const int> values) {
    if (values.size() != net.size()) throw Error("full assignment must give a value for every instance");
    for (std::size_t x = 0; x < net.size(); ++x) {
        if (values[x] < 0 || static_cast<std::size_t>(values[x]) >= net.domain_size(x))
            throw Error("no valid value for " + net.instance_name(x));
        if (net.is_structural(x) && net.is_constant(x) && values[x] != net.variable_of(x).constant_value) return 0.0;
    }
    if (!try_ancestral_ordering(net, values)) {
        std::vector<int> structural(values.size(), -1);
        for (auto x : net.structural_instances()) structural[x] = values[x];
        if (find_zero_witness(net, structural)) return 0.0;
        throw CyclicStructureError("assignment selects a cyclic structure that is not certified to have probability 0");
    }
    double logp = 0.0;
    std::vector<const InEdge*> active;
    for (std::size_t x = 0; x < net.size(); ++x) {
        active.clear();
        for (const auto& e : net.in_edges(x))
            if (net.edge_active(e, values)) active.push_back(&e);
        const auto* dist = net.distribution(x, active, values);
        if (!dist)
            throw MissingRowError("no CPD row for " + net.instance_name(x) + " under context " +
                                  net.context_key(x, active, values).to_string());
        const double p = (*dist)[static_cast<std::size_t>(values[x])];
        if (p <= 0.0) return 0.0;
        logp += std::log(p);
    }
    return std::exp(logp);
}

ExactResult exact_query(const Network& net, const Assignment& target, const Assignment& evidence,
                        const ExactOptions& options) {
    const auto n = net.size();
    std::vector<int> fixed = constant_structural_values(net);
    bool evidence_possible = true;
    for (const auto& [x, v] : evidence) {
        if (fixed[x] >= 0 && fixed[x] != v) evidence_possible = false;
        fixed[x] = v;
    }
    if (!evidence_possible) throw ZeroEvidenceError("evidence has probability 0");

    std::vector<int> target_vec(n, -1);
    for (const auto& [x, v] : target) target_vec[x] = v;

    // Instances that are not ancestors of the target or evidence (through
    // parents or gating) sum out to 1 and are skipped.
    std::vector<bool> relevant(n, false);
    std::vector<std::size_t> stack;
    for (const auto* list : {&target, &evidence})
        for (const auto& [x, v] : *list) stack.push_back(x);
    while (!stack.empty()) {
        const auto x = stack.back();
        stack.pop_back();
        if (relevant[x]) continue;
        relevant[x] = true;
        for (const auto& e : net.in_edges(x))
            for (auto y : {e.parent, e.mechanism, e.lag})
                if (!relevant[y]) stack.push_back(y);
    }

    std::vector<std::size_t> free;
    std::vector<int> radix;
    for (auto x : net.free_structural())
        if (fixed[x] < 0 && relevant[x]) {
            free.push_back(x);
            radix.push_back(static_cast<int>(net.domain_size(x)));
        }
    std::uint64_t structures = 1;
    for (int r : radix) structures = mul_sat(structures, static_cast<std::uint64_t>(r));
    std::uint64_t work = structures;
    for (std::size_t x = 0; x < n; ++x)
        if (relevant[x] && !net.is_structural(x) && fixed[x] < 0) work = mul_sat(work, net.domain_size(x));
    if (work > options.cap)
        throw EnumerationCapError("exact enumeration needs about " +
                                  (work == std::numeric_limits<std::uint64_t>::max() ? std::string("more than 2^64")
                                                                                     : std::to_string(work)) +
                                  " terms, above the cap of " + std::to_string(options.cap) +
                                  "; use --method lw for this model");

    constexpr std::uint64_t chunk = 64;
    const std::uint64_t chunks = (structures + chunk - 1) / chunk;
    std::vector<Pair> partial(chunks);
    std::vector<std::uint64_t> skipped(chunks, 0);
    std::vector<std::exception_ptr> failures(chunks);
    std::atomic<std::uint64_t> next{0};

    auto worker = [&]() {
        Enumerator en(net, relevant, target_vec, target);
        while (true) {
            const auto c = next.fetch_add(1);
            if (c >= chunks) return;
            try {
                for (std::uint64_t i = c * chunk; i < std::min(structures, (c + 1) * chunk); ++i) {
                    auto values = fixed;
                    auto idx = i;
                    for (std::size_t k = free.size(); k-- > 0;) {
                        values[free[k]] = static_cast<int>(idx % static_cast<std::uint64_t>(radix[k]));
                        idx /= static_cast<std::uint64_t>(radix[k]);
                    }
                    Pair p;
                    if (!en.run(std::move(values), p)) {
                        ++skipped[c];
                        continue;
                    }
                    partial[c].num.add(p.num);
                    partial[c].den.add(p.den);
                }
            } catch (...) {
                failures[c] = std::current_exception();
            }
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(chunks)));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);

    Pair total;
    ExactResult result;
    for (std::uint64_t c = 0; c < chunks; ++c) {
        total.num.add(partial[c].num);
        total.den.add(partial[c].den);
        result.skipped_cyclic += skipped[c];
    }
    result.structures = structures;
    result.evidence_probability = total.den.value();
    if (!(result.evidence_probability > 0.0)) throw ZeroEvidenceError("evidence has probability 0");
    result.p = total.num.value() / result.evidence_probability;
    return result;
}

std::vector<double> exact_marginal(const Network& net, std::size_t x, const Assignment& evidence,
                                   const ExactOptions& options) {
    std::vector<double> out;
    for (std::size_t v = 0; v < net.domain_size(x); ++v)
        out.push_back(exact_query(net, {{x, static_cast<int>(v)}}, evidence, options).p);
    return out;
}

// ---------------------------------------------------------------------------
// BN export

namespace {

// Last parent fastest. False once every combination has been visited.
bool advance_digits(std::vector<int>& digits, const std::vector<std::size_t>& parents, const Network& net) {
    for (std::size_t i = digits.size(); i-- > 0;) {
        if (++digits[i] < static_cast<int>(net.domain_size(parents[i]))) return true;
        digits[i] = 0;
    }
    return false;
}

}  // namespace

std::size_t ExportedBn::row_index(std::size_t node, std::span<const int> values) const {
    std::size_t idx = 0;
    for (auto p : nodes[node].parents) idx = idx * nodes[p].labels.size() + static_cast<std::size_t>(values[p]);
    return idx;
}

ExportedBn export_bn(const Network& net) {
    const auto n = net.size();
    std::vector<std::vector<std::size_t>> parents(n);
    for (std::size_t x = 0; x < n; ++x) {
        for (const auto& e : net.in_edges(x)) {
            parents[x].push_back(e.parent);
            if (!net.is_constant(e.mechanism)) parents[x].push_back(e.mechanism);
            if (!net.is_constant(e.lag)) parents[x].push_back(e.lag);
        }
        std::sort(parents[x].begin(), parents[x].end());
        parents[x].erase(std::unique(parents[x].begin(), parents[x].end()), parents[x].end());
    }

    std::vector<std::size_t> indegree(n, 0);
    std::vector<std::vector<std::size_t>> children(n);
    for (std::size_t x = 0; x < n; ++x)
        for (auto p : parents[x]) {
            ++indegree[x];
            children[p].push_back(x);
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
    if (placed != n)
        throw ModelError("BN export needs the candidate and gating edges to form an acyclic graph; this model's do not");

    ExportedBn bn;
    bn.nodes.resize(n);
    const auto constants = constant_structural_values(net);
    std::vector<const InEdge*> active;
    for (std::size_t x = 0; x < n; ++x) {
        auto& node = bn.nodes[x];
        node.name = net.instance_name(x);
        node.labels = net.variable_of(x).labels;
        node.parents = parents[x];

        auto values = constants;
        std::vector<int> digits(node.parents.size(), 0);
        do {
            for (std::size_t i = 0; i < digits.size(); ++i) values[node.parents[i]] = digits[i];
            active.clear();
            for (const auto& e : net.in_edges(x))
                if (net.edge_active(e, values)) active.push_back(&e);
            const auto* dist = net.distribution(x, active, values);
            if (!dist)
                throw MissingRowError("no CPD row for " + node.name + " under context " +
                                      net.context_key(x, active, values).to_string());
            node.cpt.push_back(*dist);
        } while (advance_digits(digits, node.parents, net));
    }
    return bn;
}

double bn_joint(const ExportedBn& bn, std::span<const int> values) {
    double logp = 0.0;
    for (std::size_t x = 0; x < bn.nodes.size(); ++x) {
        const double p = bn.nodes[x].cpt[bn.row_index(x, values)][static_cast<std::size_t>(values[x])];
        if (p <= 0.0) return 0.0;
        logp += std::log(p);
    }
    return std::exp(logp);
}

std::string exported_bn_json(const ExportedBn& bn) {
    using ordered = nlohmann::ordered_json;
    ordered doc;
    doc["nodes"] = ordered::array();
    for (const auto& node : bn.nodes) {
        ordered j;
        j["name"] = node.name;
        j["labels"] = node.labels;
        ordered parents = ordered::array();
        for (auto p : node.parents) parents.push_back(bn.nodes[p].name);
        j["parents"] = parents;
        j["cpt"] = node.cpt;
        doc["nodes"].push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

}  // namespace mtbn
