#include "mtbn/sample.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <queue>
#include <thread>

#include "mtbn/error.hpp"

namespace mtbn {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

class Sampler {
public:
    explicit Sampler(const Network& net) : net_(net) {
        // Static order when candidate plus gating edges are acyclic.
        const auto n = net.size();
        std::vector<std::size_t> indegree(n, 0);
        std::vector<std::vector<std::size_t>> children(n);
        auto link = [&](std::size_t from, std::size_t to) {
            ++indegree[to];
            children[from].push_back(to);
        };
        for (std::size_t x = 0; x < n; ++x)
            for (const auto& e : net.in_edges(x)) {
                link(e.parent, x);
                link(e.mechanism, x);
                link(e.lag, x);
            }
        std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
        for (std::size_t x = 0; x < n; ++x)
            if (indegree[x] == 0) ready.push(x);
        while (!ready.empty()) {
            const auto x = ready.top();
            ready.pop();
            order_.push_back(x);
            for (auto c : children[x])
                if (--indegree[c] == 0) ready.push(c);
        }
        if (order_.size() != n) order_.clear();
    }

    // Draws sample `index`. Clamped instances (clamp >= 0) take the clamped
    // value and contribute their likelihood to the returned log weight; with
    // `reject` set they are drawn instead and the sample is abandoned (-inf)
    // on the first mismatch.
    double draw(std::uint64_t seed, std::uint64_t index, std::span<const int> clamp, bool reject,
                std::vector<int>& values) const {
        values.assign(net_.size(), -1);
        double logw = 0.0;
        auto visit = [&](std::size_t x) {
            const auto* dist = net_.distribution(x, values);
            if (!dist) {
                std::vector<const InEdge*> active;
                for (const auto& e : net_.in_edges(x))
                    if (net_.edge_active(e, values)) active.push_back(&e);
                throw MissingRowError("no CPD row for " + net_.instance_name(x) + " under context " +
                                      net_.context_key(x, active, values).to_string());
            }
            const int pinned = clamp.empty() ? -1 : clamp[x];
            if (pinned >= 0 && !reject) {
                const double p = (*dist)[static_cast<std::size_t>(pinned)];
                logw += p > 0.0 ? std::log(p) : kNegInf;
                values[x] = pinned;
                return true;
            }
            const double u = stream_uniform(seed, index, x);
            double cum = 0.0;
            int chosen = -1;
            for (std::size_t v = 0; v < dist->size(); ++v) {
                if ((*dist)[v] <= 0.0) continue;
                cum += (*dist)[v];
                chosen = static_cast<int>(v);
                if (u < cum) break;
            }
            values[x] = chosen;
            if (pinned >= 0 && chosen != pinned) {
                logw = kNegInf;
                return false;
            }
            return true;
        };

        if (!order_.empty()) {
            for (auto x : order_)
                if (!visit(x)) break;
            return logw;
        }

        // Dynamic readiness: an instance waits for its gating instances and
        // for the parents of the edges they turn on.
        std::size_t remaining = net_.size();
        while (remaining > 0) {
            bool progressed = false;
            for (std::size_t x = 0; x < net_.size(); ++x) {
                if (values[x] >= 0 || !ready(x, values)) continue;
                --remaining;
                progressed = true;
                if (!visit(x)) return logw;
                break;
            }
            if (!progressed)
                throw CyclicStructureError("sampling reached a structure with a directed cycle of active mechanisms");
        }
        return logw;
    }

private:
    bool ready(std::size_t x, std::span<const int> values) const {
        for (const auto& e : net_.in_edges(x)) {
            if (values[e.mechanism] < 0 || values[e.lag] < 0) return false;
            if (net_.edge_active(e, values) && values[e.parent] < 0) return false;
        }
        return true;
    }

    const Network& net_;
    std::vector<std::size_t> order_;
};

// Runs body(i) for i in [0, n) over contiguous blocks, one per worker.
void parallel_for(std::uint64_t n, unsigned workers, const std::function<void(std::uint64_t, std::uint64_t)>& body) {
    workers = std::max(1u, workers);
    if (workers == 1 || n < 2) {
        body(0, n);
        return;
    }
    std::vector<std::exception_ptr> failures(workers);
    std::vector<std::thread> pool;
    const std::uint64_t block = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const auto lo = std::min<std::uint64_t>(n, w * block);
        const auto hi = std::min<std::uint64_t>(n, lo + block);
        pool.emplace_back([&, w, lo, hi]() {
            try {
                body(lo, hi);
            } catch (...) {
                failures[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
}

struct Outcomes {
    std::vector<double> logw;
    std::vector<int> code;  // target value (single literal) or hit flag
};

Outcomes run_samples(const Network& net, const Assignment& target, const Assignment& evidence,
                     const SampleOptions& options, bool reject) {
    const Sampler sampler(net);
    std::vector<int> clamp(net.size(), -1);
    for (const auto& [x, v] : evidence) clamp[x] = v;
    Outcomes out;
    out.logw.resize(options.n);
    out.code.resize(options.n);
    parallel_for(options.n, options.workers, [&](std::uint64_t lo, std::uint64_t hi) {
        std::vector<int> values;
        for (auto i = lo; i < hi; ++i) {
            out.logw[i] = sampler.draw(options.seed, i, clamp, reject, values);
            if (target.size() == 1) {
                out.code[i] = values[target[0].first];
            } else {
                bool hit = true;
                for (const auto& [x, v] : target)
                    if (values[x] != v) hit = false;
                out.code[i] = hit ? 1 : 0;
            }
        }
    });
    return out;
}

SampleRun aggregate(const Network& net, const Assignment& target, const Outcomes& o, SamplingMethod method,
                    const SampleOptions& options) {
    SampleRun run;
    run.method = method;
    run.seed = options.seed;
    run.n = options.n;
    run.workers = std::max(1u, options.workers);

    double shift = kNegInf;
    for (double lw : o.logw) shift = std::max(shift, lw);
    if (shift == kNegInf)
        throw InconclusiveRunError(method == SamplingMethod::logic
                                       ? "no sample matched the evidence; increase --n or use --method lw"
                                       : "every sample has weight 0 under the evidence");

    const std::size_t slots = target.size() == 1 ? net.domain_size(target[0].first) : 2;
    std::vector<double> mass(slots, 0.0), comp(slots, 0.0);
    double total = 0.0, total_comp = 0.0, squares = 0.0;
    auto add = [](double& sum, double& c, double x) {
        const double t = sum + x;
        c += std::fabs(sum) >= std::fabs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    };
    for (std::size_t i = 0; i < o.logw.size(); ++i) {
        if (o.logw[i] == kNegInf) continue;
        const double w = std::exp(o.logw[i] - shift);
        add(total, total_comp, w);
        squares += w * w;
        add(mass[static_cast<std::size_t>(o.code[i])], comp[static_cast<std::size_t>(o.code[i])], w);
    }
    const double sum = total + total_comp;
    for (std::size_t k = 0; k < slots; ++k) mass[k] = (mass[k] + comp[k]) / sum;

    if (target.size() == 1) {
        run.estimates = mass;
        run.p = mass[static_cast<std::size_t>(target[0].second)];
    } else {
        run.p = mass[1];
        run.estimates = {run.p};
    }
    run.weight_sum = sum * std::exp(shift);
    run.ess = sum * sum / squares;
    return run;
}

void check_target(const Assignment& target) {
    if (target.empty()) throw Error("query needs a target");
}

}  // namespace

std::string method_name(SamplingMethod m) {
    return m == SamplingMethod::logic ? "ls" : "lw";
}

double stream_uniform(std::uint64_t seed, std::uint64_t sample, std::uint64_t instance) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ sample);
    h = splitmix64(h ^ instance);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::vector<std::vector<int>> forward_simulate(const Network& net, const SampleOptions& options) {
    const Sampler sampler(net);
    std::vector<std::vector<int>> out(options.n);
    parallel_for(options.n, options.workers, [&](std::uint64_t lo, std::uint64_t hi) {
        for (auto i = lo; i < hi; ++i) sampler.draw(options.seed, i, {}, false, out[i]);
    });
    return out;
}

SampleRun logic_sampling_query(const Network& net, const Assignment& target, const Assignment& evidence,
                               const SampleOptions& options) {
    check_target(target);
    const auto o = run_samples(net, target, evidence, options, true);
    return aggregate(net, target, o, SamplingMethod::logic, options);
}

SampleRun likelihood_weighting_query(const Network& net, const Assignment& target, const Assignment& evidence,
                                     const SampleOptions& options) {
    check_target(target);
    const auto o = run_samples(net, target, evidence, options, false);
    return aggregate(net, target, o, SamplingMethod::likelihood, options);
}

}  // namespace mtbn
