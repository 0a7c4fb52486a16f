#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mtbn/network.hpp"
#include "mtbn/query.hpp"

namespace mtbn {

enum class SamplingMethod { logic, likelihood };

std::string method_name(SamplingMethod m);

struct SampleOptions {
    std::uint64_t seed = 0;
    std::uint64_t n = 10'000;
    unsigned workers = 1;
};

struct SampleRun {
    SamplingMethod method = SamplingMethod::logic;
    std::uint64_t seed = 0;
    std::uint64_t n = 0;
    unsigned workers = 1;
    // Over the target instance's domain for a single-literal target,
    // otherwise a single entry for the conjunction.
    std::vector<double> estimates;
    double p = 0.0;
    // Logic sampling: accepted samples. Likelihood weighting: sum of weights.
    double weight_sum = 0.0;
    // Kish effective sample size.
    double ess = 0.0;
};

/// Uniform draw in [0, 1) for one (seed, sample, instance) triple. Streams do
/// not depend on how samples are split among workers.
double stream_uniform(std::uint64_t seed, std::uint64_t sample, std::uint64_t instance);

/// n ancestral samples, one value per instance each.
std::vector<std::vector<int>> forward_simulate(const Network& net, const SampleOptions& options);

/// Rejection estimate. Throws InconclusiveRunError when no sample matches
/// the evidence.
SampleRun logic_sampling_query(const Network& net, const Assignment& target, const Assignment& evidence,
                               const SampleOptions& options);

/// Evidence clamped, samples weighted by its likelihood. Throws
/// InconclusiveRunError when every weight is 0.
SampleRun likelihood_weighting_query(const Network& net, const Assignment& target, const Assignment& evidence,
                                     const SampleOptions& options);

}  // namespace mtbn
