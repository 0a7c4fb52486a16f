#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mtbn/network.hpp"
#include "mtbn/query.hpp"

namespace mtbn {

inline constexpr std::uint64_t kDefaultEnumerationCap = 100'000'000;

struct ExactOptions {
    // Upper bound on structures x completions of the free ordinary instances.
    std::uint64_t cap = kDefaultEnumerationCap;
    unsigned workers = 1;
};

struct ExactResult {
    double p = 0.0;
    double evidence_probability = 0.0;
    std::uint64_t structures = 0;
    // Cyclic structures skipped because they are zero-certified.
    std::uint64_t skipped_cyclic = 0;
};

/// Product of the CPD factors of a full assignment (one value per instance).
/// Returns 0 when a constant structural instance carries another value, or
/// when the structure is cyclic but zero-certified. Throws
/// CyclicStructureError for other cyclic structures and MissingRowError when
/// a factor has no row.
double joint_probability(const Network& net, std::span<const int> values);

/// p(target | evidence) by summing the factorized joint over all acyclic
/// structures and completions. Throws ZeroEvidenceError when p(evidence) = 0
/// and EnumerationCapError when the sum would exceed the cap.
ExactResult exact_query(const Network& net, const Assignment& target, const Assignment& evidence,
                        const ExactOptions& options = {});

/// Posterior distribution of one instance.
std::vector<double> exact_marginal(const Network& net, std::size_t x, const Assignment& evidence,
                                   const ExactOptions& options = {});

/// Standard BN over the deployed instances. Node i is instance i; its parents
/// are its candidate parents plus the non-constant structural instances that
/// gate them, in instance order. CPT rows follow the parents' value
/// combinations with the last parent varying fastest.
struct BnNode {
    std::string name;
    std::vector<std::string> labels;
    std::vector<std::size_t> parents;
    std::vector<std::vector<double>> cpt;
};

struct ExportedBn {
    std::vector<BnNode> nodes;

    std::size_t row_index(std::size_t node, std::span<const int> values) const;
};

/// Throws ModelError when candidate and gating edges together form a cycle.
ExportedBn export_bn(const Network& net);

double bn_joint(const ExportedBn& bn, std::span<const int> values);

std::string exported_bn_json(const ExportedBn& bn);

}  // namespace mtbn
