#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mtbn/model.hpp"

namespace mtbn {

/// A variable copy. Abstract variables (and structural variables whose cause
/// is abstract) have a single unstamped instance.
struct Instance {
    std::string variable;
    std::optional<int> stamp;

    /// "G@3", or "DM" for an unstamped instance.
    std::string name() const;
    auto operator<=>(const Instance&) const = default;
};

/// Parses "VAR@T" or "VAR". Throws ModelError on a malformed stamp.
Instance parse_instance(std::string_view text);

/// parent -> child, gated by `mechanism` being active and `lag` taking `lag_value`.
/// Indices refer to DeployedGraph::instances().
struct CandidateEdge {
    std::size_t parent;
    std::size_t child;
    std::size_t mechanism;
    std::size_t lag;
    int lag_value;

    bool operator==(const CandidateEdge&) const = default;
};

enum class VariableKind { ordinary, mechanism, lag };

/// Resolved view over every variable of a model (ordinary, mechanism, lag),
/// with ids assigned in canonical-name order.
struct VariableInfo {
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::string name;
    VariableKind kind = VariableKind::ordinary;
    std::vector<std::string> labels;
    bool stamped = true;
    // Index into labels of the fixed value of a constant structural variable.
    int constant_value = -1;

    std::size_t cause = npos;      // mechanism
    std::size_t effect = npos;     // mechanism
    std::size_t lag = npos;        // mechanism: its lag variable
    std::size_t mechanism = npos;  // lag: its mechanism
    std::vector<int> lag_values;   // lag: numeric value of each label
    Constancy constancy = Constancy::dynamic;

    bool structural() const { return kind != VariableKind::ordinary; }
    bool constant() const { return constant_value >= 0; }
};

class VariableTable {
public:
    VariableTable() = default;
    /// Throws ModelError when references do not resolve.
    explicit VariableTable(const CondensedModel& model);

    std::size_t size() const { return vars_.size(); }
    const VariableInfo& operator[](std::size_t id) const { return vars_[id]; }
    std::optional<std::size_t> find(std::string_view name) const;
    std::size_t id_of(std::string_view name) const;
    const std::vector<VariableInfo>& all() const { return vars_; }

private:
    std::vector<VariableInfo> vars_;
};

class DeployedGraph {
public:
    DeployedGraph() = default;
    DeployedGraph(TemporalRange range, std::vector<Instance> instances, std::vector<std::size_t> variable_ids,
                  std::vector<CandidateEdge> edges);

    TemporalRange range() const { return range_; }
    const std::vector<Instance>& instances() const { return instances_; }
    const std::vector<CandidateEdge>& edges() const { return edges_; }
    std::size_t variable_id(std::size_t instance) const { return variable_ids_[instance]; }

    std::optional<std::size_t> find(const Instance& instance) const;
    /// Throws UnknownInstanceError.
    std::size_t index_of(const Instance& instance) const;
    /// Indices into edges() of the candidate edges ending at `child`.
    std::span<const std::size_t> edges_into(std::size_t child) const;

private:
    TemporalRange range_;
    std::vector<Instance> instances_;
    std::vector<std::size_t> variable_ids_;
    std::vector<CandidateEdge> edges_;
    std::vector<std::size_t> in_offsets_;
    std::vector<std::size_t> in_edges_;
    std::vector<std::size_t> sorted_by_name_;
};

/// Standard deployment over the model's temporal range. Instances are ordered
/// unstamped first, then by stamp, then by canonical name.
DeployedGraph deploy_model(const CondensedModel& model);
DeployedGraph deploy_model(const CondensedModel& model, const VariableTable& variables);

struct CandidateParent {
    Instance parent;
    Instance mechanism;
    int lag_value;

    auto operator<=>(const CandidateParent&) const = default;
};

/// Throws UnknownInstanceError when `x` is not deployed.
std::vector<CandidateParent> candidate_parents(const DeployedGraph& graph, const Instance& x);

/// JSON listing of instances and candidate edges.
std::string deployed_graph_json(const DeployedGraph& graph);

}  // namespace mtbn
