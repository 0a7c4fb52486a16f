#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mtbn/deploy.hpp"
#include "mtbn/model.hpp"

namespace mtbn {

/// Position of one parent in a context key: which variable, and where it sits
/// in time relative to the child.
struct ParentSlot {
    std::size_t variable;
    ContextTag tag;
    int offset;

    auto operator<=>(const ParentSlot&) const = default;
};

struct InEdge {
    std::size_t parent;
    std::size_t mechanism;
    std::size_t lag;
    int lag_value;
    ParentSlot slot;
};

/// Rows of one CPD sharing a parent template, laid out densely over the
/// parents' value combinations.
struct CompiledTable {
    std::vector<ParentSlot> slots;
    std::vector<std::size_t> strides;
    std::vector<int> row_of;  // -1 where no row was authored
};

struct CompiledCpd {
    const CpdTable* table = nullptr;
    int boundary_row = -1;
    std::map<std::vector<ParentSlot>, CompiledTable> tables;
    // Rows that could not be compiled, duplicate keys and similar.
    std::vector<std::string> problems;
};

/// A condensed model together with its deployment and compiled CPDs. This is
/// the working form every inference routine runs on. Immutable once built.
class Network {
public:
    explicit Network(CondensedModel model);

    Network(const Network&) = delete;
    Network& operator=(const Network&) = delete;

    const CondensedModel& model() const { return model_; }
    const VariableTable& variables() const { return vars_; }
    const DeployedGraph& graph() const { return graph_; }

    std::size_t size() const { return graph_.instances().size(); }
    const Instance& instance(std::size_t x) const { return graph_.instances()[x]; }
    std::string instance_name(std::size_t x) const { return graph_.instances()[x].name(); }
    const VariableInfo& variable_of(std::size_t x) const { return vars_[graph_.variable_id(x)]; }
    std::size_t domain_size(std::size_t x) const { return variable_of(x).labels.size(); }
    bool is_structural(std::size_t x) const { return variable_of(x).structural(); }
    bool is_constant(std::size_t x) const { return variable_of(x).constant(); }

    std::size_t index_of(const Instance& x) const { return graph_.index_of(x); }
    /// -1 when `label` is not in the domain.
    int value_index(std::size_t x, std::string_view label) const;

    /// Candidate edges into `x`, sorted by parent slot.
    std::span<const InEdge> in_edges(std::size_t x) const;

    const std::vector<std::size_t>& structural_instances() const { return structural_; }
    /// Non-constant structural instances in enumeration order (name, stamp).
    const std::vector<std::size_t>& free_structural() const { return free_; }

    int lag_number(std::size_t lag_instance, int value_index) const {
        return variable_of(lag_instance).lag_values[static_cast<std::size_t>(value_index)];
    }

    /// True iff the gating mechanism is active and the lag matches. `values`
    /// must assign both gating instances.
    bool edge_active(const InEdge& e, std::span<const int> values) const;

    /// Distribution of `x` given the values of its gating and active parent
    /// instances. Returns nullptr when the matching row is missing.
    const std::vector<double>* distribution(std::size_t x, std::span<const int> values) const;

    /// Same, with the active edge subset already known.
    const std::vector<double>* distribution(std::size_t x, std::span<const InEdge* const> active,
                                            std::span<const int> values) const;

    /// Context key naming the active parents and their values, for messages.
    ContextKey context_key(std::size_t x, std::span<const InEdge* const> active, std::span<const int> values) const;

    const CompiledCpd* compiled_cpd(std::size_t variable_id) const;

    /// Calls fn(active_edges, values) for every context of `x` reachable under
    /// the partial assignment `fixed` (-1 = free). Only the gating and parent
    /// entries of `values` are meaningful. Return false from fn to stop.
    /// Returns false iff stopped early.
    bool for_each_context(std::size_t x, std::span<const int> fixed,
                          const std::function<bool(std::span<const InEdge* const>, std::span<const int>)>& fn) const;

private:
    CondensedModel model_;
    VariableTable vars_;
    DeployedGraph graph_;
    std::vector<std::size_t> in_offsets_;
    std::vector<InEdge> in_edges_;
    std::vector<std::size_t> structural_;
    std::vector<std::size_t> free_;
    std::vector<CompiledCpd> cpds_;  // by variable id
    std::vector<std::vector<double>> point_masses_;  // by variable id, constant structural only
};

}  // namespace mtbn
