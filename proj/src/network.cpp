#include "mtbn/network.hpp"

#include <algorithm>
#include <charconv>
#include <tuple>

#include <json.hpp>

#include "mtbn/error.hpp"
#include "mtbn/validate.hpp"

namespace mtbn {

std::string Instance::name() const {
    return stamp ? variable + "@" + std::to_string(*stamp) : variable;
}

Instance parse_instance(std::string_view text) {
    auto at = text.rfind('@');
    if (at == std::string_view::npos) return {std::string(text), std::nullopt};
    auto digits = text.substr(at + 1);
    int stamp = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), stamp);
    if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size())
        throw ModelError("malformed instance '" + std::string(text) + "': expected VAR@T with integer T");
    return {std::string(text.substr(0, at)), stamp};
}

// ---------------------------------------------------------------------------
// VariableTable

VariableTable::VariableTable(const CondensedModel& model) {
    for (const auto& v : model.variables) {
        VariableInfo info;
        info.name = v.name;
        info.kind = VariableKind::ordinary;
        info.labels = v.domain;
        info.stamped = v.temporality == Temporality::indexed;
        vars_.push_back(std::move(info));
    }
    for (const auto& m : model.mechanisms) {
        VariableInfo info;
        info.name = m.name();
        info.kind = VariableKind::mechanism;
        info.labels = {std::string(kActive), std::string(kInactive)};
        info.constancy = m.constancy;
        if (m.constancy == Constancy::constant_active) info.constant_value = 0;
        if (m.constancy == Constancy::constant_inactive) info.constant_value = 1;
        vars_.push_back(std::move(info));
    }
    for (const auto& l : model.lags) {
        VariableInfo info;
        info.name = l.name();
        info.kind = VariableKind::lag;
        info.lag_values = l.values;
        for (int v : l.values) info.labels.push_back(std::to_string(v));
        if (l.constant || l.values.size() == 1) info.constant_value = 0;
        vars_.push_back(std::move(info));
    }
    std::sort(vars_.begin(), vars_.end(), [](const VariableInfo& a, const VariableInfo& b) { return a.name < b.name; });
    for (std::size_t i = 1; i < vars_.size(); ++i)
        if (vars_[i].name == vars_[i - 1].name) throw ModelError("duplicate variable name '" + vars_[i].name + "'");

    for (const auto& m : model.mechanisms) {
        auto& info = vars_[id_of(m.name())];
        auto cause = find(m.cause);
        auto effect = find(m.effect);
        if (!cause) throw ModelError("mechanism " + info.name + ": unknown cause '" + m.cause + "'");
        if (!effect) throw ModelError("mechanism " + info.name + ": unknown effect '" + m.effect + "'");
        info.cause = *cause;
        info.effect = *effect;
    }
    for (const auto& l : model.lags) {
        auto mech = find(l.mechanism);
        if (!mech || vars_[*mech].kind != VariableKind::mechanism)
            throw ModelError("lag " + l.name() + ": unknown mechanism '" + l.mechanism + "'");
        auto& lag = vars_[id_of(l.name())];
        lag.mechanism = *mech;
        if (vars_[*mech].lag != VariableInfo::npos)
            throw ModelError("mechanism " + l.mechanism + " has more than one lag variable");
        vars_[*mech].lag = id_of(l.name());
    }
    for (const auto& v : vars_)
        if (v.kind == VariableKind::mechanism && v.lag == VariableInfo::npos)
            throw ModelError("mechanism " + v.name + " has no lag variable");

    // A structural variable is stamped iff the cause of its mechanism is.
    // Chains of arcs out of arcs are resolved by walking to an ordinary cause.
    for (auto& v : vars_) {
        if (!v.structural()) continue;
        std::size_t cur = v.kind == VariableKind::lag ? v.mechanism : id_of(v.name);
        for (std::size_t guard = 0; guard <= vars_.size(); ++guard) {
            const auto& c = vars_[cur];
            if (c.kind == VariableKind::ordinary) break;
            cur = c.kind == VariableKind::lag ? c.mechanism : c.cause;
        }
        if (vars_[cur].kind != VariableKind::ordinary)
            throw ModelError("cannot resolve the cause chain of " + v.name);
        v.stamped = vars_[cur].stamped;
    }
}

std::optional<std::size_t> VariableTable::find(std::string_view name) const {
    auto it = std::lower_bound(vars_.begin(), vars_.end(), name,
                               [](const VariableInfo& v, std::string_view n) { return v.name < n; });
    if (it == vars_.end() || it->name != name) return std::nullopt;
    return static_cast<std::size_t>(it - vars_.begin());
}

std::size_t VariableTable::id_of(std::string_view name) const {
    auto id = find(name);
    if (!id) throw ModelError("unknown variable '" + std::string(name) + "'");
    return *id;
}

// ---------------------------------------------------------------------------
// DeployedGraph

DeployedGraph::DeployedGraph(TemporalRange range, std::vector<Instance> instances, std::vector<std::size_t> variable_ids,
                             std::vector<CandidateEdge> edges)
    : range_(range), instances_(std::move(instances)), variable_ids_(std::move(variable_ids)), edges_(std::move(edges)) {
    in_offsets_.assign(instances_.size() + 1, 0);
    for (const auto& e : edges_) ++in_offsets_[e.child + 1];
    for (std::size_t i = 0; i < instances_.size(); ++i) in_offsets_[i + 1] += in_offsets_[i];
    in_edges_.resize(edges_.size());
    auto fill = in_offsets_;
    for (std::size_t k = 0; k < edges_.size(); ++k) in_edges_[fill[edges_[k].child]++] = k;

    sorted_by_name_.resize(instances_.size());
    for (std::size_t i = 0; i < instances_.size(); ++i) sorted_by_name_[i] = i;
    std::sort(sorted_by_name_.begin(), sorted_by_name_.end(),
              [this](std::size_t a, std::size_t b) { return instances_[a] < instances_[b]; });
}

std::optional<std::size_t> DeployedGraph::find(const Instance& instance) const {
    auto it = std::lower_bound(sorted_by_name_.begin(), sorted_by_name_.end(), instance,
                               [this](std::size_t i, const Instance& x) { return instances_[i] < x; });
    if (it == sorted_by_name_.end() || instances_[*it] != instance) return std::nullopt;
    return *it;
}

std::size_t DeployedGraph::index_of(const Instance& instance) const {
    auto idx = find(instance);
    if (!idx) throw UnknownInstanceError("unknown instance '" + instance.name() + "'");
    return *idx;
}

std::span<const std::size_t> DeployedGraph::edges_into(std::size_t child) const {
    return {in_edges_.data() + in_offsets_[child], in_offsets_[child + 1] - in_offsets_[child]};
}

DeployedGraph deploy_model(const CondensedModel& model) {
    return deploy_model(model, VariableTable(model));
}

DeployedGraph deploy_model(const CondensedModel& model, const VariableTable& vars) {
    const auto range = model.range;
    struct Pending {
        Instance inst;
        std::size_t var;
    };
    std::vector<Pending> pending;
    for (std::size_t id = 0; id < vars.size(); ++id) {
        if (vars[id].stamped) {
            for (int t = range.t1; t <= range.tn; ++t) pending.push_back({{vars[id].name, t}, id});
        } else {
            pending.push_back({{vars[id].name, std::nullopt}, id});
        }
    }
    // Unstamped first, then by stamp, then by canonical name.
    std::sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
        return std::make_tuple(a.inst.stamp.has_value(), a.inst.stamp.value_or(0), std::cref(a.inst.variable)) <
               std::make_tuple(b.inst.stamp.has_value(), b.inst.stamp.value_or(0), std::cref(b.inst.variable));
    });

    std::vector<Instance> instances;
    std::vector<std::size_t> ids;
    instances.reserve(pending.size());
    ids.reserve(pending.size());
    for (auto& p : pending) {
        instances.push_back(std::move(p.inst));
        ids.push_back(p.var);
    }
    DeployedGraph lookup(range, instances, ids, {});

    auto at = [&](std::size_t var, std::optional<int> stamp) {
        return *lookup.find(Instance{vars[var].name, stamp});
    };

    std::vector<CandidateEdge> edges;
    for (std::size_t id = 0; id < vars.size(); ++id) {
        const auto& m = vars[id];
        if (m.kind != VariableKind::mechanism) continue;
        const auto& cause = vars[m.cause];
        const auto& effect = vars[m.effect];
        const auto& lag_values = vars[m.lag].lag_values;
        for (int lag : lag_values) {
            if (lag < 0) continue;
            if (cause.stamped) {
                for (int s = range.t1; s <= range.tn; ++s) {
                    std::optional<int> child_stamp;
                    if (effect.stamped) {
                        if (s + lag > range.tn) continue;
                        child_stamp = s + lag;
                    }
                    edges.push_back({at(m.cause, s), at(m.effect, child_stamp), at(id, s), at(m.lag, s), lag});
                }
            } else if (effect.stamped) {
                for (int t = range.t1; t <= range.tn; ++t)
                    edges.push_back({at(m.cause, std::nullopt), at(m.effect, t), at(id, std::nullopt),
                                     at(m.lag, std::nullopt), lag});
            } else {
                edges.push_back({at(m.cause, std::nullopt), at(m.effect, std::nullopt), at(id, std::nullopt),
                                 at(m.lag, std::nullopt), lag});
            }
        }
    }
    return DeployedGraph(range, std::move(instances), std::move(ids), std::move(edges));
}

std::vector<CandidateParent> candidate_parents(const DeployedGraph& graph, const Instance& x) {
    const auto child = graph.index_of(x);
    std::vector<CandidateParent> out;
    for (auto k : graph.edges_into(child)) {
        const auto& e = graph.edges()[k];
        out.push_back({graph.instances()[e.parent], graph.instances()[e.mechanism], e.lag_value});
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string deployed_graph_json(const DeployedGraph& graph) {
    using ordered = nlohmann::ordered_json;
    ordered doc;
    doc["range"] = {{"t1", graph.range().t1}, {"tn", graph.range().tn}};
    doc["instances"] = ordered::array();
    for (const auto& inst : graph.instances()) {
        ordered j;
        j["name"] = inst.name();
        j["variable"] = inst.variable;
        j["stamp"] = inst.stamp ? ordered(*inst.stamp) : ordered(nullptr);
        doc["instances"].push_back(std::move(j));
    }
    doc["edges"] = ordered::array();
    const auto& inst = graph.instances();
    for (const auto& e : graph.edges()) {
        ordered j;
        j["parent"] = inst[e.parent].name();
        j["child"] = inst[e.child].name();
        j["mechanism"] = inst[e.mechanism].name();
        j["lag_variable"] = inst[e.lag].name();
        j["lag"] = e.lag_value;
        doc["edges"].push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Network

namespace {

CompiledCpd compile_cpd(const CpdTable& table, const VariableTable& vars, std::size_t owner) {
    CompiledCpd out;
    out.table = &table;
    const auto& owner_info = vars[owner];
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.context.is_boundary()) {
            if (out.boundary_row >= 0)
                out.problems.push_back("duplicate boundary row in CPD of " + owner_info.name);
            else
                out.boundary_row = static_cast<int>(r);
            continue;
        }
        std::vector<ParentSlot> slots;
        std::vector<std::size_t> values;
        bool ok = true;
        for (const auto& e : row.context.entries()) {
            auto pid = vars.find(e.parent);
            if (!pid) {
                out.problems.push_back("CPD of " + owner_info.name + ": row " + row.context.to_string() +
                                       " names unknown parent '" + e.parent + "'");
                ok = false;
                break;
            }
            const auto& labels = vars[*pid].labels;
            auto it = std::find(labels.begin(), labels.end(), e.value);
            if (it == labels.end()) {
                out.problems.push_back("CPD of " + owner_info.name + ": row " + row.context.to_string() +
                                       " uses value '" + e.value + "' outside the domain of " + e.parent);
                ok = false;
                break;
            }
            slots.push_back({*pid, e.tag, e.offset});
            values.push_back(static_cast<std::size_t>(it - labels.begin()));
        }
        if (!ok) continue;
        // Entries are sorted by parent name, and variable ids follow name order,
        // so slots come out sorted as well.
        auto [it, inserted] = out.tables.try_emplace(slots);
        auto& ct = it->second;
        if (inserted) {
            ct.slots = slots;
            ct.strides.resize(slots.size());
            std::size_t size = 1;
            for (std::size_t i = slots.size(); i-- > 0;) {
                ct.strides[i] = size;
                size *= vars[slots[i].variable].labels.size();
                if (size > (std::size_t{1} << 24)) {
                    out.problems.push_back("CPD of " + owner_info.name + ": parent template too large");
                    size = 0;
                    break;
                }
            }
            ct.row_of.assign(size, -1);
        }
        if (ct.row_of.empty()) continue;
        std::size_t idx = 0;
        for (std::size_t i = 0; i < values.size(); ++i) idx += values[i] * ct.strides[i];
        if (ct.row_of[idx] >= 0)
            out.problems.push_back("CPD of " + owner_info.name + ": duplicate row " + row.context.to_string());
        else
            ct.row_of[idx] = static_cast<int>(r);
    }
    return out;
}

}  // namespace

Network::Network(CondensedModel model) : model_(std::move(model)) {
    for (const auto& d : check_references(model_))
        if (d.severity == Severity::error) throw ModelError(d.code + ": " + d.message);
    vars_ = VariableTable(model_);
    graph_ = deploy_model(model_, vars_);

    const auto n = graph_.instances().size();
    in_offsets_.assign(n + 1, 0);
    for (std::size_t x = 0; x < n; ++x) {
        const auto& child = graph_.instances()[x];
        std::vector<InEdge> edges;
        for (auto k : graph_.edges_into(x)) {
            const auto& e = graph_.edges()[k];
            const auto& parent = graph_.instances()[e.parent];
            ParentSlot slot{graph_.variable_id(e.parent), ContextTag::lag, 0};
            if (!child.stamp && parent.stamp) {
                slot.tag = ContextTag::at;
                slot.offset = *parent.stamp;
            } else if (child.stamp && parent.stamp) {
                slot.offset = *child.stamp - *parent.stamp;
            }
            edges.push_back({e.parent, e.mechanism, e.lag, e.lag_value, slot});
        }
        std::sort(edges.begin(), edges.end(), [](const InEdge& a, const InEdge& b) { return a.slot < b.slot; });
        for (std::size_t i = 1; i < edges.size(); ++i)
            if (edges[i].slot == edges[i - 1].slot)
                throw ModelError("instance " + child.name() + " has two candidate parents in the same context slot (" +
                                 graph_.instances()[edges[i].parent].name() +
                                 "); mechanisms touching abstract variables need a constant lag of 0");
        in_edges_.insert(in_edges_.end(), edges.begin(), edges.end());
        in_offsets_[x + 1] = in_edges_.size();
    }

    for (std::size_t x = 0; x < n; ++x) {
        if (!is_structural(x)) continue;
        structural_.push_back(x);
        if (!is_constant(x)) free_.push_back(x);
    }
    std::sort(free_.begin(), free_.end(),
              [this](std::size_t a, std::size_t b) { return graph_.instances()[a] < graph_.instances()[b]; });

    cpds_.resize(vars_.size());
    for (const auto& table : model_.cpds) {
        auto id = vars_.find(table.variable);
        if (!id) continue;
        cpds_[*id] = compile_cpd(table, vars_, *id);
    }
    point_masses_.resize(vars_.size());
    for (std::size_t id = 0; id < vars_.size(); ++id) {
        if (!vars_[id].constant()) continue;
        point_masses_[id].assign(vars_[id].labels.size(), 0.0);
        point_masses_[id][static_cast<std::size_t>(vars_[id].constant_value)] = 1.0;
    }
}

int Network::value_index(std::size_t x, std::string_view label) const {
    const auto& labels = variable_of(x).labels;
    auto it = std::find(labels.begin(), labels.end(), label);
    return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}

std::span<const InEdge> Network::in_edges(std::size_t x) const {
    return {in_edges_.data() + in_offsets_[x], in_offsets_[x + 1] - in_offsets_[x]};
}

bool Network::edge_active(const InEdge& e, std::span<const int> values) const {
    return values[e.mechanism] == 0 && lag_number(e.lag, values[e.lag]) == e.lag_value;
}

const CompiledCpd* Network::compiled_cpd(std::size_t variable_id) const {
    return cpds_[variable_id].table ? &cpds_[variable_id] : nullptr;
}

const std::vector<double>* Network::distribution(std::size_t x, std::span<const int> values) const {
    if (is_constant(x)) return &point_masses_[graph_.variable_id(x)];
    thread_local std::vector<const InEdge*> active;
    active.clear();
    for (const auto& e : in_edges(x))
        if (edge_active(e, values)) active.push_back(&e);
    return distribution(x, active, values);
}

const std::vector<double>* Network::distribution(std::size_t x, std::span<const InEdge* const> active,
                                                 std::span<const int> values) const {
    const auto var = graph_.variable_id(x);
    if (vars_[var].constant()) return &point_masses_[var];
    const auto& cpd = cpds_[var];
    if (!cpd.table) return nullptr;
    if (active.empty()) {
        if (cpd.boundary_row < 0) return nullptr;
        return &cpd.table->rows[static_cast<std::size_t>(cpd.boundary_row)].probabilities;
    }
    thread_local std::vector<ParentSlot> key;
    key.clear();
    for (const auto* e : active) key.push_back(e->slot);
    auto it = cpd.tables.find(key);
    if (it == cpd.tables.end() || it->second.row_of.empty()) return nullptr;
    const auto& ct = it->second;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < active.size(); ++i)
        idx += static_cast<std::size_t>(values[active[i]->parent]) * ct.strides[i];
    const int row = ct.row_of[idx];
    if (row < 0) return nullptr;
    return &cpd.table->rows[static_cast<std::size_t>(row)].probabilities;
}

ContextKey Network::context_key(std::size_t x, std::span<const InEdge* const> active, std::span<const int> values) const {
    (void)x;
    std::vector<ContextEntry> entries;
    for (const auto* e : active) {
        const auto& pv = vars_[e->slot.variable];
        entries.push_back({pv.name, e->slot.tag, e->slot.offset,
                           pv.labels[static_cast<std::size_t>(values[e->parent])]});
    }
    return ContextKey(std::move(entries));
}

bool Network::for_each_context(
    std::size_t x, std::span<const int> fixed,
    const std::function<bool(std::span<const InEdge* const>, std::span<const int>)>& fn) const {
    const auto edges = in_edges(x);
    auto candidates = [&](std::size_t inst) {
        std::vector<int> out;
        if (fixed[inst] >= 0) {
            out.push_back(fixed[inst]);
        } else if (is_constant(inst)) {
            out.push_back(variable_of(inst).constant_value);
        } else {
            for (std::size_t v = 0; v < domain_size(inst); ++v) out.push_back(static_cast<int>(v));
        }
        return out;
    };

    // Per edge: can it be present, can it be absent?
    std::vector<std::pair<bool, bool>> options;
    for (const auto& e : edges) {
        bool present = false, absent = false;
        for (int mv : candidates(e.mechanism))
            for (int lv : candidates(e.lag)) {
                if (mv == 0 && lag_number(e.lag, lv) == e.lag_value)
                    present = true;
                else
                    absent = true;
            }
        options.emplace_back(present, absent);
    }

    std::vector<int> values(fixed.begin(), fixed.end());
    std::vector<const InEdge*> active;
    bool keep_going = true;

    auto enumerate_values = [&]() {
        std::vector<std::vector<int>> choices;
        for (const auto* e : active) choices.push_back(candidates(e->parent));
        std::vector<std::size_t> digit(active.size(), 0);
        while (true) {
            for (std::size_t i = 0; i < active.size(); ++i) values[active[i]->parent] = choices[i][digit[i]];
            if (!fn(active, values)) return false;
            std::size_t i = active.size();
            while (i > 0) {
                --i;
                if (++digit[i] < choices[i].size()) break;
                digit[i] = 0;
                if (i == 0) return true;
            }
            if (active.empty()) return true;
        }
    };

    std::function<void(std::size_t)> recurse = [&](std::size_t k) {
        if (!keep_going) return;
        if (k == edges.size()) {
            keep_going = enumerate_values();
            return;
        }
        if (options[k].second) recurse(k + 1);
        if (options[k].first && keep_going) {
            active.push_back(&edges[k]);
            recurse(k + 1);
            active.pop_back();
        }
    };
    recurse(0);
    return keep_going;
}

}  // namespace mtbn
