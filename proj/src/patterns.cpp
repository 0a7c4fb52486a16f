#include "mtbn/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mtbn/cpd.hpp"
#include "mtbn/error.hpp"
#include "mtbn/network.hpp"

namespace mtbn {

namespace {

void add_fixed_mechanism(CondensedModel& m, const std::string& cause, const std::string& effect) {
    MechanismVariable mech{cause, effect, Constancy::constant_active};
    m.lags.push_back({mech.name(), {0}, true});
    m.mechanisms.push_back(std::move(mech));
}

void require_fresh(const CondensedModel& m, const std::string& name) {
    if (m.find_variable(name) || m.find_mechanism(name))
        throw ModelError("a variable named '" + name + "' already exists");
}

void replace_cpd(CondensedModel& m, CpdTable table) {
    if (auto* existing = m.find_cpd(table.variable))
        *existing = std::move(table);
    else
        m.cpds.push_back(std::move(table));
}

const ContextEntry* entry_for(const ContextKey& key, std::string_view parent) {
    for (const auto& e : key.entries())
        if (e.parent == parent) return &e;
    return nullptr;
}

ContextKey without(const ContextKey& key, std::string_view parent) {
    std::vector<ContextEntry> rest;
    for (const auto& e : key.entries())
        if (e.parent != parent) rest.push_back(e);
    return ContextKey(std::move(rest));
}

std::size_t label_index(const std::vector<std::string>& domain, const std::string& label) {
    auto it = std::find(domain.begin(), domain.end(), label);
    if (it == domain.end()) throw ModelError("'" + label + "' is not in the expected domain");
    return static_cast<std::size_t>(it - domain.begin());
}

std::vector<std::string> int_labels(const std::vector<int>& values) {
    std::vector<std::string> out;
    for (int v : values) out.push_back(std::to_string(v));
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Intervals

IntervalBuild make_interval(const CondensedModel& m, std::string_view name, std::vector<int> points,
                            const std::vector<double>& start_prior) {
    if (points.empty()) throw ModelError("interval " + std::string(name) + " needs a non-empty point domain");
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    for (int p : points)
        if (!m.range.contains(p))
            throw ModelError("interval point " + std::to_string(p) + " lies outside the temporal range");
    if (points.size() < 2) throw ModelError("interval " + std::string(name) + " needs at least two points");
    if (!start_prior.empty() && start_prior.size() != points.size())
        throw ModelError("start prior has " + std::to_string(start_prior.size()) + " entries for " +
                         std::to_string(points.size()) + " points");

    IntervalBuild out{m, {}};
    auto& spec = out.spec;
    spec.start = std::string(name) + "_START";
    spec.end = std::string(name) + "_END";
    spec.duration = std::string(name) + "_DUR";
    spec.points = points;
    for (const auto* n : {&spec.start, &spec.end, &spec.duration}) require_fresh(m, *n);

    std::vector<int> durations;
    for (int d = 0; d <= points.back() - points.front(); ++d) durations.push_back(d);
    const auto labels = int_labels(points);
    const auto dur_labels = int_labels(durations);

    auto& model = out.model;
    model.variables.push_back({spec.start, labels, Temporality::abstract, {}, {}});
    model.variables.push_back({spec.end, labels, Temporality::abstract, {}, {}});
    model.variables.push_back({spec.duration, dur_labels, Temporality::abstract, {}, {}});
    add_fixed_mechanism(model, spec.start, spec.end);
    add_fixed_mechanism(model, spec.start, spec.duration);
    add_fixed_mechanism(model, spec.end, spec.duration);
    model.cpds.push_back({spec.start, {{ContextKey::boundary(), start_prior.empty() ? uniform(points.size()) : start_prior}}});

    const Network net(model);
    replace_cpd(model, generate_cpd(net, spec.end, [&](const ContextKey& key) -> std::optional<std::vector<double>> {
        const int s = std::stoi(entry_for(key, spec.start)->value);
        std::vector<double> row(points.size(), 0.0);
        std::size_t admissible = 0;
        for (int p : points)
            if (p >= s) ++admissible;
        for (std::size_t i = 0; i < points.size(); ++i)
            if (points[i] >= s) row[i] = 1.0 / static_cast<double>(admissible);
        return row;
    }));
    replace_cpd(model, generate_cpd(net, spec.duration, [&](const ContextKey& key) -> std::optional<std::vector<double>> {
        const int s = std::stoi(entry_for(key, spec.start)->value);
        const int e = std::stoi(entry_for(key, spec.end)->value);
        return point_mass(durations.size(), static_cast<std::size_t>(std::max(0, e - s)));
    }));
    return out;
}

std::string relation_name(IntervalRelation r) {
    switch (r) {
        case IntervalRelation::before: return "before";
        case IntervalRelation::after: return "after";
        case IntervalRelation::coincides: return "coincides";
        case IntervalRelation::meets: return "meets";
        case IntervalRelation::follows: return "follows";
        case IntervalRelation::overlaps: return "overlaps";
        case IntervalRelation::is_overlapped_by: return "is_overlapped_by";
    }
    return "?";
}

const std::vector<IntervalRelation>& all_relations() {
    static const std::vector<IntervalRelation> all{IntervalRelation::before,   IntervalRelation::after,
                                                   IntervalRelation::coincides, IntervalRelation::meets,
                                                   IntervalRelation::follows,  IntervalRelation::overlaps,
                                                   IntervalRelation::is_overlapped_by};
    return all;
}

IntervalRelation interval_relation_value(int s1, int e1, int s2, int e2) {
    if (s1 > e1 || s2 > e2) throw ModelError("interval start after its end");
    if (s1 == s2 && e1 == e2) return IntervalRelation::coincides;
    if (e1 < s2) return IntervalRelation::before;
    if (s1 > e2) return IntervalRelation::after;
    if (e1 == s2) return IntervalRelation::meets;
    if (s1 == e2) return IntervalRelation::follows;
    // Remaining cases share interior points. Allen's during, starts,
    // finishes and their inverses fold into the two overlap relations.
    if (s1 < s2 || (s1 == s2 && e1 < e2)) return IntervalRelation::overlaps;
    return IntervalRelation::is_overlapped_by;
}

CondensedModel make_interval_relation(const CondensedModel& m, std::string_view name, const IntervalSpec& first,
                                      const IntervalSpec& second) {
    if (first.start == second.start) throw ModelError("interval relation needs two distinct intervals");
    const std::string rel(name);
    require_fresh(m, rel);
    CondensedModel out = m;
    std::vector<std::string> labels;
    for (auto r : all_relations()) labels.push_back(relation_name(r));
    out.variables.push_back({rel, labels, Temporality::abstract, {}, {}});
    for (const auto* src : {&first.start, &first.end, &second.start, &second.end}) add_fixed_mechanism(out, *src, rel);

    const Network net(out);
    replace_cpd(out, generate_cpd(net, rel, [&](const ContextKey& key) -> std::optional<std::vector<double>> {
        auto v = [&](const std::string& p) { return std::stoi(entry_for(key, p)->value); };
        const int s1 = v(first.start), e1 = v(first.end), s2 = v(second.start), e2 = v(second.end);
        // Endpoint combinations with start after end have probability 0
        // under the interval constraint; any normalized row will do.
        if (s1 > e1 || s2 > e2) return uniform(labels.size());
        return point_mass(labels.size(), static_cast<std::size_t>(interval_relation_value(s1, e1, s2, e2)));
    }));
    return out;
}

// ---------------------------------------------------------------------------
// Abstractions

CondensedModel make_abstraction(const CondensedModel& m, std::string_view name, std::vector<std::string> domain,
                                const std::vector<std::string>& sources, const AbstractionPredicate& predicate) {
    const std::string var(name);
    require_fresh(m, var);
    if (sources.empty()) throw ModelError("abstraction " + var + " needs at least one source");
    CondensedModel out = m;
    out.variables.push_back({var, domain, Temporality::abstract, {}, {}});
    for (const auto& src : sources) {
        if (!m.find_variable(src)) throw ModelError("abstraction source '" + src + "' is not an ordinary variable");
        add_fixed_mechanism(out, src, var);
    }
    const Network net(out);
    replace_cpd(out, generate_cpd(net, var, [&](const ContextKey& key) -> std::optional<std::vector<double>> {
        SourceValues values;
        for (const auto& e : key.entries()) {
            const auto inst = e.tag == ContextTag::at ? e.parent + "@" + std::to_string(e.offset) : e.parent;
            values[inst] = e.value;
        }
        const auto label = predicate(values);
        auto it = std::find(domain.begin(), domain.end(), label);
        if (it == domain.end())
            throw ModelError("abstraction predicate for " + var + " is not total: it returned '" + label +
                             "' for " + key.to_string());
        return point_mass(domain.size(), static_cast<std::size_t>(it - domain.begin()));
    }));
    return out;
}

// ---------------------------------------------------------------------------
// Manipulation

std::string manipulation_name(std::string_view target) {
    return std::string(target) + "_MANIP";
}

CondensedModel make_manipulation(const CondensedModel& m, std::string_view target,
                                 const std::optional<Availability>& availability) {
    const auto* tv = m.find_variable(target);
    if (!tv) throw ModelError("manipulation target '" + std::string(target) + "' is not an ordinary variable");
    for (const auto& v : m.variables)
        if (v.manipulates == tv->name)
            throw ModelError(tv->name + " is already bound to manipulation variable " + v.name);
    const auto* original = m.find_cpd(tv->name);
    if (!original) throw ModelError(tv->name + " has no CPD to manipulate");

    const std::string dummy = manipulation_name(tv->name);
    require_fresh(m, dummy);
    CondensedModel out = m;
    OrdinaryVariable dv{dummy, tv->domain, tv->temporality, tv->name, availability};
    dv.domain.push_back(std::string(kUnset));
    const auto target_domain = tv->domain;
    const auto target_name = tv->name;
    const auto original_rows = *original;
    out.variables.push_back(dv);
    add_fixed_mechanism(out, dummy, target_name);
    if (availability) {
        if (!m.find_variable(availability->gate))
            throw ModelError("availability gate '" + availability->gate + "' is not an ordinary variable");
        add_fixed_mechanism(out, availability->gate, dummy);
    }

    const Network net(out);
    const auto unset = dv.domain.size() - 1;
    out.cpds.push_back(generate_cpd(net, dummy, [&](const ContextKey&) -> std::optional<std::vector<double>> {
        return point_mass(dv.domain.size(), unset);
    }));
    replace_cpd(out, generate_cpd(net, target_name, [&](const ContextKey& key) -> std::optional<std::vector<double>> {
        const auto* d = entry_for(key, dummy);
        if (!d) return std::nullopt;
        if (d->value != kUnset) return point_mass(target_domain.size(), label_index(target_domain, d->value));
        const auto* row = original_rows.find(without(key, dummy));
        if (!row) return std::nullopt;
        return row->probabilities;
    }));
    return out;
}

Intervention apply_intervention(const CondensedModel& m, const std::vector<std::pair<std::string, std::string>>& bindings) {
    struct Bound {
        const OrdinaryVariable* dummy;
        std::string target;
        std::string value;
    };
    std::vector<Bound> bound;
    std::set<std::string> seen;
    for (const auto& [name, value] : bindings) {
        const OrdinaryVariable* dummy = nullptr;
        if (const auto* v = m.find_variable(name); v && v->manipulates) dummy = v;
        if (!dummy)
            for (const auto& v : m.variables)
                if (v.manipulates == name) dummy = &v;
        if (!dummy)
            throw ModelError("'" + name + "' has no manipulation variable; add one with make_manipulation first");
        const auto* target = m.find_variable(*dummy->manipulates);
        if (!target) throw ModelError("manipulation variable " + dummy->name + " names an unknown target");
        if (value == kUnset || std::find(target->domain.begin(), target->domain.end(), value) == target->domain.end())
            throw ModelError("'" + value + "' is not a value of " + target->name);
        if (!seen.insert(target->name).second) throw ModelError(target->name + " is bound more than once");
        bound.push_back({dummy, target->name, value});
    }

    Intervention result{m, {}};
    auto& out = result.model;
    for (const auto& b : bound) {
        for (auto& mech : out.mechanisms) {
            if (mech.effect != b.target || mech.cause == b.dummy->name) continue;
            mech.constancy = Constancy::constant_inactive;
            const auto name = mech.name();
            out.cpds.erase(std::remove_if(out.cpds.begin(), out.cpds.end(),
                                          [&](const CpdTable& t) { return t.variable == name; }),
                           out.cpds.end());
        }
    }

    const Network net(out);
    std::vector<CpdTable> tables;
    for (const auto& b : bound) {
        const auto* target = out.find_variable(b.target);
        const auto* current = out.find_cpd(b.target);
        const auto domain = target->domain;
        const auto& dummy_domain = b.dummy->domain;
        tables.push_back(generate_cpd(net, b.target, [&](const ContextKey& key) -> std::optional<std::vector<double>> {
            const auto* d = entry_for(key, b.dummy->name);
            if (!d) return std::nullopt;
            if (d->value != kUnset) return point_mass(domain.size(), label_index(domain, d->value));
            if (current)
                if (const auto* row = current->find(key)) return row->probabilities;
            return uniform(domain.size());
        }));
        tables.push_back(generate_cpd(net, b.dummy->name, [&](const ContextKey& key) -> std::optional<std::vector<double>> {
            bool allowed = true;
            if (b.dummy->availability) {
                const auto& a = *b.dummy->availability;
                const auto* g = entry_for(key, a.gate);
                auto it = g ? a.allowed.find(g->value) : a.allowed.end();
                allowed = it != a.allowed.end() &&
                          std::find(it->second.begin(), it->second.end(), b.value) != it->second.end();
            }
            return point_mass(dummy_domain.size(), label_index(dummy_domain, allowed ? b.value : std::string(kUnset)));
        }));
        if (b.dummy->temporality == Temporality::indexed) {
            for (int t = out.range.t1; t <= out.range.tn; ++t)
                result.clamp.push_back({{b.dummy->name, t}, b.value});
        } else {
            result.clamp.push_back({{b.dummy->name, std::nullopt}, b.value});
        }
    }
    for (auto& t : tables) replace_cpd(out, std::move(t));
    return result;
}

// ---------------------------------------------------------------------------
// Non-causal associations

std::string hidden_name(std::string_view a, std::string_view b) {
    return "H[" + std::string(a) + "--" + std::string(b) + "]";
}

CondensedModel transform_noncausal(const CondensedModel& m) {
    if (m.noncausal.empty()) return m;
    CondensedModel out = m;
    out.noncausal.clear();

    for (const auto& arc : m.noncausal) {
        const auto where = "noncausal arc " + arc.a + "--" + arc.b;
        if (arc.a == arc.b) throw ModelError(where + ": endpoints must differ");
        const auto* va = out.find_variable(arc.a);
        const auto* vb = out.find_variable(arc.b);
        if (!va || !vb) throw ModelError(where + ": endpoints must be ordinary variables");
        for (const auto& mech : out.mechanisms)
            if ((mech.cause == arc.a && mech.effect == arc.b) || (mech.cause == arc.b && mech.effect == arc.a))
                throw ModelError(where + ": the endpoints are already causally linked by " + mech.name());
        if (arc.joint_table.size() != va->domain.size())
            throw ModelError(where + ": joint table needs one row per value of " + arc.a);
        double sum = 0.0;
        std::vector<double> prior;
        for (const auto& row : arc.joint_table) {
            if (row.size() != vb->domain.size())
                throw ModelError(where + ": joint table needs one column per value of " + arc.b);
            for (double p : row) {
                if (!(p >= 0.0 && p <= 1.0)) throw ModelError(where + ": joint table entries must lie in [0, 1]");
                sum += p;
                prior.push_back(p);
            }
        }
        if (std::fabs(sum - 1.0) > kNormalizationTolerance) throw ModelError(where + ": joint table does not sum to 1");
        for (const auto& s : {arc.strength_a, arc.strength_b})
            if (s && !(*s >= 0.0 && *s <= 1.0)) throw ModelError(where + ": strength must lie in [0, 1]");

        const auto h = hidden_name(arc.a, arc.b);
        require_fresh(out, h);
        std::vector<std::string> labels;
        for (const auto& x : va->domain)
            for (const auto& y : vb->domain) labels.push_back(x + "|" + y);
        const bool indexed = va->temporality == Temporality::indexed && vb->temporality == Temporality::indexed;
        const auto a_domain = va->domain;
        const auto b_domain = vb->domain;

        // Mixture weight of the hidden cause per endpoint.
        auto weight = [&](const std::string& end, const std::optional<double>& strength) {
            bool other_parents = false;
            for (const auto& mech : out.mechanisms) {
                if (mech.effect != end) continue;
                const auto* cause = out.find_variable(mech.cause);
                if (cause && cause->manipulates) continue;
                other_parents = true;
            }
            if (strength) return *strength;
            if (other_parents)
                throw ModelError(where + ": " + end +
                                 " has other causal parents, so the association is not representable by a single "
                                 "common cause without an explicit strength");
            return 1.0;
        };
        const double lambda_a = weight(arc.a, arc.strength_a);
        const double lambda_b = weight(arc.b, arc.strength_b);

        out.variables.push_back({h, labels, indexed ? Temporality::indexed : Temporality::abstract, {}, {}});
        add_fixed_mechanism(out, h, arc.a);
        add_fixed_mechanism(out, h, arc.b);
        out.cpds.push_back({h, {{ContextKey::boundary(), prior}}});

        const Network net(out);
        std::vector<CpdTable> tables;
        for (int side = 0; side < 2; ++side) {
            const auto& end = side == 0 ? arc.a : arc.b;
            const auto& domain = side == 0 ? a_domain : b_domain;
            const double lambda = side == 0 ? lambda_a : lambda_b;
            const auto original = out.find_cpd(end) ? *out.find_cpd(end) : CpdTable{end, {}};
            tables.push_back(generate_cpd(net, end, [&](const ContextKey& key) -> std::optional<std::vector<double>> {
                const auto* he = entry_for(key, h);
                if (!he) return std::nullopt;
                const auto rest = without(key, h);
                const auto* orig = original.find(rest);
                for (const auto& e : rest.entries()) {
                    const auto* cause = out.find_variable(e.parent);
                    if (cause && cause->manipulates && e.value != kUnset) {
                        if (!orig) return std::nullopt;
                        return orig->probabilities;
                    }
                }
                const auto k = label_index(labels, he->value);
                const auto component = side == 0 ? k / b_domain.size() : k % b_domain.size();
                auto row = point_mass(domain.size(), component);
                if (lambda < 1.0) {
                    if (!orig) return std::nullopt;
                    for (std::size_t i = 0; i < row.size(); ++i)
                        row[i] = lambda * row[i] + (1.0 - lambda) * orig->probabilities[i];
                }
                return row;
            }));
        }
        for (auto& t : tables) replace_cpd(out, std::move(t));
    }
    return out;
}

}  // namespace mtbn
