#include "mtbn/model.hpp"

#include <algorithm>

namespace mtbn {

std::string mechanism_name(std::string_view cause, std::string_view effect) {
    std::string name;
    name.reserve(cause.size() + effect.size() + 4);
    name += '[';
    name += cause;
    name += "->";
    name += effect;
    name += ']';
    return name;
}

std::string lag_name(std::string_view mechanism) {
    return "LAG" + std::string(mechanism);
}

ContextKey::ContextKey(std::vector<ContextEntry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end());
}

std::string ContextKey::to_string() const {
    if (entries_.empty()) return "boundary";
    std::string out = "{";
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (i) out += ", ";
        out += e.parent;
        out += e.tag == ContextTag::lag ? "@-" : "@";
        out += std::to_string(e.offset);
        out += '=';
        out += e.value;
    }
    return out + "}";
}

const CpdRow* CpdTable::find(const ContextKey& key) const {
    for (const auto& row : rows)
        if (row.context == key) return &row;
    return nullptr;
}

const OrdinaryVariable* CondensedModel::find_variable(std::string_view name) const {
    for (const auto& v : variables)
        if (v.name == name) return &v;
    return nullptr;
}

const MechanismVariable* CondensedModel::find_mechanism(std::string_view name) const {
    for (const auto& m : mechanisms)
        if (m.name() == name) return &m;
    return nullptr;
}

const LagVariable* CondensedModel::find_lag_of(std::string_view mechanism) const {
    for (const auto& l : lags)
        if (l.mechanism == mechanism) return &l;
    return nullptr;
}

const CpdTable* CondensedModel::find_cpd(std::string_view variable) const {
    for (const auto& c : cpds)
        if (c.variable == variable) return &c;
    return nullptr;
}

CpdTable* CondensedModel::find_cpd(std::string_view variable) {
    for (auto& c : cpds)
        if (c.variable == variable) return &c;
    return nullptr;
}

CondensedModel with_range(CondensedModel model, int t1, int tn) {
    model.range = TemporalRange{t1, tn};
    return model;
}

std::vector<StructuralVariable> structural_variable_set(const CondensedModel& model) {
    std::vector<StructuralVariable> out;
    out.reserve(model.mechanisms.size() + model.lags.size());
    for (const auto& m : model.mechanisms)
        out.push_back({m.name(), StructuralKind::mechanism, m.constancy != Constancy::dynamic});
    for (const auto& l : model.lags)
        out.push_back({l.name(), StructuralKind::lag, l.constant || l.values.size() == 1});
    std::sort(out.begin(), out.end(),
              [](const StructuralVariable& a, const StructuralVariable& b) { return a.name < b.name; });
    return out;
}

}  // namespace mtbn
