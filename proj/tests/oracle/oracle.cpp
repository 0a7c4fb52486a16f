#include "oracle.hpp"

#include <stdexcept>

namespace oracle {

namespace {

bool stamped_variable(const mtbn::CondensedModel& m, const std::string& name) {
    if (const auto* v = m.find_variable(name)) return v->temporality == mtbn::Temporality::indexed;
    if (const auto* mech = m.find_mechanism(name)) return stamped_variable(m, mech->cause);
    for (const auto& l : m.lags)
        if (l.name() == name) return stamped_variable(m, l.mechanism);
    throw std::runtime_error("oracle: unknown variable " + name);
}

}  // namespace

BruteForce::BruteForce(mtbn::CondensedModel model) : model_(std::move(model)) {
    const auto& m = model_;
    auto add = [&](const std::string& var, std::vector<std::string> labels, int fixed) {
        if (stamped_variable(m, var)) {
            for (int t = m.range.t1; t <= m.range.tn; ++t) inst_.push_back({var, t, labels, fixed});
        } else {
            inst_.push_back({var, std::nullopt, labels, fixed});
        }
    };
    for (const auto& v : m.variables) add(v.name, v.domain, -1);
    for (const auto& mech : m.mechanisms) {
        int fixed = mech.constancy == mtbn::Constancy::constant_active     ? 0
                    : mech.constancy == mtbn::Constancy::constant_inactive ? 1
                                                                           : -1;
        add(mech.name(), {"active", "inactive"}, fixed);
    }
    for (const auto& l : m.lags) {
        std::vector<std::string> labels;
        for (int v : l.values) labels.push_back(std::to_string(v));
        add(l.name(), labels, l.constant ? 0 : -1);
    }
    for (std::size_t i = 0; i < inst_.size(); ++i) by_name_[inst_[i].name()] = static_cast<int>(i);

    auto at = [&](const std::string& var, std::optional<int> stamp) {
        return by_name_.at(Inst{var, stamp, {}, -1}.name());
    };

    parents_.resize(inst_.size());
    for (std::size_t x = 0; x < inst_.size(); ++x) {
        const auto& child = inst_[x];
        for (const auto& mech : m.mechanisms) {
            if (mech.effect != child.var) continue;
            const auto* lag = m.find_lag_of(mech.name());
            const bool cause_stamped = stamped_variable(m, mech.cause);
            std::vector<std::optional<int>> stamps;
            if (cause_stamped)
                for (int s = m.range.t1; s <= m.range.tn; ++s) stamps.push_back(s);
            else
                stamps.push_back(std::nullopt);
            for (auto s : stamps) {
                for (std::size_t li = 0; li < lag->values.size(); ++li) {
                    const int L = lag->values[li];
                    mtbn::ContextEntry slot{mech.cause, mtbn::ContextTag::lag, L, ""};
                    if (s && child.stamp) {
                        if (*child.stamp != *s + L) continue;
                    } else if (s && !child.stamp) {
                        slot = {mech.cause, mtbn::ContextTag::at, *s, ""};
                    } else {
                        slot.offset = 0;
                    }
                    parents_[x].push_back({at(mech.cause, s), at(mech.name(), s), at(lag->name(), s),
                                           static_cast<int>(li), slot});
                }
            }
        }
    }
}

int BruteForce::index(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw std::runtime_error("oracle: unknown instance " + name);
    return it->second;
}

int BruteForce::value(int x, const std::string& label) const {
    const auto& labels = inst_[static_cast<std::size_t>(x)].labels;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return static_cast<int>(i);
    throw std::runtime_error("oracle: bad label " + label);
}

std::vector<const BruteForce::Parent*> BruteForce::active(int x, const std::vector<int>& values) const {
    std::vector<const Parent*> out;
    for (const auto& p : parents_[static_cast<std::size_t>(x)])
        if (values[static_cast<std::size_t>(p.mechanism)] == 0 && values[static_cast<std::size_t>(p.lag)] == p.lag_value)
            out.push_back(&p);
    return out;
}

bool BruteForce::acyclic(const std::vector<int>& values) const {
    // 0 unvisited, 1 on stack, 2 done
    std::vector<int> state(inst_.size(), 0);
    std::function<bool(int)> visit = [&](int x) {
        auto& st = state[static_cast<std::size_t>(x)];
        if (st == 1) return false;
        if (st == 2) return true;
        st = 1;
        for (const auto* p : active(x, values))
            if (!visit(p->parent)) return false;
        st = 2;
        return true;
    };
    for (std::size_t x = 0; x < inst_.size(); ++x)
        if (!visit(static_cast<int>(x))) return false;
    return true;
}

double BruteForce::joint(const std::vector<int>& values) const {
    double p = 1.0;
    for (std::size_t x = 0; x < inst_.size(); ++x) {
        const auto& in = inst_[x];
        if (in.fixed >= 0) {
            if (values[x] != in.fixed) return 0.0;
            continue;
        }
        std::vector<mtbn::ContextEntry> entries;
        for (const auto* par : active(static_cast<int>(x), values)) {
            auto e = par->slot;
            const auto& pi = inst_[static_cast<std::size_t>(par->parent)];
            e.value = pi.labels[static_cast<std::size_t>(values[static_cast<std::size_t>(par->parent)])];
            entries.push_back(e);
        }
        const auto* table = model_.find_cpd(in.var);
        if (!table) throw std::runtime_error("oracle: no table for " + in.var);
        const auto* row = table->find(mtbn::ContextKey(entries));
        if (!row) throw std::runtime_error("oracle: no row for " + in.name());
        p *= row->probabilities[static_cast<std::size_t>(values[x])];
    }
    if (p > 0.0 && !acyclic(values)) throw std::runtime_error("oracle: cyclic structure with nonzero mass");
    return p;
}

void BruteForce::for_each(const std::function<void(const std::vector<int>&)>& fn) const {
    std::vector<int> values(inst_.size(), 0);
    std::vector<std::size_t> free;
    for (std::size_t x = 0; x < inst_.size(); ++x) {
        if (inst_[x].fixed >= 0)
            values[x] = inst_[x].fixed;
        else
            free.push_back(x);
    }
    while (true) {
        fn(values);
        std::size_t k = free.size();
        while (k > 0) {
            auto x = free[k - 1];
            if (++values[x] < static_cast<int>(inst_[x].labels.size())) break;
            values[x] = 0;
            --k;
        }
        if (k == 0) return;
    }
}

double BruteForce::probability(const Literals& literals) const {
    std::vector<std::pair<std::size_t, int>> want;
    for (const auto& [name, label] : literals) {
        int x = index(name);
        want.push_back({static_cast<std::size_t>(x), value(x, label)});
    }
    double total = 0.0;
    for_each([&](const std::vector<int>& v) {
        for (const auto& [x, val] : want)
            if (v[x] != val) return;
        total += joint(v);
    });
    return total;
}

double BruteForce::conditional(const Literals& target, const Literals& evidence) const {
    Literals both = evidence;
    both.insert(both.end(), target.begin(), target.end());
    const double pe = probability(evidence);
    if (pe == 0.0) throw std::runtime_error("oracle: evidence has probability 0");
    return probability(both) / pe;
}

}  // namespace oracle
