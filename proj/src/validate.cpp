#include "mtbn/validate.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "mtbn/cpd.hpp"
#include "mtbn/deploy.hpp"
#include "mtbn/error.hpp"
#include "mtbn/network.hpp"
#include "mtbn/structure.hpp"

namespace mtbn {

std::string format_diagnostic(const Diagnostic& d) {
    return std::string(d.severity == Severity::error ? "error" : "warning") + "[" + d.code + "]: " + d.message;
}

ValidationReport check_references(const CondensedModel& model) {
    ValidationReport r;
    if (model.range.t1 > model.range.tn)
        r.push_back(error("range", "t1 (" + std::to_string(model.range.t1) + ") is after tn (" +
                                       std::to_string(model.range.tn) + ")"));
    if (model.granularity.unit_label.empty()) r.push_back(error("granularity", "granularity label is empty"));

    std::map<std::string, std::vector<std::string>> domains;
    std::set<std::string> ordinary;
    auto declare = [&](const std::string& name, std::vector<std::string> labels) {
        if (name.empty()) {
            r.push_back(error("name", "variable name is empty"));
            return;
        }
        if (!domains.emplace(name, std::move(labels)).second)
            r.push_back(error("duplicate-name", "name '" + name + "' is declared more than once"));
    };

    for (const auto& v : model.variables) {
        if (v.name.find_first_of("@=,") != std::string::npos)
            r.push_back(error("name", "variable name '" + v.name + "' may not contain '@', '=' or ','"));
        if (v.domain.size() < 2)
            r.push_back(error("domain", "variable " + v.name + " needs at least two values"));
        std::set<std::string> seen;
        for (const auto& label : v.domain) {
            if (label.empty() || label.find(',') != std::string::npos)
                r.push_back(error("domain", "variable " + v.name + " has an empty value or one containing ','"));
            if (!seen.insert(label).second)
                r.push_back(error("domain", "variable " + v.name + " lists value '" + label + "' twice"));
        }
        ordinary.insert(v.name);
        declare(v.name, v.domain);
    }
    for (const auto& m : model.mechanisms) declare(m.name(), {std::string(kActive), std::string(kInactive)});
    for (const auto& l : model.lags) {
        std::vector<std::string> labels;
        for (int v : l.values) labels.push_back(std::to_string(v));
        declare(l.name(), labels);
    }

    for (const auto& m : model.mechanisms) {
        if (!domains.count(m.cause))
            r.push_back(error("dangling-reference", "mechanism " + m.name() + ": cause '" + m.cause + "' is not declared"));
        if (!domains.count(m.effect))
            r.push_back(
                error("dangling-reference", "mechanism " + m.name() + ": effect '" + m.effect + "' is not declared"));
    }

    std::map<std::string, int> lag_count;
    for (const auto& l : model.lags) {
        if (!model.find_mechanism(l.mechanism))
            r.push_back(error("dangling-reference", "lag " + l.name() + ": mechanism '" + l.mechanism + "' is not declared"));
        ++lag_count[l.mechanism];
        if (l.values.empty()) r.push_back(error("lag-domain", "lag " + l.name() + " has no values"));
        std::set<int> seen;
        for (int v : l.values) {
            if (v < 0) r.push_back(error("lag-domain", "lag " + l.name() + " has negative value " + std::to_string(v)));
            if (!seen.insert(v).second)
                r.push_back(error("lag-domain", "lag " + l.name() + " lists value " + std::to_string(v) + " twice"));
        }
        if (const auto* m = model.find_mechanism(l.mechanism);
            m && m->cause == m->effect && std::find(l.values.begin(), l.values.end(), 0) != l.values.end())
            r.push_back(error("self-loop", "mechanism " + m->name() + " links a variable to itself and needs a lag above 0"));
        if (l.constant && l.values.size() != 1)
            r.push_back(error("lag-domain", "constant lag " + l.name() + " must have exactly one value"));
    }
    for (const auto& m : model.mechanisms) {
        auto it = lag_count.find(m.name());
        if (it == lag_count.end())
            r.push_back(error("missing-lag", "mechanism " + m.name() + " has no lag variable"));
        else if (it->second > 1)
            r.push_back(error("duplicate-lag", "mechanism " + m.name() + " has more than one lag variable"));
    }

    for (const auto& v : model.variables) {
        if (v.manipulates) {
            if (!ordinary.count(*v.manipulates))
                r.push_back(error("manipulation", "variable " + v.name + " manipulates unknown variable '" +
                                                      *v.manipulates + "'"));
        }
        if (v.availability) {
            const auto& a = *v.availability;
            auto gate = domains.find(a.gate);
            if (gate == domains.end()) {
                r.push_back(error("dangling-reference", "availability of " + v.name + ": gate '" + a.gate + "' is not declared"));
            } else {
                for (const auto& [g, allowed] : a.allowed) {
                    if (std::find(gate->second.begin(), gate->second.end(), g) == gate->second.end())
                        r.push_back(error("availability", "availability of " + v.name + ": '" + g +
                                                              "' is not a value of " + a.gate));
                    for (const auto& opt : allowed)
                        if (std::find(v.domain.begin(), v.domain.end(), opt) == v.domain.end())
                            r.push_back(error("availability", "availability of " + v.name + ": '" + opt +
                                                                  "' is not a value of " + v.name));
                }
            }
        }
    }

    std::set<std::string> with_cpd;
    for (const auto& c : model.cpds) {
        if (!domains.count(c.variable))
            r.push_back(error("dangling-reference", "CPD for undeclared variable '" + c.variable + "'"));
        if (!with_cpd.insert(c.variable).second)
            r.push_back(error("duplicate-cpd", "variable " + c.variable + " has more than one CPD"));
        std::set<ContextKey> keys;
        for (const auto& row : c.rows) {
            if (!keys.insert(row.context).second)
                r.push_back(error("duplicate-row", "CPD of " + c.variable + " repeats row " + row.context.to_string()));
            for (const auto& e : row.context.entries()) {
                if (!domains.count(e.parent))
                    r.push_back(error("dangling-reference", "CPD of " + c.variable + ": context names undeclared parent '" +
                                                                e.parent + "'"));
                if (e.tag == ContextTag::lag && e.offset < 0)
                    r.push_back(error("context", "CPD of " + c.variable + ": negative lag in row " + row.context.to_string()));
            }
        }
    }

    for (const auto& nc : model.noncausal) {
        for (const auto* end : {&nc.a, &nc.b})
            if (!ordinary.count(*end))
                r.push_back(error("dangling-reference", "noncausal arc names undeclared variable '" + *end + "'"));
    }

    if (has_errors(r)) return r;

    // Stampedness is only known once every reference resolves.
    try {
        VariableTable vars(model);
        for (const auto& m : model.mechanisms) {
            const auto& cause = vars[vars.id_of(m.cause)];
            const auto& effect = vars[vars.id_of(m.effect)];
            if (cause.stamped && effect.stamped) continue;
            const auto* lag = model.find_lag_of(m.name());
            if (lag && !(lag->values.size() == 1 && lag->values[0] == 0))
                r.push_back(error("abstract-lag", "mechanism " + m.name() +
                                                      " touches an abstract variable and needs a constant lag of 0"));
        }
    } catch (const ModelError& e) {
        r.push_back(error("reference", e.what()));
    }
    return r;
}

ValidationReport validate_model(const CondensedModel& model) {
    auto report = check_references(model);
    if (has_errors(report)) return report;
    try {
        const Network net(model);
        auto cpd = validate_cpds(net);
        report.insert(report.end(), cpd.begin(), cpd.end());
        if (has_errors(report)) return report;
        auto cert = check_well_defined(net);
        report.insert(report.end(), cert.diagnostics.begin(), cert.diagnostics.end());
        if (!cert.certified && cert.diagnostics.empty())
            report.push_back(error("well-definedness", "model could not be certified well defined"));
    } catch (const Error& e) {
        report.push_back(error("model", e.what()));
    }
    return report;
}

}  // namespace mtbn
