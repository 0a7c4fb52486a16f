#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mtbn/error.hpp"
#include "mtbn/model.hpp"
#include "mtbn/validate.hpp"

namespace mtbn {
namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
    throw ModelError(path + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) schema_error(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(path, std::string("missing field '") + key + "'");
    return *it;
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) schema_error(path, "expected a string");
    return v.get<std::string>();
}

int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) schema_error(path, "expected an integer");
    return v.get<int>();
}

double as_probability(const json& v, const std::string& path) {
    if (!v.is_number()) schema_error(path, "expected a number");
    return v.get<double>();
}

// Context values may be written as strings or, for lag parents, integers.
std::string as_label(const json& v, const std::string& path) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    schema_error(path, "expected a value label");
}

const json& require_array(const json& obj, const char* key, const std::string& path) {
    const auto& v = require(obj, key, path);
    if (!v.is_array()) schema_error(path + "/" + key, "expected an array");
    return v;
}

Temporality parse_temporality(const json& v, const std::string& path) {
    auto s = as_string(v, path);
    if (s == "indexed") return Temporality::indexed;
    if (s == "abstract") return Temporality::abstract;
    schema_error(path, "temporality must be 'indexed' or 'abstract', got '" + s + "'");
}

Constancy parse_constancy(const json& v, const std::string& path) {
    auto s = as_string(v, path);
    if (s == "constant-active") return Constancy::constant_active;
    if (s == "dynamic") return Constancy::dynamic;
    if (s == "constant-inactive") return Constancy::constant_inactive;
    schema_error(path, "constancy must be 'constant-active', 'dynamic' or 'constant-inactive', got '" + s + "'");
}

const char* constancy_text(Constancy c) {
    switch (c) {
        case Constancy::constant_active: return "constant-active";
        case Constancy::dynamic: return "dynamic";
        case Constancy::constant_inactive: return "constant-inactive";
    }
    return "";
}

OrdinaryVariable parse_variable(const json& v, const std::string& path) {
    OrdinaryVariable out;
    out.name = as_string(require(v, "name", path), path + "/name");
    const auto& dom = require_array(v, "domain", path);
    for (std::size_t i = 0; i < dom.size(); ++i)
        out.domain.push_back(as_label(dom[i], path + "/domain/" + std::to_string(i)));
    out.temporality = parse_temporality(require(v, "temporality", path), path + "/temporality");
    if (auto it = v.find("manipulates"); it != v.end())
        out.manipulates = as_string(*it, path + "/manipulates");
    if (auto it = v.find("availability"); it != v.end()) {
        const std::string apath = path + "/availability";
        Availability a;
        a.gate = as_string(require(*it, "gate", apath), apath + "/gate");
        const auto& allowed = require(*it, "allowed", apath);
        if (!allowed.is_object()) schema_error(apath + "/allowed", "expected an object");
        for (const auto& [gate_value, options] : allowed.items()) {
            if (!options.is_array()) schema_error(apath + "/allowed/" + gate_value, "expected an array");
            auto& list = a.allowed[gate_value];
            for (const auto& o : options) list.push_back(as_label(o, apath + "/allowed/" + gate_value));
        }
        out.availability = std::move(a);
    }
    return out;
}

LagVariable parse_lag(const json& v, const std::string& path) {
    LagVariable out;
    out.mechanism = as_string(require(v, "mechanism", path), path + "/mechanism");
    const bool has_constant = v.contains("constant");
    const bool has_domain = v.contains("domain");
    if (has_constant == has_domain) schema_error(path, "lag needs exactly one of 'domain' or 'constant'");
    if (has_constant) {
        out.constant = true;
        out.values.push_back(as_int(v.at("constant"), path + "/constant"));
    } else {
        const auto& dom = require_array(v, "domain", path);
        for (std::size_t i = 0; i < dom.size(); ++i)
            out.values.push_back(as_int(dom[i], path + "/domain/" + std::to_string(i)));
    }
    return out;
}

ContextKey parse_context(const json& v, const std::string& path) {
    if (v.is_string()) {
        if (v.get<std::string>() != "boundary") schema_error(path, "context must be \"boundary\" or an array");
        return ContextKey::boundary();
    }
    if (!v.is_array()) schema_error(path, "context must be \"boundary\" or an array");
    std::vector<ContextEntry> entries;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string epath = path + "/" + std::to_string(i);
        const auto& e = v[i];
        ContextEntry entry;
        entry.parent = as_string(require(e, "parent", epath), epath + "/parent");
        const bool has_lag = e.contains("lag");
        const bool has_at = e.contains("at");
        if (has_lag == has_at) schema_error(epath, "context entry needs exactly one of 'lag' or 'at'");
        entry.tag = has_lag ? ContextTag::lag : ContextTag::at;
        entry.offset = as_int(has_lag ? e.at("lag") : e.at("at"), epath);
        entry.value = as_label(require(e, "value", epath), epath + "/value");
        entries.push_back(std::move(entry));
    }
    if (entries.empty()) schema_error(path, "empty context; use \"boundary\"");
    return ContextKey(std::move(entries));
}

CpdTable parse_cpd(const json& v, const std::string& path) {
    CpdTable out;
    out.variable = as_string(require(v, "variable", path), path + "/variable");
    const auto& rows = require_array(v, "rows", path);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string rpath = path + "/rows/" + std::to_string(i);
        CpdRow row;
        row.context = parse_context(require(rows[i], "context", rpath), rpath + "/context");
        const auto& probs = require_array(rows[i], "probabilities", rpath);
        for (std::size_t k = 0; k < probs.size(); ++k)
            row.probabilities.push_back(as_probability(probs[k], rpath + "/probabilities/" + std::to_string(k)));
        out.rows.push_back(std::move(row));
    }
    return out;
}

NoncausalArc parse_noncausal(const json& v, const std::string& path) {
    NoncausalArc out;
    out.a = as_string(require(v, "a", path), path + "/a");
    out.b = as_string(require(v, "b", path), path + "/b");
    const auto& table = require_array(v, "joint_table", path);
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (!table[i].is_array()) schema_error(path + "/joint_table/" + std::to_string(i), "expected an array");
        std::vector<double> row;
        for (const auto& p : table[i]) row.push_back(as_probability(p, path + "/joint_table/" + std::to_string(i)));
        out.joint_table.push_back(std::move(row));
    }
    if (auto it = v.find("strength_a"); it != v.end()) out.strength_a = as_probability(*it, path + "/strength_a");
    if (auto it = v.find("strength_b"); it != v.end()) out.strength_b = as_probability(*it, path + "/strength_b");
    return out;
}

// nlohmann reports a byte offset; translate it to line and column.
std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

}  // namespace

CondensedModel parse_model(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        auto [line, column] = line_column(text, e.byte);
        std::string what = e.what();
        // Strip nlohmann's "[json.exception.parse_error.101] " prefix.
        if (auto pos = what.find("] "); pos != std::string::npos) what = what.substr(pos + 2);
        throw ParseError("syntax error: " + what, line, column);
    }
    if (!doc.is_object()) throw ModelError("/: model document must be an object");

    CondensedModel m;
    const auto& range = require(doc, "range", "");
    m.range.t1 = as_int(require(range, "t1", "/range"), "/range/t1");
    m.range.tn = as_int(require(range, "tn", "/range"), "/range/tn");
    m.granularity.unit_label = as_string(require(doc, "granularity", ""), "/granularity");

    const auto& vars = require_array(doc, "variables", "");
    for (std::size_t i = 0; i < vars.size(); ++i)
        m.variables.push_back(parse_variable(vars[i], "/variables/" + std::to_string(i)));

    if (doc.contains("mechanisms")) {
        const auto& mechs = require_array(doc, "mechanisms", "");
        for (std::size_t i = 0; i < mechs.size(); ++i) {
            const std::string path = "/mechanisms/" + std::to_string(i);
            MechanismVariable mv;
            mv.cause = as_string(require(mechs[i], "cause", path), path + "/cause");
            mv.effect = as_string(require(mechs[i], "effect", path), path + "/effect");
            mv.constancy = parse_constancy(require(mechs[i], "constancy", path), path + "/constancy");
            m.mechanisms.push_back(std::move(mv));
        }
    }
    if (doc.contains("lags")) {
        const auto& lags = require_array(doc, "lags", "");
        for (std::size_t i = 0; i < lags.size(); ++i)
            m.lags.push_back(parse_lag(lags[i], "/lags/" + std::to_string(i)));
    }
    if (doc.contains("cpds")) {
        const auto& cpds = require_array(doc, "cpds", "");
        for (std::size_t i = 0; i < cpds.size(); ++i)
            m.cpds.push_back(parse_cpd(cpds[i], "/cpds/" + std::to_string(i)));
    }
    if (doc.contains("noncausal")) {
        const auto& nc = require_array(doc, "noncausal", "");
        for (std::size_t i = 0; i < nc.size(); ++i)
            m.noncausal.push_back(parse_noncausal(nc[i], "/noncausal/" + std::to_string(i)));
    }

    for (const auto& d : check_references(m))
        if (d.severity == Severity::error) throw ModelError(d.code + ": " + d.message);
    return m;
}

CondensedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

std::string serialize_model(const CondensedModel& m) {
    ordered doc;
    doc["range"] = {{"t1", m.range.t1}, {"tn", m.range.tn}};
    doc["granularity"] = m.granularity.unit_label;

    doc["variables"] = ordered::array();
    for (const auto& v : m.variables) {
        ordered jv;
        jv["name"] = v.name;
        jv["domain"] = v.domain;
        jv["temporality"] = v.temporality == Temporality::indexed ? "indexed" : "abstract";
        if (v.manipulates) jv["manipulates"] = *v.manipulates;
        if (v.availability) {
            ordered allowed = ordered::object();
            for (const auto& [g, opts] : v.availability->allowed) allowed[g] = opts;
            jv["availability"] = {{"gate", v.availability->gate}, {"allowed", allowed}};
        }
        doc["variables"].push_back(std::move(jv));
    }

    doc["mechanisms"] = ordered::array();
    for (const auto& mv : m.mechanisms)
        doc["mechanisms"].push_back({{"cause", mv.cause}, {"effect", mv.effect}, {"constancy", constancy_text(mv.constancy)}});

    doc["lags"] = ordered::array();
    for (const auto& l : m.lags) {
        ordered jl;
        jl["mechanism"] = l.mechanism;
        if (l.constant)
            jl["constant"] = l.values.empty() ? 0 : l.values.front();
        else
            jl["domain"] = l.values;
        doc["lags"].push_back(std::move(jl));
    }

    doc["cpds"] = ordered::array();
    for (const auto& c : m.cpds) {
        ordered jc;
        jc["variable"] = c.variable;
        jc["rows"] = ordered::array();
        for (const auto& row : c.rows) {
            ordered jr;
            if (row.context.is_boundary()) {
                jr["context"] = "boundary";
            } else {
                jr["context"] = ordered::array();
                for (const auto& e : row.context.entries()) {
                    ordered je;
                    je["parent"] = e.parent;
                    je[e.tag == ContextTag::lag ? "lag" : "at"] = e.offset;
                    je["value"] = e.value;
                    jr["context"].push_back(std::move(je));
                }
            }
            jr["probabilities"] = row.probabilities;
            jc["rows"].push_back(std::move(jr));
        }
        doc["cpds"].push_back(std::move(jc));
    }

    if (!m.noncausal.empty()) {
        doc["noncausal"] = ordered::array();
        for (const auto& nc : m.noncausal) {
            ordered jn;
            jn["a"] = nc.a;
            jn["b"] = nc.b;
            jn["joint_table"] = nc.joint_table;
            if (nc.strength_a) jn["strength_a"] = *nc.strength_a;
            if (nc.strength_b) jn["strength_b"] = *nc.strength_b;
            doc["noncausal"].push_back(std::move(jn));
        }
    }
    return doc.dump(2) + "\n";
}

void save_model(const CondensedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write model file '" + path.string() + "'");
    out << serialize_model(model);
}

}  // namespace mtbn
