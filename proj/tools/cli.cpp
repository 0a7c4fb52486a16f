#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mtbn/cpd.hpp"
#include "mtbn/deploy.hpp"
#include "mtbn/error.hpp"
#include "mtbn/exact.hpp"
#include "mtbn/model.hpp"
#include "mtbn/network.hpp"
#include "mtbn/patterns.hpp"
#include "mtbn/query.hpp"
#include "mtbn/sample.hpp"
#include "mtbn/structure.hpp"
#include "mtbn/validate.hpp"

namespace mtbn {

namespace {

using ordered = nlohmann::ordered_json;

// Shortest text that reads back to the same double.
std::string number(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ec == std::errc() ? end : buf);
}

struct QueryFlags {
    std::string target;
    std::string evidence;
    std::string method = "exact";
    std::uint64_t n = 10'000;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::uint64_t cap = kDefaultEnumerationCap;
    bool json = false;
};

void add_query_flags(CLI::App* cmd, QueryFlags& q) {
    cmd->add_option("--target", q.target, "VAR@T=value[,...]; omit @T for abstract variables")->required();
    cmd->add_option("--evidence", q.evidence, "Comma-separated VAR@T=value list");
    cmd->add_option("--method", q.method, "exact, ls (logic sampling) or lw (likelihood weighting)")
        ->check(CLI::IsMember({"exact", "ls", "lw"}));
    cmd->add_option("--n", q.n, "Sample count")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", q.seed, "Random seed");
    cmd->add_option("--workers", q.workers, "Worker threads (default: $MTBN_WORKERS or 1)")->check(CLI::PositiveNumber);
    cmd->add_option("--cap", q.cap, "Exact enumeration cap")->check(CLI::PositiveNumber);
    cmd->add_flag("--json", q.json, "Machine-readable output");
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path + "'");
    f << text;
}

CondensedModel prepared(const CondensedModel& m) {
    return m.noncausal.empty() ? m : transform_noncausal(m);
}

std::string join(const std::vector<Literal>& lits) {
    std::string s;
    for (const auto& l : lits) s += (s.empty() ? "" : ",") + l.to_string();
    return s;
}

void run_query(const Network& net, const QueryFlags& q, const std::vector<Literal>& extra_evidence,
               const std::vector<std::string>& interventions, std::ostream& out) {
    const auto target_lits = parse_literals(q.target);
    if (target_lits.empty()) throw Error("--target is empty");
    auto evidence_lits = parse_literals(q.evidence);
    evidence_lits.insert(evidence_lits.end(), extra_evidence.begin(), extra_evidence.end());
    const auto target = resolve(net, target_lits);
    const auto evidence = resolve(net, evidence_lits);

    ordered doc;
    doc["target"] = q.target;
    doc["evidence"] = q.evidence;
    if (!interventions.empty()) doc["do"] = interventions;
    std::vector<std::pair<std::string, std::string>> meta;

    if (q.method == "exact") {
        const auto r = exact_query(net, target, evidence, {q.cap, q.workers});
        doc["p"] = r.p;
        doc["method"] = "exact";
        doc["p_evidence"] = r.evidence_probability;
        doc["structures"] = r.structures;
        doc["skipped_cyclic"] = r.skipped_cyclic;
        meta = {{"method", "exact"},
                {"p_evidence", number(r.evidence_probability)},
                {"structures", std::to_string(r.structures)},
                {"skipped_cyclic", std::to_string(r.skipped_cyclic)}};
    } else {
        const SampleOptions opt{q.seed, q.n, q.workers};
        const auto r = q.method == "ls" ? logic_sampling_query(net, target, evidence, opt)
                                        : likelihood_weighting_query(net, target, evidence, opt);
        doc["p"] = r.p;
        doc["method"] = method_name(r.method);
        doc["seed"] = r.seed;
        doc["n"] = r.n;
        doc["workers"] = r.workers;
        doc["weight_sum"] = r.weight_sum;
        doc["ess"] = r.ess;
        if (target.size() == 1) {
            ordered est;
            const auto& labels = net.variable_of(target[0].first).labels;
            for (std::size_t i = 0; i < labels.size(); ++i) est[labels[i]] = r.estimates[i];
            doc["estimates"] = est;
        }
        meta = {{"method", method_name(r.method)},
                {"seed", std::to_string(r.seed)},
                {"n", std::to_string(r.n)},
                {"workers", std::to_string(r.workers)},
                {r.method == SamplingMethod::logic ? "accepted" : "weight_sum", number(r.weight_sum)},
                {"ess", number(r.ess)}};
    }

    if (q.json) {
        out << doc.dump(2) << "\n";
        return;
    }
    out << "p = " << number(doc["p"].get<double>()) << "\n";
    out << "target = " << join(target_lits) << "\n";
    if (!evidence_lits.empty()) out << "evidence = " << join(evidence_lits) << "\n";
    for (const auto& d : interventions) out << "do = " << d << "\n";
    for (const auto& [k, v] : meta) out << k << " = " << v << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Modifiable temporal belief networks: validate, deploy, query, simulate", "mtbn"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "mtbn 0.1.0");

    unsigned default_workers = 1;
    if (const char* env = std::getenv("MTBN_WORKERS"); env && *env) {
        unsigned w = 0;
        auto [p, ec] = std::from_chars(env, env + std::char_traits<char>::length(env), w);
        if (ec != std::errc() || *p != '\0' || w == 0) {
            err << "error: MTBN_WORKERS must be a positive integer\n";
            return 2;
        }
        default_workers = w;
    }

    std::string model_path;
    std::string output;
    bool json = false;
    std::uint64_t cap = kDefaultCertificationCap;
    std::uint64_t n = 1000, seed = 0;
    unsigned workers = default_workers;
    QueryFlags q;
    q.workers = default_workers;
    std::vector<std::string> dos;

    auto model_arg = [&](CLI::App* cmd) {
        cmd->add_option("model", model_path, "Model file (JSON)")->required()->check(CLI::ExistingFile);
    };

    auto* validate = app.add_subcommand("validate", "Check references, CPDs and well-definedness");
    model_arg(validate);
    validate->add_flag("--json", json, "Machine-readable output");

    auto* check = app.add_subcommand("check", "Certify that every cyclic structure has probability 0");
    model_arg(check);
    check->add_option("--cap", cap, "Maximum structure families examined")->check(CLI::PositiveNumber);

    auto* deploy = app.add_subcommand("deploy", "List deployed instances and candidate edges");
    model_arg(deploy);
    deploy->add_option("-o,--output", output, "Output file (default stdout)");

    auto* query = app.add_subcommand("query", "Probability of a proposition given evidence");
    model_arg(query);
    add_query_flags(query, q);

    auto* simulate = app.add_subcommand("simulate", "Forward-simulate cases, one JSON object per line");
    model_arg(simulate);
    simulate->add_option("--n", n, "Number of cases")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", seed, "Random seed");
    simulate->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    simulate->add_option("-o,--output", output, "Output file (default stdout)");

    auto* export_cmd = app.add_subcommand("export-bn", "Export the equivalent standard Bayesian network");
    model_arg(export_cmd);
    export_cmd->add_option("-o,--output", output, "Output file (default stdout)");

    auto* intervene = app.add_subcommand("intervene", "Query under interventions on manipulable variables");
    model_arg(intervene);
    intervene->add_option("--do", dos, "VAR=value; repeatable, comma-separated lists accepted")->required();
    add_query_flags(intervene, q);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << "mtbn 0.1.0\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run 'mtbn --help' for usage\n";
        return 2;
    }

    try {
        const auto model = load_model(model_path);

        if (validate->parsed()) {
            auto report = validate_model(model);
            if (!model.noncausal.empty() && !has_errors(report)) {
                try {
                    const auto transformed = transform_noncausal(model);
                    for (auto& d : validate_model(transformed))
                        if (d.severity == Severity::error) report.push_back(d);
                } catch (const ModelError& e) {
                    report.push_back(error("noncausal", e.what()));
                }
            }
            const bool ok = !has_errors(report);
            if (json) {
                ordered doc;
                doc["valid"] = ok;
                doc["diagnostics"] = ordered::array();
                for (const auto& d : report)
                    doc["diagnostics"].push_back({{"severity", d.severity == Severity::error ? "error" : "warning"},
                                                  {"code", d.code},
                                                  {"message", d.message}});
                out << doc.dump(2) << "\n";
            } else {
                for (const auto& d : report) out << format_diagnostic(d) << "\n";
                out << (ok ? "OK" : "INVALID") << "\n";
            }
            return ok ? 0 : 1;
        }

        if (check->parsed()) {
            const Network net(prepared(model));
            const auto report = check_well_defined(net, cap);
            out << format_certification(net, report);
            for (const auto& d : report.diagnostics) out << format_diagnostic(d) << "\n";
            return report.certified ? 0 : 1;
        }

        if (deploy->parsed()) {
            write_output(output, deployed_graph_json(deploy_model(model)), out);
            return 0;
        }

        if (query->parsed()) {
            const Network net(prepared(model));
            run_query(net, q, {}, {}, out);
            return 0;
        }

        if (simulate->parsed()) {
            const Network net(prepared(model));
            const auto cases = forward_simulate(net, {seed, n, workers});
            std::ostringstream text;
            for (const auto& c : cases) {
                ordered line;
                for (std::size_t x = 0; x < net.size(); ++x)
                    line[net.instance_name(x)] = net.variable_of(x).labels[static_cast<std::size_t>(c[x])];
                text << line.dump() << "\n";
            }
            write_output(output, text.str(), out);
            return 0;
        }

        if (export_cmd->parsed()) {
            const Network net(prepared(model));
            write_output(output, exported_bn_json(export_bn(net)), out);
            return 0;
        }

        if (intervene->parsed()) {
            std::vector<std::pair<std::string, std::string>> bindings;
            std::vector<std::string> shown;
            for (const auto& d : dos)
                for (const auto& lit : parse_literals(d)) {
                    if (lit.instance.stamp)
                        throw Error("--do binds a variable at every time point; drop '@" +
                                    std::to_string(*lit.instance.stamp) + "' from " + lit.to_string());
                    bindings.push_back({lit.instance.variable, lit.value});
                    shown.push_back(lit.to_string());
                }
            auto iv = apply_intervention(prepared(model), bindings);
            const Network net(std::move(iv.model));
            run_query(net, q, iv.clamp, shown, out);
            return 0;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace mtbn
