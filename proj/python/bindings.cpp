#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mtbn/error.hpp"
#include "mtbn/exact.hpp"
#include "mtbn/model.hpp"
#include "mtbn/network.hpp"
#include "mtbn/patterns.hpp"
#include "mtbn/query.hpp"
#include "mtbn/sample.hpp"
#include "mtbn/structure.hpp"
#include "mtbn/validate.hpp"

namespace py = pybind11;
using namespace mtbn;

namespace {

py::dict run_to_dict(const SampleRun& r) {
    py::dict d;
    d["p"] = r.p;
    d["method"] = method_name(r.method);
    d["seed"] = r.seed;
    d["n"] = r.n;
    d["workers"] = r.workers;
    d["estimates"] = r.estimates;
    d["weight_sum"] = r.weight_sum;
    d["ess"] = r.ess;
    return d;
}

py::dict query(const CondensedModel& model, const std::string& target, const std::string& evidence,
               const std::string& method, std::uint64_t n, std::uint64_t seed, unsigned workers, std::uint64_t cap) {
    const Network net(model);
    const auto t = resolve(net, parse_literals(target));
    const auto e = resolve(net, parse_literals(evidence));
    if (t.empty()) throw Error("query needs a target");
    if (method == "exact") {
        ExactResult r;
        {
            py::gil_scoped_release nogil;
            r = exact_query(net, t, e, {cap, workers});
        }
        py::dict d;
        d["p"] = r.p;
        d["method"] = "exact";
        d["p_evidence"] = r.evidence_probability;
        d["structures"] = r.structures;
        d["skipped_cyclic"] = r.skipped_cyclic;
        return d;
    }
    if (method != "ls" && method != "lw") throw Error("method must be exact, ls or lw");
    SampleRun r;
    {
        py::gil_scoped_release nogil;
        const SampleOptions opt{seed, n, workers};
        r = method == "ls" ? logic_sampling_query(net, t, e, opt) : likelihood_weighting_query(net, t, e, opt);
    }
    return run_to_dict(r);
}

py::list simulate(const CondensedModel& model, std::uint64_t n, std::uint64_t seed, unsigned workers) {
    const Network net(model);
    std::vector<std::vector<int>> cases;
    {
        py::gil_scoped_release nogil;
        cases = forward_simulate(net, {seed, n, workers});
    }
    py::list out;
    for (const auto& c : cases) {
        py::dict row;
        for (std::size_t x = 0; x < net.size(); ++x)
            row[py::str(net.instance_name(x))] = net.variable_of(x).labels[static_cast<std::size_t>(c[x])];
        out.append(row);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Modifiable temporal belief networks";

    auto base = py::register_exception<Error>(m, "MtbnError", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ModelError>(m, "ModelError", base.ptr());
    py::register_exception<UnknownInstanceError>(m, "UnknownInstanceError", base.ptr());
    py::register_exception<MissingRowError>(m, "MissingRowError", base.ptr());
    py::register_exception<CyclicStructureError>(m, "CyclicStructureError", base.ptr());
    py::register_exception<ZeroEvidenceError>(m, "ZeroEvidenceError", base.ptr());
    py::register_exception<InconclusiveRunError>(m, "InconclusiveRunError", base.ptr());
    py::register_exception<EnumerationCapError>(m, "EnumerationCapError", base.ptr());

    py::class_<CondensedModel>(m, "Model")
        .def_static("from_json", [](const std::string& text) { return parse_model(text); })
        .def_static("load", [](const std::filesystem::path& p) { return load_model(p); })
        .def("to_json", &serialize_model)
        .def("save", [](const CondensedModel& self, const std::filesystem::path& p) { save_model(self, p); })
        .def("with_range", [](const CondensedModel& self, int t1, int tn) { return with_range(self, t1, tn); })
        .def_property_readonly("range", [](const CondensedModel& self) { return py::make_tuple(self.range.t1, self.range.tn); })
        .def_property_readonly("granularity", [](const CondensedModel& self) { return self.granularity.unit_label; })
        .def_property_readonly("variables", [](const CondensedModel& self) {
            std::vector<std::string> out;
            for (const auto& v : self.variables) out.push_back(v.name);
            return out;
        })
        .def_property_readonly("mechanisms", [](const CondensedModel& self) {
            std::vector<std::string> out;
            for (const auto& v : self.mechanisms) out.push_back(v.name());
            return out;
        })
        .def("__eq__", [](const CondensedModel& a, const CondensedModel& b) { return a == b; });

    m.def("validate", [](const CondensedModel& model) {
        py::list out;
        for (const auto& d : validate_model(model)) {
            py::dict e;
            e["severity"] = d.severity == Severity::error ? "error" : "warning";
            e["code"] = d.code;
            e["message"] = d.message;
            out.append(e);
        }
        return out;
    }, py::arg("model"));

    m.def("check", [](const CondensedModel& model, std::uint64_t cap) {
        const Network net(model);
        const auto r = check_well_defined(net, cap);
        py::dict d;
        d["certified"] = r.certified;
        d["trivially_acyclic"] = r.trivially_acyclic;
        d["families"] = r.families.size();
        d["report"] = format_certification(net, r);
        return d;
    }, py::arg("model"), py::arg("cap") = kDefaultCertificationCap);

    m.def("structure_count", [](const CondensedModel& model) { return structure_count(Network(model)); });
    m.def("deploy_json", [](const CondensedModel& model) { return deployed_graph_json(deploy_model(model)); });
    m.def("export_bn_json", [](const CondensedModel& model) { return exported_bn_json(export_bn(Network(model))); });

    m.def("query", &query, py::arg("model"), py::arg("target"), py::arg("evidence") = "",
          py::arg("method") = "exact", py::arg("n") = 10000, py::arg("seed") = 0, py::arg("workers") = 1,
          py::arg("cap") = kDefaultEnumerationCap);
    m.def("simulate", &simulate, py::arg("model"), py::arg("n"), py::arg("seed") = 0, py::arg("workers") = 1);
    m.def("stream_uniform", &stream_uniform, py::arg("seed"), py::arg("sample"), py::arg("instance"));

    m.def("make_manipulation", [](const CondensedModel& model, const std::string& target) {
        return make_manipulation(model, target);
    }, py::arg("model"), py::arg("target"));
    m.def("apply_intervention", [](const CondensedModel& model, const std::vector<std::pair<std::string, std::string>>& bindings) {
        auto iv = apply_intervention(model, bindings);
        std::vector<std::string> clamp;
        for (const auto& l : iv.clamp) clamp.push_back(l.to_string());
        return py::make_tuple(iv.model, clamp);
    }, py::arg("model"), py::arg("bindings"));
    m.def("transform_noncausal", &transform_noncausal, py::arg("model"));

    m.def("make_interval", [](const CondensedModel& model, const std::string& name, std::vector<int> points,
                              const std::vector<double>& start_prior) {
        auto b = make_interval(model, name, std::move(points), start_prior);
        py::dict spec;
        spec["start"] = b.spec.start;
        spec["end"] = b.spec.end;
        spec["duration"] = b.spec.duration;
        spec["points"] = b.spec.points;
        return py::make_tuple(b.model, spec);
    }, py::arg("model"), py::arg("name"), py::arg("points"), py::arg("start_prior") = std::vector<double>{});
    m.def("interval_relation", [](int s1, int e1, int s2, int e2) {
        return relation_name(interval_relation_value(s1, e1, s2, e2));
    });
}
