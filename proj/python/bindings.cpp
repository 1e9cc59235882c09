// Python bindings: documents cross the boundary as JSON text.

#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "railnet/generator.hpp"
#include "railnet/io.hpp"
#include "railnet/pipeline.hpp"

namespace py = pybind11;
using namespace railnet;

namespace {

Instance load(const std::string& text, const std::optional<std::string>& config) {
    Instance inst = parse_instance(text);
    if (config) {
        if (config->size() != 1 || std::string("ABC").find((*config)[0]) == std::string::npos)
            throw py::value_error("config must be A, B or C");
        inst.preset = (*config)[0];
        apply_preset(inst.config, inst.preset);
    }
    auto diagnostics = validate_config(inst.spec, inst.family, inst.config);
    if (!diagnostics.empty()) throw DocumentError(std::move(diagnostics));
    return inst;
}

std::string generate(std::uint64_t seed, int nodes, int sections, const std::map<std::string, int>& trains,
                     int scenarios, double optional_share, double coverage_share, const std::string& config) {
    GeneratorParams p;
    p.nodes = nodes;
    p.sections = sections;
    p.trains_per_type = {trains.begin(), trains.end()};
    p.scenarios = scenarios;
    p.optional_share = optional_share;
    p.coverage_share = coverage_share;
    if (config.size() == 1) p.preset = config[0];
    return dump_instance(generate_instance(seed, p));
}

/// Report and plan of one solve as JSON text.
py::tuple solve(const std::string& instance, const std::optional<std::string>& config, double time_limit) {
    const Instance inst = load(instance, config);
    PipelineOptions options;
    options.limits.time_limit_seconds = time_limit;
    PipelineResult result;
    {
        py::gil_scoped_release release;
        result = run_pipeline(inst, options);
    }
    const std::string plan = result.plan ? plan_to_json(*result.plan).dump(2) + "\n" : std::string();
    return py::make_tuple(report_to_json(inst, result).dump(2) + "\n", plan);
}

std::string validate(const std::string& plan_text, const std::string& instance) {
    const Instance inst = load(instance, std::nullopt);
    const PlanSolution plan = plan_from_json(nlohmann::json::parse(plan_text));
    const auto report = check_plan(plan, inst.family, inst.spec, inst.config);
    nlohmann::json violations = nlohmann::json::array();
    for (const auto& v : report.violations)
        violations.push_back({{"rule", v.rule}, {"location", v.location}, {"detail", v.detail}});
    const double cost = recompute_cost(plan, inst.spec, needs_robust_model(inst) ? &inst.family : nullptr);
    return nlohmann::json{{"ok", report.ok}, {"cost", cost}, {"violations", violations}}.dump();
}

std::string emit_model(const std::string& instance, const std::optional<std::string>& config) {
    const Instance inst = load(instance, config);
    return emit_model_text(build_model(inst, needs_robust_model(inst)).model);
}

std::string sweep(const std::string& instance, const std::vector<double>& percents, double time_limit) {
    const Instance inst = load(instance, std::nullopt);
    SolveLimits limits;
    limits.time_limit_seconds = time_limit;
    std::vector<SweepRow> rows;
    {
        py::gil_scoped_release release;
        rows = sweep_coverage(inst, percents, limits);
    }
    return sweep_to_csv(rows);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Railway network design from timetable families";

    py::register_exception<DocumentError>(m, "DocumentError", PyExc_ValueError);
    py::register_exception<InfeasibleInstance>(m, "InfeasibleInstance", PyExc_RuntimeError);

    m.def("generate", &generate, py::arg("seed") = 1, py::arg("nodes") = 5, py::arg("sections") = 6,
          py::arg("trains") = std::map<std::string, int>{{"IC", 1}, {"RE", 2}}, py::arg("scenarios") = 1,
          py::arg("optional_share") = 0.0, py::arg("coverage_share") = 1.0, py::arg("config") = "B",
          "Synthetic instance as JSON text.");
    m.def("solve", &solve, py::arg("instance"), py::arg("config") = std::nullopt, py::arg("time_limit") = 7200.0,
          "Solve an instance; returns (report JSON, plan JSON or empty).");
    m.def("validate", &validate, py::arg("plan"), py::arg("instance"), "Check a plan; returns a JSON report.");
    m.def("emit_model", &emit_model, py::arg("instance"), py::arg("config") = std::nullopt, "MILP as LP text.");
    m.def("sweep", &sweep, py::arg("instance"), py::arg("percents"), py::arg("time_limit") = 7200.0,
          "Coverage-share sweep as CSV text.");
    m.attr("schema_version") = kSchemaVersion;
}
