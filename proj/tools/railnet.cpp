// Command-line front end: solve, validate, sweep, gen, emit-model.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "railnet/generator.hpp"
#include "railnet/io.hpp"
#include "railnet/pipeline.hpp"

namespace fs = std::filesystem;
using namespace railnet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolations = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitTimeout = 3;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitSoftware = 70;

struct Overrides {
    std::string config;
    std::optional<int> max_tracks;
    bool no_reductions = false;
    bool cross_scenario = false;
    std::string coverage;
    double time_limit = 7200.0;
};

void add_model_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "Configuration preset")->check(CLI::IsMember({"A", "B", "C"}));
    cmd->add_option("--max-tracks", o.max_tracks, "Global track limit")->check(CLI::Range(1, 4));
    cmd->add_flag("--no-reductions", o.no_reductions, "Forbid travel-time and headway reductions");
    cmd->add_flag("--cross-scenario-headways", o.cross_scenario, "Separate trains of different scenarios too");
}

void apply(Instance& inst, const Overrides& o) {
    if (!o.config.empty()) {
        inst.preset = o.config[0];
        apply_preset(inst.config, inst.preset);
    }
    if (o.max_tracks) {
        inst.config.max_tracks_global = *o.max_tracks;
        inst.preset = 0;
    }
    if (o.no_reductions) {
        inst.config.reductions_allowed = false;
        inst.preset = 0;
    }
    if (o.cross_scenario) inst.config.cross_scenario_headways = true;
}

/// "40", "10-100" (step 10), "10:100:5" or "10,40,70", all in percent.
std::vector<double> parse_percents(const std::string& text) {
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty()) throw CLI::ValidationError("--coverage", "bad percentage '" + s + "'");
        if (!(v > 0.0 && v <= 100.0)) throw CLI::ValidationError("--coverage", "percentage must be within (0,100]");
        return v;
    };
    std::vector<double> out;
    if (text.find(',') != std::string::npos) {
        std::stringstream in(text);
        std::string part;
        while (std::getline(in, part, ',')) out.push_back(number(part));
        return out;
    }
    double step = 10.0;
    std::string lo;
    std::string hi;
    if (auto c = text.find(':'); c != std::string::npos) {
        auto c2 = text.find(':', c + 1);
        if (c2 == std::string::npos) throw CLI::ValidationError("--coverage", "expected start:stop:step");
        lo = text.substr(0, c);
        hi = text.substr(c + 1, c2 - c - 1);
        step = number(text.substr(c2 + 1));
    } else if (auto d = text.find('-'); d != std::string::npos && d > 0) {
        lo = text.substr(0, d);
        hi = text.substr(d + 1);
    } else {
        return {number(text)};
    }
    const double a = number(lo);
    const double b = number(hi);
    if (b < a) throw CLI::ValidationError("--coverage", "range end below start");
    for (int i = 0; a + i * step <= b + 1e-9; ++i) out.push_back(a + i * step);
    return out;
}

int status_exit(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal:
        case SolveStatus::Feasible: return kExitOk;
        case SolveStatus::Infeasible: return kExitInfeasible;
        case SolveStatus::TimedOutNoSolution: return kExitTimeout;
    }
    return kExitSoftware;
}

Instance load_with(const std::string& path, const Overrides& o) {
    Instance inst = load_instance(path);
    apply(inst, o);
    auto diagnostics = validate_config(inst.spec, inst.family, inst.config);
    if (!diagnostics.empty()) throw DocumentError(std::move(diagnostics));
    return inst;
}

int run_solve(const std::string& path, Overrides o, const std::string& solver, const std::string& solution_path,
              const std::string& out) {
    Instance inst = load_with(path, o);
    if (!o.coverage.empty()) {
        const auto pct = parse_percents(o.coverage);
        if (pct.size() != 1) throw CLI::ValidationError("--coverage", "solve takes a single percentage");
        inst.family.coverage_share = pct[0] / 100.0;
    }
    const fs::path dir(out);
    if (solver == "emit" && solution_path.empty()) {
        const auto built = build_model(inst, needs_robust_model(inst));
        write_text_file(dir / "model.lp", emit_model_text(built.model));
        std::cout << "model written to " << (dir / "model.lp").string() << "\n";
        return kExitOk;
    }
    PipelineOptions options;
    options.limits.time_limit_seconds = o.time_limit;
    if (!solution_path.empty()) options.external_solution = read_text_file(solution_path);
    const auto result = run_pipeline(inst, options);
    write_artifacts(dir, inst, result);
    std::cout << "status " << to_string(result.status) << "\n";
    if (result.plan) {
        std::cout << "objective " << result.objective << "\n"
                  << "gap_percent " << result.gap_percent << "\n"
                  << "validation " << (result.validation.ok ? "ok" : "violations") << "\n";
    } else if (!result.infeasibility.empty()) {
        std::cout << "reason " << result.infeasibility << "\n";
    }
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    return status_exit(result.status);
}

int run_validate(const std::string& plan_path, const std::string& instance_path, const Overrides& o,
                 const std::string& out) {
    const Instance inst = load_with(instance_path, o);
    const PlanSolution plan = load_plan(plan_path);
    const auto report = check_plan(plan, inst.family, inst.spec, inst.config);
    for (const auto& v : report.violations) std::cout << v.rule << "\t" << v.location << "\t" << v.detail << "\n";
    std::cout << (report.ok ? "plan is feasible" : std::to_string(report.violations.size()) + " violation(s)") << "\n";
    if (!out.empty()) {
        nlohmann::json violations = nlohmann::json::array();
        for (const auto& v : report.violations)
            violations.push_back({{"rule", v.rule}, {"location", v.location}, {"detail", v.detail}});
        const double cost = recompute_cost(plan, inst.spec, needs_robust_model(inst) ? &inst.family : nullptr);
        const nlohmann::json doc = {{"ok", report.ok}, {"cost", cost}, {"violations", violations}};
        write_text_file(fs::path(out) / "validation.json", doc.dump(2) + "\n");
    }
    return report.ok ? kExitOk : kExitViolations;
}

int run_sweep(const std::string& path, const Overrides& o, const std::string& out) {
    if (o.coverage.empty()) throw CLI::ValidationError("--coverage", "sweep needs --coverage");
    const Instance inst = load_with(path, o);
    SolveLimits limits;
    limits.time_limit_seconds = o.time_limit;
    const auto rows = sweep_coverage(inst, parse_percents(o.coverage), limits);
    const std::string csv = sweep_to_csv(rows);
    write_text_file(fs::path(out) / "sweep.csv", csv);
    std::cout << csv;
    for (const auto& r : rows)
        if (r.status == SolveStatus::TimedOutNoSolution) return kExitTimeout;
    return kExitOk;
}

int run_emit(const std::string& path, const Overrides& o, const std::string& out) {
    Instance inst = load_with(path, o);
    if (!o.coverage.empty()) inst.family.coverage_share = parse_percents(o.coverage).at(0) / 100.0;
    const auto built = build_model(inst, needs_robust_model(inst));
    const std::string text = emit_model_text(built.model);
    if (out.empty()) {
        std::cout << text;
    } else {
        fs::path target(out);
        if (target.extension() != ".lp") target /= "model.lp";
        write_text_file(target, text);
    }
    return kExitOk;
}

std::map<TrainType, int> parse_train_counts(const std::string& text) {
    std::map<TrainType, int> out;
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--trains", "expected TYPE=COUNT");
        try {
            out[part.substr(0, eq)] = std::stoi(part.substr(eq + 1));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--trains", "bad count in '" + part + "'");
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Railway infrastructure design from operational concepts"};
    app.require_subcommand(1);

    Overrides o;
    std::string instance_path;
    std::string plan_path;
    std::string solve_out;
    std::string validate_out;
    std::string sweep_out;
    std::string gen_out;
    std::string emit_out;
    std::string solver = "internal";
    std::string solution_path;

    auto* solve = app.add_subcommand("solve", "Solve an instance and write the result tables");
    solve->add_option("instance", instance_path, "Instance JSON")->required();
    add_model_flags(solve, o);
    solve->add_option("--coverage", o.coverage, "Coverage share in percent");
    solve->add_option("--time-limit", o.time_limit, "Solver time limit in seconds")->check(CLI::PositiveNumber);
    solve->add_option("--solver", solver, "internal or emit")->check(CLI::IsMember({"internal", "emit"}));
    solve->add_option("--solution", solution_path, "Solution file from an external solver");
    solve->add_option("--out", solve_out, "Output directory")->default_val(".");

    auto* validate = app.add_subcommand("validate", "Check a plan against an instance");
    validate->add_option("plan", plan_path, "Plan JSON")->required();
    validate->add_option("instance", instance_path, "Instance JSON")->required();
    add_model_flags(validate, o);
    validate->add_option("--out", validate_out, "Directory for validation.json");

    auto* sweep = app.add_subcommand("sweep", "Solve a family for a range of coverage shares");
    sweep->add_option("instance", instance_path, "Instance JSON")->required();
    add_model_flags(sweep, o);
    sweep->add_option("--coverage", o.coverage, "Percent list or range, e.g. 10-100 or 10:100:10")->required();
    sweep->add_option("--time-limit", o.time_limit, "Time limit per row in seconds")->check(CLI::PositiveNumber);
    sweep->add_option("--out", sweep_out, "Output directory")->default_val(".");

    GeneratorParams gp;
    std::uint64_t seed = 1;
    std::string trains;
    std::string gen_config = "B";
    double optional_pct = 0.0;
    double coverage_pct = 100.0;
    auto* gen = app.add_subcommand("gen", "Generate a synthetic instance");
    gen->add_option("--seed", seed, "Random seed");
    gen->add_option("--nodes", gp.nodes, "Number of nodes")->check(CLI::Range(2, 26));
    gen->add_option("--sections", gp.sections, "Number of sections");
    gen->add_option("--trains", trains, "Train pool, e.g. IC=1,RE=2");
    gen->add_option("--scenarios", gp.scenarios, "Number of scenarios")->check(CLI::PositiveNumber);
    gen->add_option("--optional-share", optional_pct, "Share of optional trains in percent")->check(CLI::Range(0.0, 100.0));
    gen->add_option("--coverage", coverage_pct, "Coverage share in percent")->check(CLI::Range(0.0, 100.0));
    gen->add_option("--horizon", gp.horizon, "Planning horizon in minutes");
    gen->add_option("--config", gen_config, "Configuration preset")->check(CLI::IsMember({"A", "B", "C"}));
    gen->add_option("--out", gen_out, "Output file or directory");

    auto* emit = app.add_subcommand("emit-model", "Write the MILP as LP text");
    emit->add_option("instance", instance_path, "Instance JSON")->required();
    add_model_flags(emit, o);
    emit->add_option("--coverage", o.coverage, "Coverage share in percent");
    emit->add_option("--out", emit_out, "Output file or directory (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*solve) return run_solve(instance_path, o, solver, solution_path, solve_out);
        if (*validate) return run_validate(plan_path, instance_path, o, validate_out);
        if (*sweep) return run_sweep(instance_path, o, sweep_out);
        if (*emit) return run_emit(instance_path, o, emit_out);
        if (*gen) {
            if (!trains.empty()) gp.trains_per_type = parse_train_counts(trains);
            gp.optional_share = optional_pct / 100.0;
            gp.coverage_share = coverage_pct / 100.0;
            gp.preset = gen_config[0];
            const std::string text = dump_instance(generate_instance(seed, gp));
            if (gen_out.empty()) {
                std::cout << text;
            } else {
                fs::path target(gen_out);
                if (target.extension() != ".json") target /= "instance.json";
                write_text_file(target, text);
            }
            return kExitOk;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DocumentError& e) {
        std::cerr << "invalid document:\n";
        for (const auto& d : e.diagnostics()) std::cerr << "  " << d.location << ": " << d.message << "\n";
        return kExitData;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitSoftware;
    }
    return kExitUsage;
}
