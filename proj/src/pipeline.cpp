#include "railnet/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace railnet {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Shortest round-trip text for a number; integers without a fraction.
std::string fmt(double v) {
    if (v == std::round(v) && std::abs(v) < 9e15) return std::to_string(static_cast<long long>(v));
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};

const Train* find_train(const TimetableFamily& family, const TrainKey& key) {
    for (const auto& sc : family.scenarios)
        if (sc.id == key.scenario) return sc.find_train(key.train);
    return nullptr;
}

std::string network_csv(const Instance& inst, const PlanSolution& plan) {
    const auto& spec = inst.spec;
    auto section_of = [&](const NodeId& a, const NodeId& b) -> const Section* {
        auto u = spec.node_index(a);
        auto v = spec.node_index(b);
        if (!u || !v) return nullptr;
        auto s = spec.section_index(*u, *v);
        return s ? &spec.sections()[*s] : nullptr;
    };
    std::string out = "type,at,from,to,track,minutes,cost\n";
    for (const auto& arc : plan.built_arcs) {
        const Section* s = section_of(arc.a, arc.b);
        out += "arc,," + arc.a + "," + arc.b + "," + std::to_string(arc.track) + ",," +
               fmt(s ? s->cost_of_track(arc.track) : 0.0) + "\n";
    }
    for (const auto& link : plan.built_links) {
        double cost = 0.0;
        auto at = spec.node_index(link.at);
        auto u = spec.node_index(link.from);
        auto v = spec.node_index(link.to);
        if (at && u && v)
            if (auto l = spec.link_index(*at, *u, *v)) cost = spec.links()[*l].cost;
        out += "link," + link.at + "," + link.from + "," + link.to + ",,," + fmt(cost) + "\n";
    }
    for (const auto& [pair, red] : plan.reductions) {
        const Section* s = section_of(pair.first, pair.second);
        if (red.time_minutes > 0)
            out += "time_reduction,," + pair.first + "," + pair.second + ",," + std::to_string(red.time_minutes) +
                   "," + fmt(s ? s->time_reduction_cost_per_minute * red.time_minutes : 0.0) + "\n";
        if (red.headway_minutes > 0)
            out += "headway_reduction,," + pair.first + "," + pair.second + ",," +
                   std::to_string(red.headway_minutes) + "," +
                   fmt(s ? s->headway_reduction_cost_per_minute * red.headway_minutes : 0.0) + "\n";
    }
    return out;
}

std::string routing_csv(const Instance& inst, const PlanSolution& plan) {
    std::string out = "scenario,train,train_type,nodes,tracks\n";
    for (const auto& [key, legs] : plan.routes) {
        const Train* t = find_train(inst.family, key);
        std::string nodes;
        std::string tracks;
        for (const auto& n : plan.route_nodes(key)) nodes += (nodes.empty() ? "" : "-") + n;
        for (const auto& leg : legs) tracks += (tracks.empty() ? "" : "-") + std::to_string(leg.track);
        out += csv_field(key.scenario) + "," + csv_field(key.train) + "," + csv_field(t ? t->train_type : "") + "," +
               nodes + "," + tracks + "\n";
    }
    return out;
}

std::string timetable_csv(const PlanSolution& plan) {
    std::string out = "scenario,train,node,arrival,departure\n";
    for (const auto& [key, legs] : plan.routes) {
        const std::string prefix = csv_field(key.scenario) + "," + csv_field(key.train) + ",";
        for (std::size_t i = 0; i < legs.size(); ++i) {
            const std::string arrival = i == 0 ? "" : std::to_string(legs[i - 1].arrival);
            out += prefix + legs[i].from + "," + arrival + "," + std::to_string(legs[i].departure) + "\n";
        }
        if (!legs.empty()) out += prefix + legs.back().to + "," + std::to_string(legs.back().arrival) + ",\n";
    }
    return out;
}

std::string diagram_csv(const Instance& inst, const PlanSolution& plan) {
    const auto types = inst.spec.train_types();
    auto colour = [&](const std::string& type) {
        const auto it = types.find(type);
        const auto rank = it == types.end() ? 0 : std::distance(types.begin(), it);
        return kPalette[rank % std::size(kPalette)];
    };
    std::string out = "scenario,train,train_type,color,distance_km,time_minutes\n";
    for (const auto& [key, legs] : plan.routes) {
        const Train* t = find_train(inst.family, key);
        const std::string type = t ? t->train_type : "";
        const std::string prefix =
            csv_field(key.scenario) + "," + csv_field(key.train) + "," + csv_field(type) + "," + colour(type) + ",";
        double distance = 0.0;
        for (const auto& leg : legs) {
            out += prefix + fmt(distance) + "," + std::to_string(leg.departure) + "\n";
            auto u = inst.spec.node_index(leg.from);
            auto v = inst.spec.node_index(leg.to);
            if (u && v)
                if (auto s = inst.spec.section_index(*u, *v)) distance += inst.spec.sections()[*s].length_km;
            out += prefix + fmt(distance) + "," + std::to_string(leg.arrival) + "\n";
        }
    }
    return out;
}

}  // namespace

bool needs_robust_model(const Instance& instance) {
    if (instance.force_robust) return true;
    return !instance.family.is_deterministic() || instance.family.coverage_share < 1.0;
}

BuiltModel build_model(const Instance& instance, bool robust) {
    BuiltModel out;
    out.robust = robust;
    auto start = Clock::now();
    out.sets = build_relevant_sets(instance.spec, instance.family, instance.config);
    out.headways = build_headway_sets(instance.spec, instance.family, out.sets, instance.config);
    out.preprocessing_seconds = seconds_since(start);
    start = Clock::now();
    if (robust) {
        out.model = build_robust(instance.family, out.sets, out.headways, instance.spec, instance.config);
    } else {
        if (instance.family.scenarios.size() != 1)
            throw InputError("deterministic model needs exactly one scenario");
        out.model =
            build_deterministic(instance.family.scenarios[0], out.sets, out.headways, instance.spec, instance.config);
    }
    out.build_seconds = seconds_since(start);
    return out;
}

PipelineResult run_pipeline(const Instance& instance, const PipelineOptions& options) {
    PipelineResult result;
    result.robust = needs_robust_model(instance);
    BuiltModel built;
    try {
        built = build_model(instance, result.robust);
    } catch (const InfeasibleInstance& e) {
        result.status = SolveStatus::Infeasible;
        result.infeasibility = e.what();
        return result;
    }
    result.preprocessing_seconds = built.preprocessing_seconds;
    result.build_seconds = built.build_seconds;
    result.variables = built.model.variables().size();
    result.constraints = built.model.constraints().size();
    result.warnings = built.sets.warnings;

    MilpSolution solution;
    if (options.external_solution) {
        const auto start = Clock::now();
        solution = import_solution(*options.external_solution, built.model);
        solution.seconds = seconds_since(start);
    } else if (!options.start.empty()) {
        solution = solve_branch_and_bound(built.model, options.limits, options.start);
    } else {
        solution = solve_branch_and_bound(built.model, options.limits);
    }
    result.status = solution.status;
    result.solve_seconds = solution.seconds;
    result.nodes = solution.nodes;
    result.warnings.insert(result.warnings.end(), solution.warnings.begin(), solution.warnings.end());
    if (!solution.has_solution()) return result;

    result.values = solution.values;
    result.objective = solution.objective;
    result.best_bound = solution.best_bound;
    result.gap_percent = solution.gap_percent;
    result.plan = extract_plan(solution, built.model, instance.family);
    result.validation = check_plan(*result.plan, instance.family, instance.spec, instance.config);
    result.recomputed_cost =
        recompute_cost(*result.plan, instance.spec, result.robust ? &instance.family : nullptr);
    return result;
}

json report_to_json(const Instance& instance, const PipelineResult& result) {
    json violations = json::array();
    for (const auto& v : result.validation.violations)
        violations.push_back({{"rule", v.rule}, {"location", v.location}, {"detail", v.detail}});
    json report = {{"status", std::string(to_string(result.status))},
                   {"model", result.robust ? "robust" : "deterministic"},
                   {"preprocessing_seconds", result.preprocessing_seconds},
                   {"build_seconds", result.build_seconds},
                   {"solve_seconds", result.solve_seconds},
                   {"variables", result.variables},
                   {"constraints", result.constraints},
                   {"nodes", result.nodes},
                   {"config",
                    {{"preset", instance.preset ? std::string(1, instance.preset) : std::string()},
                     {"max_tracks", instance.config.max_tracks_global},
                     {"reductions", instance.config.reductions_allowed},
                     {"cross_scenario_headways", instance.config.cross_scenario_headways}}},
                   {"coverage_share", instance.family.coverage_share},
                   {"warnings", result.warnings}};
    if (!result.infeasibility.empty()) report["infeasibility"] = result.infeasibility;
    if (result.plan) {
        report["objective"] = result.objective;
        report["best_bound"] = result.best_bound;
        report["gap_percent"] = result.gap_percent;
        report["recomputed_cost"] = result.recomputed_cost;
        report["infrastructure_cost"] = infrastructure_cost(*result.plan, instance.spec);
        report["arcs"] = result.plan->built_arcs.size();
        report["links"] = result.plan->built_links.size();
        report["active_scenarios"] =
            std::vector<std::string>(result.plan->active_scenarios.begin(), result.plan->active_scenarios.end());
        report["validation"] = {{"ok", result.validation.ok}, {"violations", violations}};
    }
    return report;
}

void write_artifacts(const std::filesystem::path& dir, const Instance& instance, const PipelineResult& result) {
    std::filesystem::create_directories(dir);
    const PlanSolution empty;
    const PlanSolution& plan = result.plan ? *result.plan : empty;
    write_text_file(dir / "network.csv", network_csv(instance, plan));
    write_text_file(dir / "routing.csv", routing_csv(instance, plan));
    write_text_file(dir / "timetable.csv", timetable_csv(plan));
    write_text_file(dir / "diagram.csv", diagram_csv(instance, plan));
    write_text_file(dir / "report.json", report_to_json(instance, result).dump(2) + "\n");
    if (result.plan) write_text_file(dir / "plan.json", plan_to_json(*result.plan).dump(2) + "\n");
}

std::vector<SweepRow> sweep_coverage(const Instance& instance, const std::vector<double>& percents,
                                     const SolveLimits& limits) {
    const std::size_t n = instance.family.scenarios.size();
    if (n < 2) throw InputError("coverage sweep needs a family with at least two scenarios");
    for (double pct : percents)
        if (!(pct > 0.0 && pct <= 100.0)) throw InputError("coverage share must be within (0,100] percent");
    std::vector<std::size_t> order(percents.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto l, auto r) { return percents[l] > percents[r]; });

    std::vector<SweepRow> rows(percents.size());
    std::vector<double> previous;
    for (std::size_t idx : order) {
        const double pct = percents[idx];
        Instance variant = instance;
        variant.family.coverage_share = pct / 100.0;
        variant.force_robust = true;
        PipelineOptions options;
        options.limits = limits;
        options.start = previous;
        const auto result = run_pipeline(variant, options);
        if (!result.values.empty()) previous = result.values;
        SweepRow row;
        row.requested_percent = pct;
        row.status = result.status;
        row.seconds = result.preprocessing_seconds + result.build_seconds + result.solve_seconds;
        if (result.plan) {
            row.achieved_percent = 100.0 * static_cast<double>(result.plan->active_scenarios.size()) / n;
            row.cost = result.objective;
            row.infrastructure_cost = infrastructure_cost(*result.plan, instance.spec);
            row.arcs = result.plan->built_arcs.size();
            row.links = result.plan->built_links.size();
            row.gap_percent = result.gap_percent;
        }
        rows[idx] = row;
    }
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string out = "requested_percent,achieved_percent,status,cost,infrastructure_cost,arcs,links,seconds,gap_percent\n";
    for (const auto& r : rows) {
        std::ostringstream sec;
        sec.setf(std::ios::fixed);
        sec.precision(3);
        sec << r.seconds;
        out += fmt(r.requested_percent) + "," + fmt(r.achieved_percent) + "," + std::string(to_string(r.status)) +
               "," + fmt(r.cost) + "," + fmt(r.infrastructure_cost) + "," + std::to_string(r.arcs) + "," +
               std::to_string(r.links) + "," + sec.str() + "," + fmt(r.gap_percent) + "\n";
    }
    return out;
}

}  // namespace railnet
