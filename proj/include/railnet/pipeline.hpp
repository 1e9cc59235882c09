#pragma once

/**
 * @file pipeline.hpp
 * @brief Preprocess, build, solve, extract and check in one call, plus the
 *        artifact tables and the coverage-share sweep.
 */

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "railnet/io.hpp"
#include "railnet/milp.hpp"
#include "railnet/preprocess.hpp"
#include "railnet/solve.hpp"
#include "railnet/validate.hpp"

namespace railnet {

/// Robust model when the family has several scenarios, optional trains,
/// a coverage share below one, or the document forces it.
bool needs_robust_model(const Instance& instance);

struct BuiltModel {
    RelevantSets sets;
    HeadwaySets headways;
    MilpModel model;
    bool robust = false;
    double preprocessing_seconds = 0.0;
    double build_seconds = 0.0;
};

/// Throws InfeasibleInstance when a train that has to run has no path.
BuiltModel build_model(const Instance& instance, bool robust);

struct PipelineResult {
    SolveStatus status = SolveStatus::Infeasible;
    bool robust = false;
    double objective = 0.0;
    double best_bound = 0.0;
    double gap_percent = 0.0;
    double preprocessing_seconds = 0.0;
    double build_seconds = 0.0;
    double solve_seconds = 0.0;
    std::size_t variables = 0;
    std::size_t constraints = 0;
    long long nodes = 0;
    std::optional<PlanSolution> plan;
    ValidationReport validation;
    double recomputed_cost = 0.0;
    std::vector<std::string> warnings;
    /// Reason for infeasibility detected before solving.
    std::string infeasibility;
    /// Variable values by model id, empty without a solution.
    std::vector<double> values;
};

struct PipelineOptions {
    SolveLimits limits;
    /// Solution text from an external solver; replaces the internal solve.
    std::optional<std::string> external_solution;
    /// Starting incumbent by variable id; ignored when infeasible.
    std::vector<double> start;
};

PipelineResult run_pipeline(const Instance& instance, const PipelineOptions& options = {});

/// Run report with the columns status, objective, gap and timings.
nlohmann::json report_to_json(const Instance& instance, const PipelineResult& result);

/// Writes network.csv, routing.csv, timetable.csv, diagram.csv, report.json
/// and, with a plan, plan.json into `dir`.
void write_artifacts(const std::filesystem::path& dir, const Instance& instance, const PipelineResult& result);

struct SweepRow {
    double requested_percent = 0.0;
    double achieved_percent = 0.0;
    SolveStatus status = SolveStatus::Infeasible;
    double cost = 0.0;
    double infrastructure_cost = 0.0;
    std::size_t arcs = 0;
    std::size_t links = 0;
    double seconds = 0.0;
    double gap_percent = 0.0;
};

/// Solves the family once per requested share (in percent). Refuses
/// families with fewer than two scenarios. Rows are solved from the highest
/// share down, each seeded with the solution of the previous one.
std::vector<SweepRow> sweep_coverage(const Instance& instance, const std::vector<double>& percents,
                                     const SolveLimits& limits = {});
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace railnet
