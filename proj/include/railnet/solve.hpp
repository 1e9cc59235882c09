#pragma once

/**
 * @file solve.hpp
 * @brief In-repo exact branch-and-bound and the LP text exchange format.
 */

#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "railnet/milp.hpp"

namespace railnet {

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Raised when the LP relaxation cannot be solved reliably.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolveLimits {
    double time_limit_seconds = 7200.0;
    long long node_limit = std::numeric_limits<long long>::max();
    double absolute_gap = 0.0;
    double relative_gap = 0.0;
    double integrality_tolerance = 1e-9;
};

enum class SolveStatus { Optimal, Feasible, Infeasible, TimedOutNoSolution };

std::string_view to_string(SolveStatus status);

struct MilpSolution {
    SolveStatus status = SolveStatus::Infeasible;
    std::vector<double> values;  ///< by variable id, empty without a solution
    double objective = 0.0;
    double best_bound = 0.0;
    double gap_percent = 0.0;
    long long nodes = 0;
    long long lp_iterations = 0;
    double seconds = 0.0;
    std::vector<std::string> warnings;

    bool has_solution() const { return status == SolveStatus::Optimal || status == SolveStatus::Feasible; }
};

enum class LpStatus { Optimal, Infeasible };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> values;
    double objective = 0.0;
    long long iterations = 0;
};

/// Continuous relaxation of the model (every variable kept within its bounds).
LpResult solve_lp_relaxation(const MilpModel& model);

/**
 * @brief Branch-and-bound over dual simplex relaxations.
 *
 * Dives depth-first until the first incumbent, then switches to best-first.
 * Branches on the lowest-index fractional binary, then the lowest-index
 * fractional general integer. Ties in the open-node queue are broken by
 * depth (deeper first) and creation order, so runs are reproducible.
 */
MilpSolution solve_branch_and_bound(const MilpModel& model, const SolveLimits& limits = {});
/// Same, seeded with `start` as incumbent when it is integral and feasible.
MilpSolution solve_branch_and_bound(const MilpModel& model, const SolveLimits& limits,
                                    const std::vector<double>& start);

/// CPLEX-style LP text. Every variable appears in the Bounds section in id order.
std::string emit_model_text(const MilpModel& model);
MilpModel parse_model_text(std::string_view text);

/// Reads `<name> <value>` lines (`#` starts a comment). Missing variables are 0.
MilpSolution import_solution(std::string_view text, const MilpModel& model);

/// `<name> <value>` listing of a solution, for round trips and external tools.
std::string format_solution(const MilpSolution& solution, const MilpModel& model);

}  // namespace railnet
