#pragma once

/**
 * @file validate.hpp
 * @brief Plan extraction, an independent feasibility checker, cost
 *        recomputation and an exhaustive oracle for desk-scale instances.
 *
 * The checker and the oracle work from the instance semantics directly and
 * never consult the preprocessed index sets or the MILP.
 */

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "railnet/core.hpp"
#include "railnet/milp.hpp"
#include "railnet/solve.hpp"

namespace railnet {

class ExtractionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Instance too large for exhaustive search.
class OracleRefusal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Built track arc; `a < b` lexicographically.
struct BuiltArc {
    NodeId a;
    NodeId b;
    int track = 1;

    auto operator<=>(const BuiltArc&) const = default;
};

/// Built link at `at` joining `from` and `to`; `from < to`.
struct BuiltLink {
    NodeId at;
    NodeId from;
    NodeId to;

    auto operator<=>(const BuiltLink&) const = default;
};

struct SectionReduction {
    Minutes time_minutes = 0;
    Minutes headway_minutes = 0;

    bool operator==(const SectionReduction&) const = default;
};

struct RouteLeg {
    NodeId from;
    NodeId to;
    int track = 1;
    Minutes departure = 0;
    Minutes arrival = 0;

    bool operator==(const RouteLeg&) const = default;
};

struct TrainKey {
    std::string scenario;
    std::string train;

    auto operator<=>(const TrainKey&) const = default;
};

struct PlanSolution {
    std::set<BuiltArc> built_arcs;
    std::set<BuiltLink> built_links;
    /// Keyed by the canonical (smaller, larger) endpoint pair; zero entries omitted.
    std::map<std::pair<NodeId, NodeId>, SectionReduction> reductions;
    /// Legs in travel order for every active train.
    std::map<TrainKey, std::vector<RouteLeg>> routes;
    std::set<std::string> active_scenarios;
    std::set<TrainKey> active_trains;

    bool operator==(const PlanSolution&) const = default;
    std::vector<NodeId> route_nodes(const TrainKey& train) const;
};

/**
 * @brief Decodes a solver assignment into a plan.
 *
 * Binaries further than 1e-6 from 0 or 1 raise ExtractionError. Without
 * activation variables every scenario and train counts as active.
 */
PlanSolution extract_plan(const MilpSolution& solution, const MilpModel& model, const TimetableFamily& family);

struct Violation {
    std::string rule;  ///< path, link, travel-time, time-bounds, node-timing, max-stop, frequency, transfer,
                       ///< headway-following, headway-crossing, conflict, track-order, reduction-cap,
                       ///< coverage-share, optional-count
    std::string location;
    std::string detail;

    auto operator<=>(const Violation&) const = default;
};

struct ValidationReport {
    bool ok = true;
    std::vector<Violation> violations;

    bool has_rule(std::string_view rule) const;
};

ValidationReport check_plan(const PlanSolution& plan, const TimetableFamily& family, const InfrastructureSpec& spec,
                            const BuildConfig& config);

/// Building, link and reduction costs plus, with `penalties`, the penalty of
/// every inactive scenario and inactive train.
double recompute_cost(const PlanSolution& plan, const InfrastructureSpec& spec,
                      const TimetableFamily* penalties = nullptr);

/// Non-penalty part of the cost.
double infrastructure_cost(const PlanSolution& plan, const InfrastructureSpec& spec);

struct OracleLimits {
    double time_limit_seconds = 600.0;
    /// Trains whose activity is fixed (robust search only).
    std::map<TrainKey, bool> forced_activity;
    /// Scenario activity fixed by id.
    std::map<std::string, bool> forced_scenarios;
};

struct OracleResult {
    bool feasible = false;
    bool timed_out = false;
    double cost = 0.0;
    PlanSolution plan;
    long long leaves = 0;
};

/**
 * @brief Exhaustive optimum by enumeration.
 *
 * Enumerates scenario and optional-train activations, per-train simple paths
 * and tracks, and per-section reductions in increasing cost order; timetables
 * are found by disjunctive temporal-network search and reported as earliest
 * times. `robust` selects the penalty objective; otherwise every train runs.
 * Refuses instances with more than 6 nodes, 6 trains per scenario,
 * 3 scenarios or a horizon beyond 120 minutes.
 */
OracleResult brute_force_optimum(const TimetableFamily& family, const InfrastructureSpec& spec,
                                 const BuildConfig& config, bool robust, const OracleLimits& limits = {});

}  // namespace railnet
