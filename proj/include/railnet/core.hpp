#pragma once

/**
 * @file core.hpp
 * @brief Domain model: infrastructure multigraph, operational concepts,
 *        timetable families and build configurations.
 *
 * All durations are integer minutes. Node ids are ordered lexicographically;
 * a train travelling from the smaller to the larger id of a section travels
 * in ascending direction, which drives the track-choice rules.
 */

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace railnet {

using Minutes = int;
using NodeId = std::string;
using TrainType = std::string;

/// Malformed input: unknown ids, out-of-range arguments.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The instance cannot have a feasible plan (detected before solving).
class InfeasibleInstance : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Node {
    NodeId id;
    Minutes max_stop_minutes = 0;
    Minutes crossing_time_minutes = 0;
};

/// A line section between two nodes. Each parallel track is one arc.
struct Section {
    NodeId a;  ///< smaller endpoint after canonicalisation
    NodeId b;  ///< larger endpoint after canonicalisation
    double length_km = 0.0;
    int max_tracks = 1;
    std::map<TrainType, Minutes> travel_time_minutes;
    /// (leading type, following type) -> minimal headway on one track.
    std::map<std::pair<TrainType, TrainType>, Minutes> base_headway_minutes;
    std::map<int, double> track_cost;
    double time_reduction_cost_per_minute = 0.0;
    double headway_reduction_cost_per_minute = 0.0;
    Minutes max_time_reduction_minutes = 0;
    Minutes max_headway_reduction_minutes = 0;

    std::optional<Minutes> travel_time(const TrainType& type) const;
    std::optional<Minutes> headway(const TrainType& leading, const TrainType& following) const;
    double cost_of_track(int track) const;
};

/// Through-movement from `from` via `at` to `to` (usable in both directions).
struct NodeLink {
    NodeId at;
    NodeId from;
    NodeId to;
    double cost = 0.0;
};

enum class Direction { Ascending, Descending };

/**
 * @brief Immutable infrastructure multigraph.
 *
 * Nodes are stored sorted by id, so node indices follow the lexicographic
 * order. Section endpoints are swapped so that `a < b`. Duplicate entries are
 * kept (validate_instance reports them); index lookups resolve to the first.
 */
class InfrastructureSpec {
public:
    InfrastructureSpec() = default;
    InfrastructureSpec(std::vector<Node> nodes, std::vector<Section> sections,
                       std::vector<NodeLink> links);

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Section>& sections() const { return sections_; }
    const std::vector<NodeLink>& links() const { return links_; }

    std::optional<int> node_index(std::string_view id) const;
    int require_node(std::string_view id) const;
    std::optional<int> section_index(int u, int v) const;
    /// Link at node `at` joining neighbours u and v, in either orientation.
    std::optional<int> link_index(int at, int u, int v) const;
    /// (neighbour node, section index) pairs, sorted by neighbour.
    const std::vector<std::pair<int, int>>& neighbors(int node) const { return adjacency_[node]; }
    int section_node_a(int section) const { return section_a_[section]; }
    int section_node_b(int section) const { return section_b_[section]; }
    /// Traversal direction of u -> v under the lexicographic node order.
    static Direction direction(int u, int v) { return u < v ? Direction::Ascending : Direction::Descending; }
    /// All train types that have a travel time on at least one section.
    std::set<TrainType> train_types() const;

private:
    std::vector<Node> nodes_;
    std::vector<Section> sections_;
    std::vector<NodeLink> links_;
    std::map<std::string, int, std::less<>> node_lookup_;
    std::map<std::pair<int, int>, int> section_lookup_;
    std::map<std::tuple<int, int, int>, int> link_lookup_;
    std::vector<std::vector<std::pair<int, int>>> adjacency_;
    std::vector<int> section_a_;
    std::vector<int> section_b_;
};

struct Train {
    std::string id;
    TrainType train_type;
    NodeId origin;
    NodeId destination;
    Minutes earliest_departure_minutes = 0;
    Minutes latest_arrival_minutes = 0;
    std::set<NodeId> via_nodes;
    bool optional = false;
    double penalty = 0.0;
};

enum class RelationKind { ArrivalFrequency, DepartureFrequency, Transfer };

std::string_view to_string(RelationKind kind);
std::optional<RelationKind> relation_kind_from_string(std::string_view text);

/// Bound on the gap between two events of two trains at one node.
struct TimingRelation {
    RelationKind kind = RelationKind::DepartureFrequency;
    std::string first_train;
    std::string second_train;
    NodeId at_node;
    Minutes min_minutes = 0;
    Minutes max_minutes = 0;
};

struct Scenario {
    std::string id;
    std::vector<Train> trains;
    std::vector<TimingRelation> relations;
    double penalty = 0.0;
    int demanded_optional_count = 0;
    std::set<std::string> chosen_optional;

    const Train* find_train(std::string_view train_id) const;
    int mandatory_count() const;
    int optional_count() const;
    /// Mandatory, or optional but pre-selected to run.
    bool must_run(const Train& train) const;
};

struct TimetableFamily {
    std::vector<Scenario> scenarios;
    double coverage_share = 1.0;

    /// One scenario and no optional trains.
    bool is_deterministic() const;
    /// Smallest scenario count whose share reaches coverage_share.
    int required_active_scenarios() const;
    std::size_t train_count() const;
};

struct BuildConfig {
    int max_tracks_global = 2;
    bool reductions_allowed = true;
    Minutes headway_floor_minutes = 2;
    Minutes planning_horizon_end_minutes = 120;
    bool track_rules = true;
    bool cross_scenario_headways = false;
    /// Adds x <= y and p <= l rows next to the aggregated activation rows.
    bool tight_linking = true;
    int max_paths_per_triple = 64;

    /// 'A' (4 tracks, reductions), 'B' (2 tracks, reductions), 'C' (2 tracks, none).
    static BuildConfig preset(char name, Minutes horizon_end = 120);
};

struct Diagnostic {
    std::string location;
    std::string message;

    bool operator==(const Diagnostic&) const = default;
    auto operator<=>(const Diagnostic&) const = default;
};

/// Every invariant violation of the instance, sorted. Empty means well-formed.
std::vector<Diagnostic> validate_instance(const InfrastructureSpec& spec, const TimetableFamily& family);
/// Configuration checks against an instance (horizon, track limits, floors).
std::vector<Diagnostic> validate_config(const InfrastructureSpec& spec, const TimetableFamily& family,
                                        const BuildConfig& config);

/**
 * @brief Shortest travel time of `train_type` between two nodes.
 *
 * Sections without a travel time for the type are not traversable. With
 * `assume_max_reductions`, every section contributes its travel time minus
 * its maximal travel-time reduction. Returns nullopt when unreachable.
 */
std::optional<Minutes> min_travel_time(const InfrastructureSpec& spec, const TrainType& train_type,
                                       std::string_view from, std::string_view to,
                                       bool assume_max_reductions);

/// All-pairs shortest travel times for one train type (row = from, column = to).
std::vector<std::vector<std::optional<Minutes>>> travel_time_matrix(const InfrastructureSpec& spec,
                                                                    const TrainType& train_type,
                                                                    bool assume_max_reductions);

/// Tracks a train may use under the track-choice rules (1 <= max_tracks <= 4).
std::vector<int> allowed_tracks(Direction direction, int max_tracks);
/// allowed_tracks, or every track when the rules are disabled.
std::vector<int> track_options(Direction direction, int max_tracks, bool track_rules);

int effective_max_tracks(const Section& section, const BuildConfig& config);
Minutes time_reduction_cap(const Section& section, const BuildConfig& config);
/// Bounded by the section field, one minute per ten km and the headway floor.
Minutes headway_reduction_cap(const Section& section, const BuildConfig& config);
/// Largest headway or crossing time anywhere in the instance.
Minutes max_separation(const InfrastructureSpec& spec);

/// Name used for a train in model variables: plain id, or "scenario.train"
/// when the family has several scenarios.
std::string qualified_train_name(const TimetableFamily& family, int scenario, int train);

}  // namespace railnet
