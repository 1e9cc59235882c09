#pragma once

/**
 * @file preprocess.hpp
 * @brief Path catalogue, relevant index sets, departure windows and headway
 *        succession-case classification.
 *
 * Everything here is a pure function of the instance. The outputs shrink the
 * model: train-arc pairs that lie on no admissible path are never created,
 * and headway pairs whose order or separation is already implied by the
 * departure windows get no sequencing variables.
 */

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "railnet/core.hpp"

namespace railnet {

struct PathStep {
    int section = -1;
    int from = -1;  ///< node index
    int to = -1;    ///< node index

    auto operator<=>(const PathStep&) const = default;
};

/// Simple node path; the parallel track is chosen later.
struct Path {
    int origin = -1;
    int destination = -1;
    TrainType train_type;
    std::vector<int> nodes;
    std::vector<PathStep> steps;  ///< directed sections (section indicators)
    std::vector<int> links;       ///< link indices of every interior triple
    Minutes min_time = 0;

    bool uses_step(int from, int to) const;
    bool uses_link(int link) const;
};

struct PathOptions {
    bool assume_max_reductions = true;
    int max_paths = 64;
};

struct PathEnumeration {
    std::vector<Path> paths;
    bool truncated = false;  ///< more paths existed than max_paths
};

/**
 * @brief Simple paths from origin to destination within the time budget.
 *
 * A path qualifies when its minimal travel time (with maximal reductions if
 * requested) does not exceed the budget, it visits every via node and every
 * interior node triple is a candidate node link. Sorted by minimal time, then
 * by node sequence; at most `max_paths` are kept.
 */
PathEnumeration enumerate_paths(const InfrastructureSpec& spec, std::string_view origin,
                                std::string_view destination, const TrainType& train_type,
                                Minutes time_budget, const std::set<NodeId>& via_nodes,
                                const PathOptions& options = {});

struct TrainRef {
    int scenario = -1;
    int train = -1;
    std::string name;  ///< model-level train name, see qualified_train_name
};

/// One (train, directed arc) combination: an x-variable candidate.
struct TrainArc {
    int train = -1;  ///< index into RelevantSets::trains
    int section = -1;
    int from = -1;
    int to = -1;
    int track = 0;

    auto operator<=>(const TrainArc&) const = default;
};

struct DepartureWindow {
    int train = -1;
    int section = -1;
    int from = -1;
    int to = -1;
    int track = 0;
    Minutes lb = 0;
    Minutes ub = 0;
};

struct ArcRef {
    int section = -1;
    int track = 0;

    auto operator<=>(const ArcRef&) const = default;
};

struct PathCatalog {
    std::vector<TrainRef> trains;
    std::vector<std::vector<Path>> paths;  ///< W_k per train
    std::vector<std::string> warnings;
};

/// Enumerates the admissible paths of every train of the family.
PathCatalog build_path_catalog(const InfrastructureSpec& spec, const TimetableFamily& family,
                               const BuildConfig& config);

struct RelevantSets {
    std::vector<TrainRef> trains;
    std::vector<std::vector<Path>> paths;  ///< W_k
    std::vector<TrainArc> x;               ///< sorted
    std::vector<DepartureWindow> windows;  ///< parallel to x
    std::vector<ArcRef> arcs;              ///< E_a, closed under track prerequisites
    std::vector<int> links;                ///< L_a
    std::vector<int> sections;             ///< S_a
    std::vector<int> nodes;                ///< N_a
    std::vector<std::string> warnings;

    int find_x(const TrainArc& key) const;  ///< -1 when absent
    bool contains_arc(int section, int track) const;
};

/**
 * @brief Reduces the network to what the candidate paths use.
 *
 * Throws InfeasibleInstance if a train that has to run in a single-scenario
 * family has no admissible path.
 */
RelevantSets build_relevant_sets(const InfrastructureSpec& spec, const TimetableFamily& family,
                                 const PathCatalog& catalog, const BuildConfig& config);
RelevantSets build_relevant_sets(const InfrastructureSpec& spec, const TimetableFamily& family,
                                 const BuildConfig& config);

/**
 * @brief Departure window of a train on a directed section.
 *
 * lb = earliest departure + shortest time origin -> from;
 * ub = latest arrival - fastest traversal - shortest time to -> destination.
 * Shortest times assume maximal reductions when reductions are allowed.
 */
DepartureWindow departure_window(const InfrastructureSpec& spec, const BuildConfig& config, const Train& train,
                                 std::string_view from, std::string_view to, int track = 1);

enum class HeadwayVariant { Implicit, FixedOrder, FreeOrder, Conflict };
enum class HeadwayGeometry { Following, Crossing };

struct HeadwayCase {
    HeadwayVariant variant = HeadwayVariant::Implicit;
    HeadwayGeometry geometry = HeadwayGeometry::Following;
    int first = 0;  ///< 1 or 2 for FixedOrder / Implicit with a known order
    int second = 0;

    bool operator==(const HeadwayCase&) const = default;
};

/// Departure window plus traversal time bounds of one train on the arc.
struct TraversalWindow {
    Minutes lb = 0;
    Minutes ub = 0;
    Minutes min_run = 0;  ///< travel time minus maximal reduction
    Minutes max_run = 0;  ///< unreduced travel time
};

/**
 * @brief Classifies the succession of two trains sharing one track.
 *
 * Following: `separation_1_first` is the headway with train 1 leading,
 * `separation_2_first` with train 2 leading. Crossing (train 1 enters where
 * train 2 leaves): the separations are the crossing times of the node where
 * the second train of the respective order departs.
 */
HeadwayCase classify_headway_pair(HeadwayGeometry geometry, const TraversalWindow& train1,
                                  const TraversalWindow& train2, Minutes separation_1_first,
                                  Minutes separation_2_first);

/// (section, from, to, track, first, second): `first` travels from -> to.
struct HeadwayTuple {
    int section = -1;
    int from = -1;
    int to = -1;
    int track = 0;
    int first = -1;
    int second = -1;

    auto operator<=>(const HeadwayTuple&) const = default;
};

struct HeadwaySets {
    std::vector<HeadwayTuple> free_following;     ///< P_f
    std::vector<HeadwayTuple> free_crossing;      ///< P_c
    std::vector<HeadwayTuple> fixed_following;    ///< O_f
    std::vector<HeadwayTuple> fixed_crossing;     ///< O_c
    std::vector<HeadwayTuple> enforce_following;  ///< H_f
    std::vector<HeadwayTuple> enforce_crossing;   ///< H_c
    std::vector<HeadwayTuple> conflicts;          ///< C_c
};

/// Classifies every pair of trains sharing a track in X.
HeadwaySets build_headway_sets(const InfrastructureSpec& spec, const TimetableFamily& family,
                               const RelevantSets& sets, const BuildConfig& config);

}  // namespace railnet
