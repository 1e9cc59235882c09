#include "railnet/preprocess.hpp"

#include <algorithm>
#include <set>

namespace railnet {

bool Path::uses_step(int from, int to) const {
    return std::any_of(steps.begin(), steps.end(), [&](const PathStep& s) { return s.from == from && s.to == to; });
}

bool Path::uses_link(int link) const { return std::find(links.begin(), links.end(), link) != links.end(); }

namespace {

struct PathSearch {
    const InfrastructureSpec& spec;
    const TrainType& type;
    const std::vector<std::optional<Minutes>>& to_destination;
    bool reduced;
    int destination;
    Minutes budget;
    std::set<int> vias;

    std::vector<int> nodes;
    std::vector<PathStep> steps;
    std::vector<int> links;
    std::vector<char> on_path;
    std::vector<Path> found;

    Minutes section_time(int section) const {
        const Section& s = spec.sections()[section];
        return *s.travel_time(type) - (reduced ? s.max_time_reduction_minutes : 0);
    }

    void extend(int u, Minutes elapsed) {
        if (u == destination) {
            if (std::all_of(vias.begin(), vias.end(), [&](int v) { return on_path[v]; })) {
                Path p;
                p.origin = nodes.front();
                p.destination = destination;
                p.train_type = type;
                p.nodes = nodes;
                p.steps = steps;
                p.links = links;
                p.min_time = elapsed;
                found.push_back(std::move(p));
            }
            return;
        }
        for (auto [v, s] : spec.neighbors(u)) {
            if (on_path[v] || !spec.sections()[s].travel_time(type)) continue;
            const Minutes t = elapsed + section_time(s);
            if (!to_destination[v] || t + *to_destination[v] > budget) continue;
            std::optional<int> link;
            if (nodes.size() >= 2) {
                link = spec.link_index(u, nodes[nodes.size() - 2], v);
                if (!link) continue;
            }
            nodes.push_back(v);
            steps.push_back({s, u, v});
            if (link) links.push_back(*link);
            on_path[v] = 1;
            extend(v, t);
            on_path[v] = 0;
            if (link) links.pop_back();
            steps.pop_back();
            nodes.pop_back();
        }
    }
};

}  // namespace

PathEnumeration enumerate_paths(const InfrastructureSpec& spec, std::string_view origin,
                                std::string_view destination, const TrainType& train_type,
                                Minutes time_budget, const std::set<NodeId>& via_nodes,
                                const PathOptions& options) {
    const int o = spec.require_node(origin);
    const int e = spec.require_node(destination);
    const auto matrix = travel_time_matrix(spec, train_type, options.assume_max_reductions);
    std::vector<std::optional<Minutes>> to_destination(spec.nodes().size());
    for (std::size_t v = 0; v < spec.nodes().size(); ++v) to_destination[v] = matrix[v][e];

    PathSearch search{spec, train_type, to_destination, options.assume_max_reductions, e, time_budget, {}, {}, {}, {},
                      std::vector<char>(spec.nodes().size(), 0), {}};
    for (const auto& via : via_nodes) search.vias.insert(spec.require_node(via));
    PathEnumeration result;
    if (o == e || !to_destination[o] || *to_destination[o] > time_budget) return result;

    search.nodes.push_back(o);
    search.on_path[o] = 1;
    search.extend(o, 0);

    result.paths = std::move(search.found);
    std::sort(result.paths.begin(), result.paths.end(), [](const Path& l, const Path& r) {
        return std::tie(l.min_time, l.nodes) < std::tie(r.min_time, r.nodes);
    });
    if (options.max_paths > 0 && static_cast<int>(result.paths.size()) > options.max_paths) {
        result.paths.resize(options.max_paths);
        result.truncated = true;
    }
    return result;
}

PathCatalog build_path_catalog(const InfrastructureSpec& spec, const TimetableFamily& family,
                               const BuildConfig& config) {
    PathCatalog catalog;
    PathOptions options{config.reductions_allowed, config.max_paths_per_triple};
    using Key = std::tuple<NodeId, NodeId, TrainType, Minutes, std::set<NodeId>>;
    std::map<Key, PathEnumeration> memo;
    for (int s = 0; s < static_cast<int>(family.scenarios.size()); ++s) {
        const auto& sc = family.scenarios[s];
        for (int k = 0; k < static_cast<int>(sc.trains.size()); ++k) {
            const Train& t = sc.trains[k];
            const Minutes budget = t.latest_arrival_minutes - t.earliest_departure_minutes;
            Key key{t.origin, t.destination, t.train_type, budget, t.via_nodes};
            auto it = memo.find(key);
            if (it == memo.end())
                it = memo.emplace(key, enumerate_paths(spec, t.origin, t.destination, t.train_type, budget,
                                                       t.via_nodes, options))
                         .first;
            catalog.trains.push_back({s, k, qualified_train_name(family, s, k)});
            catalog.paths.push_back(it->second.paths);
            if (it->second.truncated)
                catalog.warnings.push_back("train " + catalog.trains.back().name + ": path cap of " +
                                           std::to_string(options.max_paths) + " reached, cheapest paths kept");
        }
    }
    return catalog;
}

int RelevantSets::find_x(const TrainArc& key) const {
    auto it = std::lower_bound(x.begin(), x.end(), key);
    if (it == x.end() || *it != key) return -1;
    return static_cast<int>(it - x.begin());
}

bool RelevantSets::contains_arc(int section, int track) const {
    return std::binary_search(arcs.begin(), arcs.end(), ArcRef{section, track});
}

namespace {

struct WindowCalculator {
    const InfrastructureSpec& spec;
    const BuildConfig& config;
    std::map<TrainType, std::vector<std::vector<std::optional<Minutes>>>> matrices;

    const std::vector<std::vector<std::optional<Minutes>>>& matrix(const TrainType& type) {
        auto it = matrices.find(type);
        if (it == matrices.end())
            it = matrices.emplace(type, travel_time_matrix(spec, type, config.reductions_allowed)).first;
        return it->second;
    }

    std::pair<Minutes, Minutes> window(const Train& t, int from, int to) {
        const auto& m = matrix(t.train_type);
        const int o = spec.require_node(t.origin);
        const int e = spec.require_node(t.destination);
        const auto section = spec.section_index(from, to);
        if (!section || !m[o][from] || !m[to][e]) return {1, 0};
        const Section& s = spec.sections()[*section];
        auto run = s.travel_time(t.train_type);
        if (!run) return {1, 0};
        const Minutes min_run = *run - time_reduction_cap(s, config);
        return {t.earliest_departure_minutes + *m[o][from], t.latest_arrival_minutes - min_run - *m[to][e]};
    }
};

}  // namespace

DepartureWindow departure_window(const InfrastructureSpec& spec, const BuildConfig& config, const Train& train,
                                 std::string_view from, std::string_view to, int track) {
    WindowCalculator calc{spec, config, {}};
    const int u = spec.require_node(from);
    const int v = spec.require_node(to);
    auto [lb, ub] = calc.window(train, u, v);
    auto section = spec.section_index(u, v);
    return {-1, section ? *section : -1, u, v, track, lb, ub};
}

RelevantSets build_relevant_sets(const InfrastructureSpec& spec, const TimetableFamily& family,
                                 const PathCatalog& catalog, const BuildConfig& config) {
    RelevantSets sets;
    sets.trains = catalog.trains;
    sets.paths = catalog.paths;
    sets.warnings = catalog.warnings;

    const bool single_scenario = family.scenarios.size() == 1;
    std::set<TrainArc> x;
    std::set<int> links;
    for (int k = 0; k < static_cast<int>(sets.trains.size()); ++k) {
        const auto& ref = sets.trains[k];
        const Scenario& sc = family.scenarios[ref.scenario];
        const Train& t = sc.trains[ref.train];
        if (sets.paths[k].empty()) {
            if (single_scenario && sc.must_run(t))
                throw InfeasibleInstance("train " + ref.name + " has no path within its time bounds");
            sets.warnings.push_back("train " + ref.name + " has no path within its time bounds and cannot run");
        }
        for (const Path& p : sets.paths[k]) {
            for (const PathStep& step : p.steps) {
                const int tracks = effective_max_tracks(spec.sections()[step.section], config);
                for (int tr : track_options(InfrastructureSpec::direction(step.from, step.to), tracks,
                                            config.track_rules))
                    x.insert({k, step.section, step.from, step.to, tr});
            }
            links.insert(p.links.begin(), p.links.end());
        }
    }

    WindowCalculator calc{spec, config, {}};
    for (const TrainArc& entry : x) {
        const auto& ref = sets.trains[entry.train];
        const Train& t = family.scenarios[ref.scenario].trains[ref.train];
        auto [lb, ub] = calc.window(t, entry.from, entry.to);
        if (lb > ub) {
            sets.warnings.push_back("train " + ref.name + " cannot depart " + spec.nodes()[entry.from].id + "->" +
                                    spec.nodes()[entry.to].id + " within its bounds");
            continue;
        }
        sets.x.push_back(entry);
        sets.windows.push_back({entry.train, entry.section, entry.from, entry.to, entry.track, lb, ub});
    }

    std::set<ArcRef> arcs;
    for (const TrainArc& entry : sets.x) {
        arcs.insert({entry.section, entry.track});
        if (entry.track >= 2) arcs.insert({entry.section, 1});
        if (entry.track >= 3) arcs.insert({entry.section, 2});
    }
    sets.arcs.assign(arcs.begin(), arcs.end());
    sets.links.assign(links.begin(), links.end());
    std::set<int> sections;
    std::set<int> nodes;
    for (const ArcRef& a : sets.arcs) {
        sections.insert(a.section);
        nodes.insert(spec.section_node_a(a.section));
        nodes.insert(spec.section_node_b(a.section));
    }
    sets.sections.assign(sections.begin(), sections.end());
    sets.nodes.assign(nodes.begin(), nodes.end());
    return sets;
}

RelevantSets build_relevant_sets(const InfrastructureSpec& spec, const TimetableFamily& family,
                                 const BuildConfig& config) {
    return build_relevant_sets(spec, family, build_path_catalog(spec, family, config), config);
}

HeadwayCase classify_headway_pair(HeadwayGeometry geometry, const TraversalWindow& train1,
                                  const TraversalWindow& train2, Minutes separation_1_first,
                                  Minutes separation_2_first) {
    HeadwayCase c;
    c.geometry = geometry;
    auto ordered = [&](HeadwayVariant v, int first) {
        c.variant = v;
        c.first = first;
        c.second = 3 - first;
        return c;
    };
    if (geometry == HeadwayGeometry::Following) {
        if (train1.ub < train2.lb)
            return ordered(train2.lb - train1.ub >= separation_1_first ? HeadwayVariant::Implicit
                                                                       : HeadwayVariant::FixedOrder,
                           1);
        if (train2.ub < train1.lb)
            return ordered(train1.lb - train2.ub >= separation_2_first ? HeadwayVariant::Implicit
                                                                       : HeadwayVariant::FixedOrder,
                           2);
        c.variant = HeadwayVariant::FreeOrder;
        return c;
    }

    // Train 1 first: it reaches the far node before train 2 leaves from there.
    const bool one_first = train1.lb + train1.min_run + separation_1_first <= train2.ub;
    const bool two_first = train2.lb + train2.min_run + separation_2_first <= train1.ub;
    if (!one_first && !two_first) {
        c.variant = HeadwayVariant::Conflict;
        return c;
    }
    if (one_first && !two_first)
        return ordered(train1.ub + train1.max_run + separation_1_first <= train2.lb ? HeadwayVariant::Implicit
                                                                                   : HeadwayVariant::FixedOrder,
                       1);
    if (two_first && !one_first)
        return ordered(train2.ub + train2.max_run + separation_2_first <= train1.lb ? HeadwayVariant::Implicit
                                                                                   : HeadwayVariant::FixedOrder,
                       2);
    c.variant = HeadwayVariant::FreeOrder;
    return c;
}

HeadwaySets build_headway_sets(const InfrastructureSpec& spec, const TimetableFamily& family,
                               const RelevantSets& sets, const BuildConfig& config) {
    HeadwaySets out;
    std::map<ArcRef, std::vector<int>> by_arc;
    for (int i = 0; i < static_cast<int>(sets.x.size()); ++i)
        by_arc[{sets.x[i].section, sets.x[i].track}].push_back(i);

    auto train_of = [&](int k) -> const Train& {
        const auto& ref = sets.trains[k];
        return family.scenarios[ref.scenario].trains[ref.train];
    };
    auto traversal = [&](int xi) {
        const auto& w = sets.windows[xi];
        const Section& s = spec.sections()[w.section];
        const Minutes run = *s.travel_time(train_of(w.train).train_type);
        return TraversalWindow{w.lb, w.ub, run - time_reduction_cap(s, config), run};
    };
    auto tuple_of = [&](int xi, int other) {
        const auto& e = sets.x[xi];
        return HeadwayTuple{e.section, e.from, e.to, e.track, e.train, sets.x[other].train};
    };

    for (const auto& [arc, entries] : by_arc) {
        const Section& section = spec.sections()[arc.section];
        for (std::size_t i = 0; i < entries.size(); ++i) {
            for (std::size_t j = i + 1; j < entries.size(); ++j) {
                int e1 = entries[i];
                int e2 = entries[j];
                const TrainArc& x1 = sets.x[e1];
                const TrainArc& x2 = sets.x[e2];
                if (x1.train == x2.train) continue;
                if (!config.cross_scenario_headways &&
                    sets.trains[x1.train].scenario != sets.trains[x2.train].scenario)
                    continue;
                const Train& t1 = train_of(x1.train);
                const Train& t2 = train_of(x2.train);

                if (x1.from == x2.from) {
                    const Minutes h12 = *section.headway(t1.train_type, t2.train_type);
                    const Minutes h21 = *section.headway(t2.train_type, t1.train_type);
                    const HeadwayCase c = classify_headway_pair(HeadwayGeometry::Following, traversal(e1),
                                                                traversal(e2), h12, h21);
                    if (c.variant == HeadwayVariant::FixedOrder) {
                        const HeadwayTuple t = c.first == 1 ? tuple_of(e1, e2) : tuple_of(e2, e1);
                        out.fixed_following.push_back(t);
                        out.enforce_following.push_back(t);
                    } else if (c.variant == HeadwayVariant::FreeOrder) {
                        out.free_following.push_back(tuple_of(e1, e2));
                        out.enforce_following.push_back(tuple_of(e1, e2));
                        out.enforce_following.push_back(tuple_of(e2, e1));
                    }
                    continue;
                }

                // Crossing: e1 becomes the ascending traversal.
                if (x1.from > x1.to) std::swap(e1, e2);
                const TrainArc& up = sets.x[e1];
                const Minutes cross_far = spec.nodes()[up.to].crossing_time_minutes;
                const Minutes cross_near = spec.nodes()[up.from].crossing_time_minutes;
                const HeadwayCase c = classify_headway_pair(HeadwayGeometry::Crossing, traversal(e1), traversal(e2),
                                                            cross_far, cross_near);
                switch (c.variant) {
                    case HeadwayVariant::Implicit: break;
                    case HeadwayVariant::Conflict: out.conflicts.push_back(tuple_of(e1, e2)); break;
                    case HeadwayVariant::FixedOrder: {
                        const HeadwayTuple t = c.first == 1 ? tuple_of(e1, e2) : tuple_of(e2, e1);
                        out.fixed_crossing.push_back(t);
                        out.enforce_crossing.push_back(t);
                        break;
                    }
                    case HeadwayVariant::FreeOrder:
                        out.free_crossing.push_back(tuple_of(e1, e2));
                        out.enforce_crossing.push_back(tuple_of(e1, e2));
                        out.enforce_crossing.push_back(tuple_of(e2, e1));
                        break;
                }
            }
        }
    }
    for (auto* v : {&out.free_following, &out.free_crossing, &out.fixed_following, &out.fixed_crossing,
                    &out.enforce_following, &out.enforce_crossing, &out.conflicts})
        std::sort(v->begin(), v->end());
    return out;
}

}  // namespace railnet
