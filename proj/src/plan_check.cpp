#include <algorithm>
#include <cmath>
#include <sstream>

#include "railnet/validate.hpp"

namespace railnet {

std::vector<NodeId> PlanSolution::route_nodes(const TrainKey& train) const {
    std::vector<NodeId> nodes;
    auto it = routes.find(train);
    if (it == routes.end() || it->second.empty()) return nodes;
    nodes.push_back(it->second.front().from);
    for (const auto& leg : it->second) nodes.push_back(leg.to);
    return nodes;
}

bool ValidationReport::has_rule(std::string_view rule) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.rule == rule; });
}

namespace {

std::pair<NodeId, NodeId> canonical(const NodeId& u, const NodeId& v) { return u < v ? std::pair{u, v} : std::pair{v, u}; }

int binary_value(double v, const std::string& name) {
    if (std::abs(v) <= 1e-6) return 0;
    if (std::abs(v - 1.0) <= 1e-6) return 1;
    throw ExtractionError("binary " + name + " has fractional value " + std::to_string(v));
}

Minutes integer_value(double v) { return static_cast<Minutes>(std::llround(v)); }

}  // namespace

PlanSolution extract_plan(const MilpSolution& solution, const MilpModel& model, const TimetableFamily& family) {
    if (!solution.has_solution()) throw ExtractionError("no solution to extract");
    if (solution.values.size() != model.variables().size())
        throw ExtractionError("solution does not match the model");
    std::map<std::string, TrainKey> train_by_name;
    for (int s = 0; s < static_cast<int>(family.scenarios.size()); ++s)
        for (int t = 0; t < static_cast<int>(family.scenarios[s].trains.size()); ++t)
            train_by_name[qualified_train_name(family, s, t)] = {family.scenarios[s].id,
                                                                 family.scenarios[s].trains[t].id};
    auto train_of = [&](const std::string& name) {
        auto it = train_by_name.find(name);
        if (it == train_by_name.end()) throw ExtractionError("unknown train " + name);
        return it->second;
    };

    PlanSolution plan;
    bool has_activation = false;
    std::map<std::string, double> by_name;
    std::map<TrainKey, std::vector<std::pair<std::vector<std::string>, int>>> legs;  // args, x id
    for (const auto& v : model.variables()) {
        const double value = solution.values[v.id];
        auto parsed = parse_variable_name(v.name);
        if (!parsed) continue;
        by_name[v.name] = value;
        const auto& kind = parsed->kind;
        const auto& args = parsed->args;
        if (kind == "y" && args.size() == 3) {
            if (binary_value(value, v.name)) plan.built_arcs.insert({args[0], args[1], std::stoi(args[2])});
        } else if (kind == "l" && args.size() == 3) {
            if (binary_value(value, v.name)) {
                auto [f, t] = canonical(args[1], args[2]);
                plan.built_links.insert({args[0], f, t});
            }
        } else if ((kind == "r_time" || kind == "r_mht") && args.size() == 2) {
            if (args[0] > args[1]) continue;  // the reverse direction carries the same value
            const Minutes r = integer_value(value);
            if (r == 0) continue;
            auto& red = plan.reductions[{args[0], args[1]}];
            (kind == "r_time" ? red.time_minutes : red.headway_minutes) = r;
        } else if (kind == "x" && args.size() == 4) {
            if (binary_value(value, v.name)) legs[train_of(args[0])].push_back({args, v.id});
        } else if (kind == "o_szo" && args.size() == 1) {
            has_activation = true;
            if (binary_value(value, v.name)) plan.active_scenarios.insert(args[0]);
        } else if (kind == "o_train" && args.size() == 1) {
            if (binary_value(value, v.name)) plan.active_trains.insert(train_of(args[0]));
        } else if (v.domain == VariableDomain::Binary) {
            binary_value(value, v.name);
        }
    }
    if (!has_activation) {
        for (const auto& sc : family.scenarios) {
            plan.active_scenarios.insert(sc.id);
            for (const auto& t : sc.trains) plan.active_trains.insert({sc.id, t.id});
        }
    }
    for (auto& [key, list] : legs) {
        std::string name;
        for (const auto& [n, k] : train_by_name)
            if (k == key) name = n;
        std::vector<RouteLeg> raw;
        for (const auto& [args, id] : list) {
            const std::string suffix = args[0] + "," + args[1] + "," + args[2] + "," + args[3] + ")";
            RouteLeg leg{args[1], args[2], std::stoi(args[3]), 0, 0};
            if (auto it = by_name.find("d(" + suffix); it != by_name.end()) leg.departure = integer_value(it->second);
            if (auto it = by_name.find("a(" + suffix); it != by_name.end()) leg.arrival = integer_value(it->second);
            raw.push_back(leg);
        }
        const Scenario* sc = nullptr;
        for (const auto& s : family.scenarios)
            if (s.id == key.scenario) sc = &s;
        const Train* train = sc ? sc->find_train(key.train) : nullptr;
        std::vector<RouteLeg> ordered;
        NodeId at = train ? train->origin : raw.front().from;
        while (true) {
            auto it = std::find_if(raw.begin(), raw.end(), [&](const RouteLeg& l) { return l.from == at; });
            if (it == raw.end()) break;
            ordered.push_back(*it);
            at = it->to;
            raw.erase(it);
        }
        std::sort(raw.begin(), raw.end(),
                  [](const RouteLeg& l, const RouteLeg& r) { return l.departure < r.departure; });
        ordered.insert(ordered.end(), raw.begin(), raw.end());
        plan.routes[key] = std::move(ordered);
    }
    return plan;
}

namespace {

/// Track rule re-derived from the convention: ascending trains use odd
/// tracks, descending trains use track one or even tracks.
bool track_permitted(const NodeId& from, const NodeId& to, int track) {
    if (from < to) return track % 2 == 1;
    return track == 1 || track % 2 == 0;
}

class Checker {
public:
    Checker(const PlanSolution& plan, const TimetableFamily& family, const InfrastructureSpec& spec,
            const BuildConfig& config)
        : plan_(plan), family_(family), spec_(spec), config_(config) {}

    ValidationReport run() {
        check_activation();
        check_infrastructure();
        for (const auto& sc : family_.scenarios) {
            if (!plan_.active_scenarios.count(sc.id)) continue;
            for (const auto& t : sc.trains)
                if (plan_.active_trains.count({sc.id, t.id})) check_train(sc, t);
            check_relations(sc);
        }
        check_headways();
        std::sort(report_.violations.begin(), report_.violations.end());
        report_.violations.erase(std::unique(report_.violations.begin(), report_.violations.end()),
                                 report_.violations.end());
        report_.ok = report_.violations.empty();
        return report_;
    }

private:
    void flag(std::string rule, std::string location, std::string detail) {
        report_.violations.push_back({std::move(rule), std::move(location), std::move(detail)});
    }
    static std::string where(const TrainKey& k) { return k.scenario + "/" + k.train; }
    static std::string where(const NodeId& a, const NodeId& b, int track) {
        return a + "-" + b + " track " + std::to_string(track);
    }

    const Section* section(const NodeId& u, const NodeId& v) const {
        auto iu = spec_.node_index(u);
        auto iv = spec_.node_index(v);
        if (!iu || !iv) return nullptr;
        auto s = spec_.section_index(*iu, *iv);
        return s ? &spec_.sections()[*s] : nullptr;
    }

    SectionReduction reduction(const NodeId& u, const NodeId& v) const {
        auto it = plan_.reductions.find(canonical(u, v));
        return it == plan_.reductions.end() ? SectionReduction{} : it->second;
    }

    int track_limit(const Section& s) const { return std::min(s.max_tracks, config_.max_tracks_global); }

    void check_activation() {
        std::set<std::string> ids;
        for (const auto& sc : family_.scenarios) ids.insert(sc.id);
        for (const auto& s : plan_.active_scenarios)
            if (!ids.count(s)) flag("coverage-share", s, "unknown active scenario");
        const int active = static_cast<int>(std::count_if(family_.scenarios.begin(), family_.scenarios.end(),
                                                          [&](const Scenario& sc) {
                                                              return plan_.active_scenarios.count(sc.id) > 0;
                                                          }));
        if (active < family_.required_active_scenarios())
            flag("coverage-share", "family",
                 std::to_string(active) + " active scenarios, " +
                     std::to_string(family_.required_active_scenarios()) + " required");
        for (const auto& key : plan_.active_trains) {
            const Scenario* sc = nullptr;
            for (const auto& s : family_.scenarios)
                if (s.id == key.scenario) sc = &s;
            if (!sc || !sc->find_train(key.train))
                flag("optional-count", where(key), "unknown active train");
            else if (!plan_.active_scenarios.count(key.scenario))
                flag("optional-count", where(key), "train active in an inactive scenario");
        }
        for (const auto& [key, legs] : plan_.routes)
            if (!plan_.active_trains.count(key) && !legs.empty())
                flag("path", where(key), "route given for an inactive train");
        for (const auto& sc : family_.scenarios) {
            if (!plan_.active_scenarios.count(sc.id)) continue;
            int optional_active = 0;
            for (const auto& t : sc.trains) {
                const bool on = plan_.active_trains.count({sc.id, t.id}) > 0;
                const bool required = !t.optional || sc.chosen_optional.count(t.id);
                if (required && !on) flag("optional-count", where({sc.id, t.id}), "required train is not running");
                if (t.optional && on) ++optional_active;
            }
            if (optional_active < sc.demanded_optional_count)
                flag("optional-count", sc.id,
                     std::to_string(optional_active) + " optional trains run, " +
                         std::to_string(sc.demanded_optional_count) + " demanded");
        }
    }

    void check_infrastructure() {
        for (const auto& arc : plan_.built_arcs) {
            const Section* s = section(arc.a, arc.b);
            const std::string loc = where(arc.a, arc.b, arc.track);
            if (!s) {
                flag("track-order", loc, "no such section");
                continue;
            }
            if (arc.track < 1 || arc.track > track_limit(*s)) flag("track-order", loc, "track exceeds the limit");
            const auto [a, b] = canonical(arc.a, arc.b);
            if (arc.track >= 2 && !plan_.built_arcs.count({a, b, 1}))
                flag("track-order", loc, "track 1 is not built");
            if (arc.track >= 3 && !plan_.built_arcs.count({a, b, 2}))
                flag("track-order", loc, "track 2 is not built");
        }
        for (const auto& link : plan_.built_links) {
            const std::string loc = link.from + "-" + link.at + "-" + link.to;
            auto at = spec_.node_index(link.at);
            auto f = spec_.node_index(link.from);
            auto t = spec_.node_index(link.to);
            if (!at || !f || !t || !spec_.link_index(*at, *f, *t)) flag("link", loc, "no such candidate link");
        }
        for (const auto& [ends, red] : plan_.reductions) {
            const Section* s = section(ends.first, ends.second);
            const std::string loc = ends.first + "-" + ends.second;
            if (!s) {
                flag("reduction-cap", loc, "no such section");
                continue;
            }
            if (red.time_minutes < 0 || red.time_minutes > time_reduction_cap(*s, config_))
                flag("reduction-cap", loc, "travel-time reduction " + std::to_string(red.time_minutes));
            if (red.headway_minutes < 0 || red.headway_minutes > headway_reduction_cap(*s, config_))
                flag("reduction-cap", loc, "headway reduction " + std::to_string(red.headway_minutes));
        }
    }

    void check_train(const Scenario& sc, const Train& train) {
        const TrainKey key{sc.id, train.id};
        auto it = plan_.routes.find(key);
        if (it == plan_.routes.end() || it->second.empty()) {
            flag("path", where(key), "active train has no route");
            return;
        }
        const auto& legs = it->second;
        const std::string loc = where(key);
        // Route shape.
        if (legs.front().from != train.origin) flag("path", loc, "route does not start at the origin");
        if (legs.back().to != train.destination) flag("path", loc, "route does not end at the destination");
        std::set<NodeId> seen{legs.front().from};
        for (std::size_t i = 0; i < legs.size(); ++i) {
            const auto& leg = legs[i];
            if (i > 0 && legs[i - 1].to != leg.from) flag("path", loc, "legs do not form a chain");
            if (!seen.insert(leg.to).second) flag("path", loc, "route revisits " + leg.to);
        }
        for (const auto& via : train.via_nodes)
            if (!seen.count(via)) flag("path", loc, "via node " + via + " not visited");

        for (std::size_t i = 0; i < legs.size(); ++i) {
            const auto& leg = legs[i];
            const std::string leg_loc = loc + " " + where(leg.from, leg.to, leg.track);
            const Section* s = section(leg.from, leg.to);
            if (!s) {
                flag("path", leg_loc, "no such section");
                continue;
            }
            const auto [a, b] = canonical(leg.from, leg.to);
            if (!plan_.built_arcs.count({a, b, leg.track})) flag("path", leg_loc, "arc is not built");
            if (leg.track < 1 || leg.track > track_limit(*s)) flag("track-order", leg_loc, "track exceeds the limit");
            if (config_.track_rules && !track_permitted(leg.from, leg.to, leg.track))
                flag("track-order", leg_loc, "track not permitted in this direction");
            const auto t = s->travel_time(train.train_type);
            if (!t) {
                flag("path", leg_loc, "section not traversable by " + train.train_type);
                continue;
            }
            const Minutes expected = *t - reduction(leg.from, leg.to).time_minutes;
            if (leg.arrival - leg.departure != expected)
                flag("travel-time", leg_loc,
                     "runs " + std::to_string(leg.arrival - leg.departure) + " min, expected " +
                         std::to_string(expected));
            if (leg.departure < 0 || leg.arrival > config_.planning_horizon_end_minutes)
                flag("time-bounds", leg_loc, "outside the planning horizon");
        }
        for (std::size_t i = 1; i < legs.size(); ++i) {
            const auto& in = legs[i - 1];
            const auto& out = legs[i];
            if (in.to != out.from) continue;
            const std::string node_loc = loc + " at " + out.from;
            auto at = spec_.node_index(out.from);
            auto f = spec_.node_index(in.from);
            auto t = spec_.node_index(out.to);
            if (at && f && t) {
                auto [lf, lt] = canonical(in.from, out.to);
                if (!spec_.link_index(*at, *f, *t))
                    flag("link", node_loc, "no candidate link " + in.from + "-" + out.from + "-" + out.to);
                else if (!plan_.built_links.count({out.from, lf, lt}))
                    flag("link", node_loc, "link " + in.from + "-" + out.from + "-" + out.to + " is not built");
                const Minutes stop = out.departure - in.arrival;
                if (stop < 0) flag("node-timing", node_loc, "departs before it arrives");
                if (stop > spec_.nodes()[*at].max_stop_minutes)
                    flag("max-stop", node_loc, "stops " + std::to_string(stop) + " min");
            }
        }
        if (legs.front().departure < train.earliest_departure_minutes)
            flag("time-bounds", loc, "departs before the earliest departure");
        if (legs.back().arrival > train.latest_arrival_minutes)
            flag("time-bounds", loc, "arrives after the latest arrival");
    }

    /// Event time at a node: 0 when the train has no such event there.
    Minutes event(const TrainKey& key, const NodeId& node, bool arrival) const {
        auto it = plan_.routes.find(key);
        if (it == plan_.routes.end()) return 0;
        for (const auto& leg : it->second) {
            if (arrival && leg.to == node) return leg.arrival;
            if (!arrival && leg.from == node) return leg.departure;
        }
        return 0;
    }

    void check_relations(const Scenario& sc) {
        for (const auto& rel : sc.relations) {
            const TrainKey k1{sc.id, rel.first_train};
            const TrainKey k2{sc.id, rel.second_train};
            Minutes gap = 0;
            std::string rule = "frequency";
            switch (rel.kind) {
                case RelationKind::ArrivalFrequency:
                    gap = event(k2, rel.at_node, true) - event(k1, rel.at_node, true);
                    break;
                case RelationKind::DepartureFrequency:
                    gap = event(k2, rel.at_node, false) - event(k1, rel.at_node, false);
                    break;
                case RelationKind::Transfer:
                    gap = event(k2, rel.at_node, false) - event(k1, rel.at_node, true);
                    rule = "transfer";
                    break;
            }
            if (gap < rel.min_minutes || gap > rel.max_minutes)
                flag(rule, sc.id + "/" + rel.first_train + "->" + rel.second_train + " at " + rel.at_node,
                     "gap " + std::to_string(gap) + " outside [" + std::to_string(rel.min_minutes) + "," +
                         std::to_string(rel.max_minutes) + "]");
        }
    }

    struct Traversal {
        TrainKey key;
        TrainType type;
        RouteLeg leg;
    };

    void check_headways() {
        std::vector<Traversal> all;
        for (const auto& sc : family_.scenarios) {
            if (!plan_.active_scenarios.count(sc.id)) continue;
            for (const auto& t : sc.trains) {
                const TrainKey key{sc.id, t.id};
                if (!plan_.active_trains.count(key)) continue;
                auto it = plan_.routes.find(key);
                if (it == plan_.routes.end()) continue;
                for (const auto& leg : it->second) all.push_back({key, t.train_type, leg});
            }
        }
        for (std::size_t i = 0; i < all.size(); ++i)
            for (std::size_t j = i + 1; j < all.size(); ++j) {
                const auto& p = all[i];
                const auto& q = all[j];
                if (p.key == q.key || p.leg.track != q.leg.track) continue;
                if (p.key.scenario != q.key.scenario && !config_.cross_scenario_headways) continue;
                if (canonical(p.leg.from, p.leg.to) != canonical(q.leg.from, q.leg.to)) continue;
                const Section* s = section(p.leg.from, p.leg.to);
                if (!s) continue;
                const auto [a, b] = canonical(p.leg.from, p.leg.to);
                const std::string loc = where(a, b, p.leg.track) + " " + where(p.key) + " & " + where(q.key);
                if (p.leg.from == q.leg.from) {
                    const Minutes r = reduction(a, b).headway_minutes;
                    const auto hpq = s->headway(p.type, q.type);
                    const auto hqp = s->headway(q.type, p.type);
                    const bool p_first = hpq && q.leg.departure - p.leg.departure >= *hpq - r;
                    const bool q_first = hqp && p.leg.departure - q.leg.departure >= *hqp - r;
                    if (!p_first && !q_first)
                        flag("headway-following", loc,
                             "departures " + std::to_string(p.leg.departure) + " and " +
                                 std::to_string(q.leg.departure));
                } else {
                    auto cross = [&](const NodeId& n) { return spec_.nodes()[*spec_.node_index(n)].crossing_time_minutes; };
                    const bool p_first = q.leg.departure >= p.leg.arrival + cross(p.leg.to);
                    const bool q_first = p.leg.departure >= q.leg.arrival + cross(q.leg.to);
                    if (!p_first && !q_first) {
                        flag("headway-crossing", loc, "insufficient crossing separation");
                        if (p.leg.departure < q.leg.arrival && q.leg.departure < p.leg.arrival)
                            flag("conflict", loc, "opposing trains meet on one track");
                    }
                }
            }
    }

    const PlanSolution& plan_;
    const TimetableFamily& family_;
    const InfrastructureSpec& spec_;
    const BuildConfig& config_;
    ValidationReport report_;
};

}  // namespace

ValidationReport check_plan(const PlanSolution& plan, const TimetableFamily& family, const InfrastructureSpec& spec,
                            const BuildConfig& config) {
    return Checker(plan, family, spec, config).run();
}

double infrastructure_cost(const PlanSolution& plan, const InfrastructureSpec& spec) {
    double cost = 0.0;
    for (const auto& arc : plan.built_arcs) {
        auto a = spec.node_index(arc.a);
        auto b = spec.node_index(arc.b);
        if (!a || !b) continue;
        if (auto s = spec.section_index(*a, *b)) cost += spec.sections()[*s].cost_of_track(arc.track);
    }
    for (const auto& link : plan.built_links) {
        auto at = spec.node_index(link.at);
        auto f = spec.node_index(link.from);
        auto t = spec.node_index(link.to);
        if (!at || !f || !t) continue;
        if (auto l = spec.link_index(*at, *f, *t)) cost += spec.links()[*l].cost;
    }
    for (const auto& [ends, red] : plan.reductions) {
        auto a = spec.node_index(ends.first);
        auto b = spec.node_index(ends.second);
        if (!a || !b) continue;
        if (auto s = spec.section_index(*a, *b)) {
            const Section& sec = spec.sections()[*s];
            cost += sec.time_reduction_cost_per_minute * red.time_minutes +
                    sec.headway_reduction_cost_per_minute * red.headway_minutes;
        }
    }
    return cost;
}

double recompute_cost(const PlanSolution& plan, const InfrastructureSpec& spec, const TimetableFamily* penalties) {
    double cost = infrastructure_cost(plan, spec);
    if (penalties) {
        for (const auto& sc : penalties->scenarios) {
            const bool active = plan.active_scenarios.count(sc.id) > 0;
            if (!active) cost += sc.penalty;
            for (const auto& t : sc.trains)
                if (!active || !plan.active_trains.count({sc.id, t.id})) cost += t.penalty;
        }
    }
    return cost;
}

}  // namespace railnet
