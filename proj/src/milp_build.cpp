#include <algorithm>
#include <cmath>
#include <map>

#include "railnet/milp.hpp"

namespace railnet {

Minutes compute_big_m(const TimetableFamily& family, const InfrastructureSpec& spec, const BuildConfig&) {
    Minutes latest = 0;
    for (const auto& sc : family.scenarios)
        for (const auto& t : sc.trains) latest = std::max(latest, t.latest_arrival_minutes);
    return latest + max_separation(spec) + 1;
}

std::array<LinearConstraint, 3> linearize_product(const std::vector<LinearTerm>& target,
                                                  const std::vector<LinearTerm>& f1,
                                                  const std::vector<LinearTerm>& f2) {
    auto minus = [](std::vector<LinearTerm> terms) {
        for (auto& t : terms) t.coefficient = -t.coefficient;
        return terms;
    };
    auto join = [](std::vector<LinearTerm> a, const std::vector<LinearTerm>& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };
    return {LinearConstraint{"", "linearization", join(join(target, minus(f1)), minus(f2)),
                             ConstraintSense::GreaterEqual, -1.0},
            LinearConstraint{"", "linearization", join(target, minus(f1)), ConstraintSense::LessEqual, 0.0},
            LinearConstraint{"", "linearization", join(target, minus(f2)), ConstraintSense::LessEqual, 0.0}};
}

namespace {

using Terms = std::vector<LinearTerm>;
constexpr auto LE = ConstraintSense::LessEqual;
constexpr auto GE = ConstraintSense::GreaterEqual;
constexpr auto EQ = ConstraintSense::Equal;

class ModelBuilder {
public:
    ModelBuilder(std::vector<const Scenario*> scenarios, const RelevantSets& sets, const HeadwaySets& headways,
                 const InfrastructureSpec& spec, const BuildConfig& config, bool robust, Minutes big_m)
        : scenarios_(std::move(scenarios)), sets_(sets), hw_(headways), spec_(spec), config_(config),
          robust_(robust), big_m_(big_m) {}

    MilpModel build(double coverage_share) {
        model_.big_m = big_m_;
        index_trains();
        if (robust_) add_activation_variables();
        add_infrastructure_variables();
        add_routing_variables();
        add_sequencing_variables();
        add_timing_variables();

        if (robust_) add_robust_activation_constraints(coverage_share);
        add_path_constraints();
        add_track_order_constraints();
        add_timing_constraints();
        add_reduction_constraints();
        add_relation_constraints();
        add_following_constraints();
        add_crossing_constraints();
        return std::move(model_);
    }

private:
    const Train& train(int k) const {
        const auto& ref = sets_.trains[k];
        return scenarios_[ref.scenario]->trains[ref.train];
    }
    const std::string& node(int i) const { return spec_.nodes()[i].id; }
    std::string arc_args(int from, int to, int track) const {
        return node(from) + "," + node(to) + "," + std::to_string(track);
    }
    void add(const std::string& tag, Terms terms, ConstraintSense sense, double rhs) {
        model_.add_constraint(tag, std::move(terms), sense, rhs);
    }
    void add_all(const std::array<LinearConstraint, 3>& cs) {
        for (const auto& c : cs) add(c.tag, c.terms, c.sense, c.rhs);
    }
    int x_index(int train, int section, int from, int to, int track) const {
        return sets_.find_x({train, section, from, to, track});
    }
    Terms arrivals_at(int k, int node) const {
        Terms t;
        for (int xi : x_of_train_[k])
            if (sets_.x[xi].to == node) t.push_back({a_[xi], 1.0});
        return t;
    }
    Terms departures_at(int k, int node) const {
        Terms t;
        for (int xi : x_of_train_[k])
            if (sets_.x[xi].from == node) t.push_back({d_[xi], 1.0});
        return t;
    }
    static Terms scaled(Terms terms, double factor) {
        for (auto& t : terms) t.coefficient *= factor;
        return terms;
    }
    static Terms concat(Terms a, const Terms& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    }

    void index_trains() {
        x_of_train_.assign(sets_.trains.size(), {});
        for (int xi = 0; xi < static_cast<int>(sets_.x.size()); ++xi) x_of_train_[sets_.x[xi].train].push_back(xi);
        for (int k = 0; k < static_cast<int>(sets_.trains.size()); ++k) {
            const auto& ref = sets_.trains[k];
            if (ref.scenario < 0 || ref.scenario >= static_cast<int>(scenarios_.size()) || ref.train < 0 ||
                ref.train >= static_cast<int>(scenarios_[ref.scenario]->trains.size()))
                throw BuildError("relevant sets do not match the scenarios being built");
            train_index_[{ref.scenario, scenarios_[ref.scenario]->trains[ref.train].id}] = k;
        }
        for (int s = 0; s < static_cast<int>(scenarios_.size()); ++s)
            for (const auto& t : scenarios_[s]->trains)
                if (!train_index_.count({s, t.id})) throw BuildError("train " + t.id + " missing from relevant sets");
    }

    void add_activation_variables() {
        for (const Scenario* sc : scenarios_) {
            o_szo_.push_back(model_.add_variable("o_szo(" + sc->id + ")", VariableDomain::Binary, 0, 1, -sc->penalty));
            model_.objective_offset += sc->penalty;
        }
        for (int k = 0; k < static_cast<int>(sets_.trains.size()); ++k) {
            const double penalty = train(k).penalty;
            o_train_.push_back(model_.add_variable("o_train(" + sets_.trains[k].name + ")", VariableDomain::Binary, 0,
                                                   1, -penalty));
            model_.objective_offset += penalty;
        }
        for (int k = 0; k < static_cast<int>(sets_.trains.size()); ++k)
            run_.push_back(model_.add_variable("run(" + sets_.trains[k].name + ")", VariableDomain::Binary, 0, 1));
    }

    void add_infrastructure_variables() {
        for (const ArcRef& arc : sets_.arcs) {
            const Section& s = spec_.sections()[arc.section];
            y_[arc] = model_.add_variable("y(" + s.a + "," + s.b + "," + std::to_string(arc.track) + ")",
                                          VariableDomain::Binary, 0, 1, s.cost_of_track(arc.track));
        }
        for (int link : sets_.links) {
            const NodeLink& l = spec_.links()[link];
            l_[link] = model_.add_variable("l(" + l.at + "," + l.from + "," + l.to + ")", VariableDomain::Binary, 0,
                                           1, l.cost);
        }
    }

    void add_routing_variables() {
        p_.resize(sets_.trains.size());
        for (int k = 0; k < static_cast<int>(sets_.trains.size()); ++k)
            for (int pi = 0; pi < static_cast<int>(sets_.paths[k].size()); ++pi)
                p_[k].push_back(model_.add_variable("p(" + sets_.trains[k].name + "," + std::to_string(pi) + ")",
                                                    VariableDomain::Binary, 0, 1));
        for (const TrainArc& e : sets_.x)
            x_.push_back(model_.add_variable(
                "x(" + sets_.trains[e.train].name + "," + arc_args(e.from, e.to, e.track) + ")",
                VariableDomain::Binary, 0, 1));
    }

    std::string tuple_args(const HeadwayTuple& t) const {
        return arc_args(t.from, t.to, t.track) + "," + sets_.trains[t.first].name + "," +
               sets_.trains[t.second].name;
    }

    void add_sequencing_variables() {
        for (const auto& t : hw_.enforce_following)
            z_hf_[t] = model_.add_variable("z_hf(" + tuple_args(t) + ")", VariableDomain::Binary, 0, 1);
        for (const auto& t : hw_.enforce_crossing)
            z_hc_[t] = model_.add_variable("z_hc(" + tuple_args(t) + ")", VariableDomain::Binary, 0, 1);
    }

    void add_timing_variables() {
        const double horizon = config_.planning_horizon_end_minutes;
        for (const TrainArc& e : sets_.x) {
            const std::string args = sets_.trains[e.train].name + "," + arc_args(e.from, e.to, e.track) + ")";
            d_.push_back(model_.add_variable("d(" + args, VariableDomain::Integer, 0, horizon));
            a_.push_back(model_.add_variable("a(" + args, VariableDomain::Integer, 0, horizon));
        }
        for (int s : sets_.sections) {
            const Section& sec = spec_.sections()[s];
            const Minutes time_cap = time_reduction_cap(sec, config_);
            const Minutes mht_cap = headway_reduction_cap(sec, config_);
            const int na = spec_.section_node_a(s);
            const int nb = spec_.section_node_b(s);
            r_time_[{na, nb}] = model_.add_variable("r_time(" + sec.a + "," + sec.b + ")", VariableDomain::Integer,
                                                    0, time_cap, sec.time_reduction_cost_per_minute);
            r_time_[{nb, na}] =
                model_.add_variable("r_time(" + sec.b + "," + sec.a + ")", VariableDomain::Integer, 0, time_cap);
            r_mht_[{na, nb}] = model_.add_variable("r_mht(" + sec.a + "," + sec.b + ")", VariableDomain::Integer, 0,
                                                   mht_cap, sec.headway_reduction_cost_per_minute);
            r_mht_[{nb, na}] =
                model_.add_variable("r_mht(" + sec.b + "," + sec.a + ")", VariableDomain::Integer, 0, mht_cap);
        }
    }

    void add_robust_activation_constraints(double coverage_share) {
        const int n = static_cast<int>(scenarios_.size());
        TimetableFamily probe;
        probe.coverage_share = coverage_share;
        probe.scenarios.resize(n);
        const int required = probe.required_active_scenarios();
        if (required > n) throw BuildError("coverage share requires more scenarios than the family holds");
        Terms cover;
        for (int v : o_szo_) cover.push_back({v, 1.0});
        add("eq30", cover, GE, required);

        for (int k = 0; k < static_cast<int>(sets_.trains.size()); ++k) {
            const int s = sets_.trains[k].scenario;
            add_all(linearize_product({{run_[k], 1.0}}, {{o_train_[k], 1.0}}, {{o_szo_[s], 1.0}}));
            const Scenario& sc = *scenarios_[s];
            if (sc.must_run(train(k)))
                add("eq32", {{o_train_[k], 1.0}, {o_szo_[s], -1.0}}, EQ, 0.0);
            else
                add("eq32", {{o_train_[k], 1.0}, {o_szo_[s], -1.0}}, LE, 0.0);
        }
        for (int s = 0; s < n; ++s) {
            const Scenario& sc = *scenarios_[s];
            Terms count;
            for (int k = 0; k < static_cast<int>(sets_.trains.size()); ++k)
                if (sets_.trains[k].scenario == s) count.push_back({o_train_[k], 1.0});
            count.push_back({o_szo_[s], -static_cast<double>(sc.mandatory_count() + sc.demanded_optional_count)});
            add("eq33", count, GE, 0.0);
        }
    }

    void add_path_constraints() {
        const double n = static_cast<double>(sets_.trains.size());
        for (int k = 0; k < static_cast<int>(sets_.trains.size()); ++k) {
            Terms paths;
            for (int v : p_[k]) paths.push_back({v, 1.0});
            if (robust_) {
                paths.push_back({run_[k], -1.0});
                add("eq31", paths, EQ, 0.0);
            } else {
                add("eq2", paths, EQ, 1.0);
            }
        }
        for (int link : sets_.links) {
            Terms terms;
            for (int k = 0; k < static_cast<int>(sets_.trains.size()); ++k)
                for (int pi = 0; pi < static_cast<int>(sets_.paths[k].size()); ++pi)
                    if (sets_.paths[k][pi].uses_link(link)) terms.push_back({p_[k][pi], 1.0});
            terms.push_back({l_.at(link), -n});
            add("eq3", terms, LE, 0.0);
            if (config_.tight_linking)
                for (std::size_t q = 0; q + 1 < terms.size(); ++q)
                    add("linking", {terms[q], {l_.at(link), -1.0}}, LE, 0.0);
        }
        for (int k = 0; k < static_cast<int>(sets_.trains.size()); ++k) {
            std::set<PathStep> steps;
            for (const Path& p : sets_.paths[k]) steps.insert(p.steps.begin(), p.steps.end());
            for (const PathStep& step : steps) {
                Terms terms;
                for (int pi = 0; pi < static_cast<int>(sets_.paths[k].size()); ++pi)
                    if (sets_.paths[k][pi].uses_step(step.from, step.to)) terms.push_back({p_[k][pi], 1.0});
                for (int xi : x_of_train_[k])
                    if (sets_.x[xi].from == step.from && sets_.x[xi].to == step.to) terms.push_back({x_[xi], -1.0});
                add("eq4", terms, EQ, 0.0);
            }
        }
        std::map<ArcRef, Terms> usage;
        for (int xi = 0; xi < static_cast<int>(sets_.x.size()); ++xi)
            usage[{sets_.x[xi].section, sets_.x[xi].track}].push_back({x_[xi], 1.0});
        for (const ArcRef& arc : sets_.arcs) {
            Terms terms = usage[arc];
            terms.push_back({y_.at(arc), -n});
            add("eq5", terms, LE, 0.0);
            if (config_.tight_linking)
                for (const auto& t : usage[arc]) add("linking", {t, {y_.at(arc), -1.0}}, LE, 0.0);
        }
    }

    void add_track_order_constraints() {
        for (const ArcRef& arc : sets_.arcs) {
            if (arc.track == 2)
                add("eq6", {{y_.at(arc), 1.0}, {y_.at({arc.section, 1}), -1.0}}, LE, 0.0);
            else if (arc.track > 2)
                add("eq7", {{y_.at(arc), 1.0}, {y_.at({arc.section, 2}), -1.0}}, LE, 0.0);
        }
    }

    void add_timing_constraints() {
        const double m = big_m_;
        for (int xi = 0; xi < static_cast<int>(sets_.x.size()); ++xi) {
            const TrainArc& e = sets_.x[xi];
            const double t = *spec_.sections()[e.section].travel_time(train(e.train).train_type);
            const int r = r_time_.at({e.from, e.to});
            const double mt = std::max(m, t);
            add("eq8", {{a_[xi], 1.0}, {d_[xi], -1.0}, {r, 1.0}, {x_[xi], -mt}}, GE, t - mt);
            add("eq8", {{a_[xi], 1.0}, {d_[xi], -1.0}, {r, 1.0}, {x_[xi], mt}}, LE, t + mt);
        }
        for (int xi = 0; xi < static_cast<int>(sets_.x.size()); ++xi)
            add("eq9", {{d_[xi], 1.0}, {a_[xi], 1.0}, {x_[xi], -2.0 * m}}, LE, 0.0);

        for (int k = 0; k < static_cast<int>(sets_.trains.size()); ++k) {
            const Train& t = train(k);
            const int o = spec_.require_node(t.origin);
            const int e = spec_.require_node(t.destination);
            Terms dep = departures_at(k, o);
            if (robust_) {
                dep.push_back({run_[k], -static_cast<double>(t.earliest_departure_minutes)});
                add("eq10", dep, GE, 0.0);
            } else {
                add("eq10", dep, GE, t.earliest_departure_minutes);
            }
            add("eq11", arrivals_at(k, e), LE, t.latest_arrival_minutes);
        }
        for (int k = 0; k < static_cast<int>(sets_.trains.size()); ++k) {
            std::set<int> interior;
            for (const Path& p : sets_.paths[k])
                for (std::size_t i = 1; i + 1 < p.nodes.size(); ++i) interior.insert(p.nodes[i]);
            for (int i : interior) {
                const Terms arr = arrivals_at(k, i);
                const Terms dep = departures_at(k, i);
                add("eq12", concat(arr, scaled(dep, -1.0)), LE, 0.0);
                add("eq13", concat(dep, scaled(arr, -1.0)), LE, spec_.nodes()[i].max_stop_minutes);
            }
        }
    }

    void add_reduction_constraints() {
        if (!config_.reductions_allowed) return;
        for (int s : sets_.sections) {
            const int na = spec_.section_node_a(s);
            const int nb = spec_.section_node_b(s);
            add("eq14", {{r_time_.at({na, nb}), 1.0}, {r_time_.at({nb, na}), -1.0}}, EQ, 0.0);
            add("eq15", {{r_mht_.at({na, nb}), 1.0}, {r_mht_.at({nb, na}), -1.0}}, EQ, 0.0);
        }
    }

    void add_relation_constraints() {
        for (int s = 0; s < static_cast<int>(scenarios_.size()); ++s) {
            const Scenario& sc = *scenarios_[s];
            for (const TimingRelation& rel : sc.relations) {
                const auto k1 = train_index_.find({s, rel.first_train});
                const auto k2 = train_index_.find({s, rel.second_train});
                if (k1 == train_index_.end() || k2 == train_index_.end())
                    throw BuildError("relation references unknown train in scenario " + sc.id);
                const int i = spec_.require_node(rel.at_node);
                Terms diff;
                int tag_base = 16;
                switch (rel.kind) {
                    case RelationKind::ArrivalFrequency:
                        diff = concat(arrivals_at(k2->second, i), scaled(arrivals_at(k1->second, i), -1.0));
                        tag_base = 16;
                        break;
                    case RelationKind::DepartureFrequency:
                        diff = concat(departures_at(k2->second, i), scaled(departures_at(k1->second, i), -1.0));
                        tag_base = 18;
                        break;
                    case RelationKind::Transfer:
                        diff = concat(departures_at(k2->second, i), scaled(arrivals_at(k1->second, i), -1.0));
                        tag_base = 20;
                        break;
                }
                if (robust_) {
                    const int tag = tag_base + 18;
                    add("eq" + std::to_string(tag), concat(diff, {{o_szo_[s], -double(rel.min_minutes)}}), GE, 0.0);
                    add("eq" + std::to_string(tag + 1), concat(diff, {{o_szo_[s], -double(rel.max_minutes)}}), LE,
                        0.0);
                } else {
                    add("eq" + std::to_string(tag_base), diff, GE, rel.min_minutes);
                    add("eq" + std::to_string(tag_base + 1), diff, LE, rel.max_minutes);
                }
            }
        }
    }

    int x_of(int train, const HeadwayTuple& t, bool reversed) const {
        const int xi = reversed ? x_index(train, t.section, t.to, t.from, t.track)
                                : x_index(train, t.section, t.from, t.to, t.track);
        if (xi < 0) throw BuildError("headway tuple references a train-arc pair outside X");
        return xi;
    }

    void add_following_constraints() {
        const double m = big_m_;
        for (const auto& t : hw_.fixed_following)
            add("eq22",
                {{z_hf_.at(t), 1.0}, {x_[x_of(t.first, t, false)], -1.0}, {x_[x_of(t.second, t, false)], -1.0}}, GE,
                -1.0);
        for (const auto& t : hw_.free_following) {
            const HeadwayTuple back{t.section, t.from, t.to, t.track, t.second, t.first};
            auto cs = linearize_product({{z_hf_.at(t), 1.0}, {z_hf_.at(back), 1.0}},
                                        {{x_[x_of(t.first, t, false)], 1.0}}, {{x_[x_of(t.second, t, false)], 1.0}});
            for (auto& c : cs) c.tag = "eq23";
            add_all(cs);
        }
        for (const auto& t : hw_.enforce_following) {
            const Section& s = spec_.sections()[t.section];
            const double h = *s.headway(train(t.first).train_type, train(t.second).train_type);
            const int d1 = d_[x_of(t.first, t, false)];
            const int d2 = d_[x_of(t.second, t, false)];
            add("eq24", {{d2, 1.0}, {d1, -1.0}, {r_mht_.at({t.from, t.to}), 1.0}, {z_hf_.at(t), -m}}, GE, h - m);
        }
    }

    void add_crossing_constraints() {
        const double m = big_m_;
        for (const auto& t : hw_.conflicts)
            add("eq25", {{x_[x_of(t.first, t, false)], 1.0}, {x_[x_of(t.second, t, true)], 1.0}}, LE, 1.0);
        for (const auto& t : hw_.fixed_crossing)
            add("eq26",
                {{z_hc_.at(t), 1.0}, {x_[x_of(t.first, t, false)], -1.0}, {x_[x_of(t.second, t, true)], -1.0}}, GE,
                -1.0);
        for (const auto& t : hw_.free_crossing) {
            const HeadwayTuple back{t.section, t.to, t.from, t.track, t.second, t.first};
            auto cs = linearize_product({{z_hc_.at(t), 1.0}, {z_hc_.at(back), 1.0}},
                                        {{x_[x_of(t.first, t, false)], 1.0}}, {{x_[x_of(t.second, t, true)], 1.0}});
            for (auto& c : cs) c.tag = "eq27";
            add_all(cs);
        }
        for (const auto& t : hw_.enforce_crossing) {
            const double cross = spec_.nodes()[t.to].crossing_time_minutes;
            const int a1 = a_[x_of(t.first, t, false)];
            const int d2 = d_[x_of(t.second, t, true)];
            add("eq28", {{d2, 1.0}, {a1, -1.0}, {z_hc_.at(t), -m}}, GE, cross - m);
        }
    }

    std::vector<const Scenario*> scenarios_;
    const RelevantSets& sets_;
    const HeadwaySets& hw_;
    const InfrastructureSpec& spec_;
    const BuildConfig& config_;
    bool robust_;
    Minutes big_m_;
    MilpModel model_;

    std::map<std::pair<int, std::string>, int> train_index_;
    std::vector<std::vector<int>> x_of_train_;
    std::vector<int> o_szo_, o_train_, run_;
    std::map<ArcRef, int> y_;
    std::map<int, int> l_;
    std::vector<std::vector<int>> p_;
    std::vector<int> x_, d_, a_;
    std::map<std::pair<int, int>, int> r_time_, r_mht_;
    std::map<HeadwayTuple, int> z_hf_, z_hc_;
};

}  // namespace

MilpModel build_deterministic(const Scenario& scenario, const RelevantSets& sets, const HeadwaySets& headways,
                              const InfrastructureSpec& spec, const BuildConfig& config) {
    TimetableFamily family;
    family.scenarios.push_back(scenario);
    if (sets.trains.size() != scenario.trains.size())
        throw BuildError("relevant sets were not built for this scenario");
    return ModelBuilder({&scenario}, sets, headways, spec, config, false, compute_big_m(family, spec, config))
        .build(1.0);
}

MilpModel build_robust(const TimetableFamily& family, const RelevantSets& sets, const HeadwaySets& headways,
                       const InfrastructureSpec& spec, const BuildConfig& config) {
    if (family.scenarios.empty()) throw BuildError("robust model needs at least one scenario");
    std::vector<const Scenario*> scenarios;
    for (const auto& sc : family.scenarios) scenarios.push_back(&sc);
    return ModelBuilder(std::move(scenarios), sets, headways, spec, config, true, compute_big_m(family, spec, config))
        .build(family.coverage_share);
}

}  // namespace railnet
