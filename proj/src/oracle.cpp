#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "railnet/validate.hpp"

namespace railnet {

namespace {

constexpr Minutes kInfDist = std::numeric_limits<Minutes>::max() / 4;

struct Leg {
    int section = -1;
    int from = -1;
    int to = -1;
    int track = 1;
    Minutes travel = 0;
};

struct RouteOption {
    std::vector<int> nodes;
    std::vector<Leg> legs;
    std::vector<int> links;
    double standalone_cost = 0.0;
};

struct ActiveTrain {
    int scenario = -1;
    const Train* train = nullptr;
    TrainKey key;
    const std::vector<RouteOption>* options = nullptr;
};

/// x_v - x_u <= w.
struct Edge {
    int u;
    int v;
    Minutes w;
};

struct Disjunction {
    Edge first;
    Edge second;
};

/// Simple temporal network with disjunctive constraints, solved by
/// Floyd-Warshall plus depth-first choice of disjuncts.
class TemporalNetwork {
public:
    explicit TemporalNetwork(int points) : n_(points), dist_(static_cast<std::size_t>(points) * points, kInfDist) {
        for (int i = 0; i < n_; ++i) d(i, i) = 0;
    }

    void add(const Edge& e) {
        Minutes& cur = d(e.u, e.v);
        cur = std::min(cur, e.w);
    }
    void add_disjunction(const Disjunction& dj) { disjunctions_.push_back(dj); }

    /// Earliest consistent times (point 0 is the time origin), or nullopt.
    std::optional<std::vector<Minutes>> solve() {
        for (int k = 0; k < n_; ++k)
            for (int i = 0; i < n_; ++i) {
                const Minutes ik = d(i, k);
                if (ik >= kInfDist) continue;
                for (int j = 0; j < n_; ++j) {
                    const Minutes kj = d(k, j);
                    if (kj >= kInfDist) continue;
                    if (ik + kj < d(i, j)) d(i, j) = ik + kj;
                }
            }
        for (int i = 0; i < n_; ++i)
            if (d(i, i) < 0) return std::nullopt;
        if (!search(dist_)) return std::nullopt;
        std::vector<Minutes> times(n_);
        for (int p = 0; p < n_; ++p) times[p] = -solution_[static_cast<std::size_t>(p) * n_];
        return times;
    }

private:
    Minutes& d(int i, int j) { return dist_[static_cast<std::size_t>(i) * n_ + j]; }

    bool implied(const std::vector<Minutes>& m, const Edge& e) const {
        return m[static_cast<std::size_t>(e.u) * n_ + e.v] <= e.w;
    }
    bool admissible(const std::vector<Minutes>& m, const Edge& e) const {
        const Minutes back = m[static_cast<std::size_t>(e.v) * n_ + e.u];
        return back >= kInfDist || back + e.w >= 0;
    }
    void tighten(std::vector<Minutes>& m, const Edge& e) const {
        std::vector<Minutes> to_u(n_), from_v(n_);
        for (int i = 0; i < n_; ++i) to_u[i] = m[static_cast<std::size_t>(i) * n_ + e.u];
        for (int j = 0; j < n_; ++j) from_v[j] = m[static_cast<std::size_t>(e.v) * n_ + j];
        for (int i = 0; i < n_; ++i) {
            if (to_u[i] >= kInfDist) continue;
            Minutes* row = &m[static_cast<std::size_t>(i) * n_];
            for (int j = 0; j < n_; ++j) {
                if (from_v[j] >= kInfDist) continue;
                const Minutes cand = to_u[i] + e.w + from_v[j];
                if (cand < row[j]) row[j] = cand;
            }
        }
    }

    bool search(std::vector<Minutes> m) {
        while (true) {
            int branch = -1;
            bool progress = false;
            for (int k = 0; k < static_cast<int>(disjunctions_.size()); ++k) {
                const auto& dj = disjunctions_[k];
                if (implied(m, dj.first) || implied(m, dj.second)) continue;
                const bool a = admissible(m, dj.first);
                const bool b = admissible(m, dj.second);
                if (!a && !b) return false;
                if (a != b) {
                    tighten(m, a ? dj.first : dj.second);
                    progress = true;
                    continue;
                }
                if (branch < 0) branch = k;
            }
            if (progress) continue;
            if (branch < 0) {
                solution_ = std::move(m);
                return true;
            }
            std::vector<Minutes> alt = m;
            tighten(m, disjunctions_[branch].first);
            if (search(std::move(m))) return true;
            tighten(alt, disjunctions_[branch].second);
            return search(std::move(alt));
        }
    }

    int n_;
    std::vector<Minutes> dist_;
    std::vector<Disjunction> disjunctions_;
    std::vector<Minutes> solution_;
};

bool track_allowed(int from, int to, int track) {
    if (from < to) return track % 2 == 1;
    return track == 1 || track % 2 == 0;
}

class Oracle {
public:
    Oracle(const TimetableFamily& family, const InfrastructureSpec& spec, const BuildConfig& config, bool robust,
           const OracleLimits& limits)
        : family_(family), spec_(spec), config_(config), robust_(robust), limits_(limits) {}

    OracleResult run() {
        start_ = std::chrono::steady_clock::now();
        check_scale();
        options_.resize(family_.scenarios.size());
        for (std::size_t s = 0; s < family_.scenarios.size(); ++s)
            for (const auto& t : family_.scenarios[s].trains) options_[s].push_back(route_options(t));

        for (const auto& activation : activations()) {
            if (timed_out_) break;
            if (best_ && activation.penalty >= *best_ - 1e-9) break;
            search_activation(activation);
        }
        OracleResult out;
        out.feasible = best_.has_value();
        out.timed_out = timed_out_;
        out.leaves = leaves_;
        if (best_) {
            out.cost = *best_;
            out.plan = best_plan_;
        }
        return out;
    }

private:
    struct Activation {
        double penalty = 0.0;
        std::vector<std::pair<int, int>> trains;  // (scenario, train)
        std::set<std::string> scenarios;
    };

    void check_scale() const {
        if (spec_.nodes().size() > 6) throw OracleRefusal("more than 6 nodes");
        if (family_.scenarios.size() > 3) throw OracleRefusal("more than 3 scenarios");
        for (const auto& sc : family_.scenarios)
            if (sc.trains.size() > 6) throw OracleRefusal("more than 6 trains in scenario " + sc.id);
        if (config_.planning_horizon_end_minutes > 120) throw OracleRefusal("planning horizon beyond 120 minutes");
    }

    bool expired() {
        if (timed_out_) return true;
        const std::chrono::duration<double> e = std::chrono::steady_clock::now() - start_;
        if (e.count() > limits_.time_limit_seconds) timed_out_ = true;
        return timed_out_;
    }

    std::vector<RouteOption> route_options(const Train& train) const {
        std::vector<RouteOption> out;
        const int o = spec_.require_node(train.origin);
        const int e = spec_.require_node(train.destination);
        const Minutes budget = train.latest_arrival_minutes - train.earliest_departure_minutes;
        std::vector<int> nodes{o};
        std::vector<char> on_path(spec_.nodes().size(), 0);
        on_path[o] = 1;
        std::vector<std::vector<int>> paths;
        auto dfs = [&](auto&& self, int at, Minutes spent) -> void {
            if (at == e) {
                for (const auto& via : train.via_nodes)
                    if (!on_path[spec_.require_node(via)]) return;
                paths.push_back(nodes);
                return;
            }
            for (const auto& [next, sec] : spec_.neighbors(at)) {
                if (on_path[next]) continue;
                const Section& s = spec_.sections()[sec];
                const auto t = s.travel_time(train.train_type);
                if (!t) continue;
                const Minutes fastest = *t - time_reduction_cap(s, config_);
                if (spent + fastest > budget) continue;
                if (nodes.size() >= 2 && !spec_.link_index(at, nodes[nodes.size() - 2], next)) continue;
                nodes.push_back(next);
                on_path[next] = 1;
                self(self, next, spent + fastest);
                on_path[next] = 0;
                nodes.pop_back();
            }
        };
        dfs(dfs, o, 0);

        for (const auto& p : paths) {
            std::vector<Leg> base;
            std::vector<int> links;
            for (std::size_t i = 0; i + 1 < p.size(); ++i) {
                const int sec = *spec_.section_index(p[i], p[i + 1]);
                base.push_back({sec, p[i], p[i + 1], 1, *spec_.sections()[sec].travel_time(train.train_type)});
                if (i > 0) links.push_back(*spec_.link_index(p[i], p[i - 1], p[i + 1]));
            }
            std::vector<std::vector<int>> tracks;
            for (const auto& leg : base) {
                const Section& s = spec_.sections()[leg.section];
                const int limit = std::min(s.max_tracks, config_.max_tracks_global);
                std::vector<int> allowed;
                for (int tr = 1; tr <= limit; ++tr)
                    if (!config_.track_rules || track_allowed(leg.from, leg.to, tr)) allowed.push_back(tr);
                tracks.push_back(allowed);
            }
            std::vector<std::size_t> pick(base.size(), 0);
            while (true) {
                RouteOption opt;
                opt.nodes = p;
                opt.links = links;
                opt.legs = base;
                for (std::size_t i = 0; i < base.size(); ++i) opt.legs[i].track = tracks[i][pick[i]];
                opt.standalone_cost = standalone_cost(opt);
                out.push_back(std::move(opt));
                std::size_t i = 0;
                while (i < pick.size() && ++pick[i] == tracks[i].size()) pick[i++] = 0;
                if (i == pick.size()) break;
            }
        }
        std::stable_sort(out.begin(), out.end(), [](const RouteOption& a, const RouteOption& b) {
            return a.standalone_cost < b.standalone_cost;
        });
        return out;
    }

    static std::set<int> closure(std::set<int> used) {
        if (used.empty()) return used;
        const int top = *used.rbegin();
        if (top >= 2) used.insert(1);
        if (top >= 3) used.insert(2);
        return used;
    }

    double section_cost(int section, const std::set<int>& used) const {
        double c = 0.0;
        for (int tr : closure(used)) c += spec_.sections()[section].cost_of_track(tr);
        return c;
    }

    double standalone_cost(const RouteOption& opt) const {
        double c = 0.0;
        for (const auto& leg : opt.legs) c += section_cost(leg.section, {leg.track});
        for (int l : opt.links) c += spec_.links()[l].cost;
        return c;
    }

    std::vector<Activation> activations() const {
        std::vector<Activation> out;
        const int n = static_cast<int>(family_.scenarios.size());
        if (!robust_) {
            Activation a;
            for (int s = 0; s < n; ++s) {
                a.scenarios.insert(family_.scenarios[s].id);
                for (int t = 0; t < static_cast<int>(family_.scenarios[s].trains.size()); ++t) a.trains.push_back({s, t});
            }
            out.push_back(a);
            return out;
        }
        const int required = family_.required_active_scenarios();
        for (int mask = 0; mask < (1 << n); ++mask) {
            if (__builtin_popcount(mask) < required) continue;
            bool ok = true;
            for (int s = 0; s < n; ++s) {
                auto f = limits_.forced_scenarios.find(family_.scenarios[s].id);
                if (f != limits_.forced_scenarios.end() && f->second != bool(mask >> s & 1)) ok = false;
            }
            if (!ok) continue;
            // Per active scenario, the admissible optional-train subsets.
            std::vector<std::vector<std::pair<double, std::vector<int>>>> choices(n);
            double base_penalty = 0.0;
            for (int s = 0; s < n; ++s) {
                const Scenario& sc = family_.scenarios[s];
                if (!(mask >> s & 1)) {
                    base_penalty += sc.penalty;
                    for (const auto& t : sc.trains) base_penalty += t.penalty;
                    choices[s].push_back({0.0, {}});
                    continue;
                }
                std::vector<int> free;
                std::vector<int> fixed_on;
                for (int t = 0; t < static_cast<int>(sc.trains.size()); ++t) {
                    const Train& tr = sc.trains[t];
                    auto f = limits_.forced_activity.find({sc.id, tr.id});
                    const bool required_on = sc.must_run(tr);
                    if (f != limits_.forced_activity.end()) {
                        if (!f->second && required_on) {
                            ok = false;
                            break;
                        }
                        if (f->second) fixed_on.push_back(t);
                        continue;
                    }
                    (required_on ? fixed_on : free).push_back(t);
                }
                if (!ok) break;
                for (int sub = 0; sub < (1 << free.size()); ++sub) {
                    std::vector<int> on = fixed_on;
                    double pen = 0.0;
                    for (std::size_t i = 0; i < free.size(); ++i) {
                        if (sub >> i & 1)
                            on.push_back(free[i]);
                        else
                            pen += sc.trains[free[i]].penalty;
                    }
                    for (int t = 0; t < static_cast<int>(sc.trains.size()); ++t) {
                        auto f = limits_.forced_activity.find({sc.id, sc.trains[t].id});
                        if (f != limits_.forced_activity.end() && !f->second) pen += sc.trains[t].penalty;
                    }
                    int optional_on = 0;
                    for (int t : on)
                        if (sc.trains[t].optional) ++optional_on;
                    if (optional_on < sc.demanded_optional_count) continue;
                    std::sort(on.begin(), on.end());
                    choices[s].push_back({pen, on});
                }
                if (choices[s].empty()) ok = false;
            }
            if (!ok) continue;
            std::vector<std::size_t> pick(n, 0);
            while (true) {
                Activation a;
                a.penalty = base_penalty;
                for (int s = 0; s < n; ++s) {
                    if (!(mask >> s & 1)) continue;
                    a.scenarios.insert(family_.scenarios[s].id);
                    a.penalty += choices[s][pick[s]].first;
                    for (int t : choices[s][pick[s]].second) a.trains.push_back({s, t});
                }
                out.push_back(std::move(a));
                int s = 0;
                while (s < n && ++pick[s] == choices[s].size()) pick[s++] = 0;
                if (s == n) break;
            }
        }
        std::stable_sort(out.begin(), out.end(),
                         [](const Activation& a, const Activation& b) { return a.penalty < b.penalty; });
        return out;
    }

    // ---- route search --------------------------------------------------

    void search_activation(const Activation& act) {
        active_.clear();
        for (const auto& [s, t] : act.trains) {
            const Train& tr = family_.scenarios[s].trains[t];
            active_.push_back({s, &tr, {family_.scenarios[s].id, tr.id}, &options_[s][t]});
            if (options_[s][t].empty()) return;
        }
        std::stable_sort(active_.begin(), active_.end(), [](const ActiveTrain& a, const ActiveTrain& b) {
            return a.options->size() < b.options->size();
        });
        activation_ = &act;
        chosen_.assign(active_.size(), nullptr);
        used_tracks_.assign(spec_.sections().size(), {});
        track_count_.assign(spec_.sections().size(), std::map<int, int>{});
        link_count_.assign(spec_.links().size(), 0);
        infra_ = 0.0;
        assign(0);
    }

    double incremental_cost(const RouteOption& opt) const {
        double delta = 0.0;
        std::map<int, std::set<int>> touched;
        for (const auto& leg : opt.legs) touched[leg.section].insert(leg.track);
        for (const auto& [sec, tracks] : touched) {
            std::set<int> merged = used_tracks_[sec];
            merged.insert(tracks.begin(), tracks.end());
            delta += section_cost(sec, merged) - section_cost(sec, used_tracks_[sec]);
        }
        for (int l : opt.links)
            if (link_count_[l] == 0) delta += spec_.links()[l].cost;
        return delta;
    }

    void apply(const RouteOption& opt, int sign) {
        for (const auto& leg : opt.legs) {
            infra_ -= section_cost(leg.section, used_tracks_[leg.section]);
            int& c = track_count_[leg.section][leg.track];
            c += sign;
            if (c == 0)
                used_tracks_[leg.section].erase(leg.track);
            else
                used_tracks_[leg.section].insert(leg.track);
            infra_ += section_cost(leg.section, used_tracks_[leg.section]);
        }
        for (int l : opt.links) {
            const bool was = link_count_[l] > 0;
            link_count_[l] += sign;
            const bool is = link_count_[l] > 0;
            if (was != is) infra_ += (is ? 1.0 : -1.0) * spec_.links()[l].cost;
        }
    }

    bool can_beat(double cost) const { return !best_ || cost < *best_ - 1e-9; }

    void assign(std::size_t k) {
        if (expired()) return;
        const double base = activation_->penalty + infra_;
        if (!can_beat(base)) return;
        if (k == active_.size()) {
            ++leaves_;
            optimise_reductions();
            return;
        }
        // Every remaining train adds at least its cheapest increment.
        double bound = 0.0;
        for (std::size_t r = k; r < active_.size(); ++r) {
            double cheapest = std::numeric_limits<double>::infinity();
            for (const auto& opt : *active_[r].options) cheapest = std::min(cheapest, incremental_cost(opt));
            bound = std::max(bound, cheapest);
        }
        if (!can_beat(base + bound)) return;
        std::vector<std::pair<double, const RouteOption*>> ordered;
        for (const auto& opt : *active_[k].options) ordered.push_back({incremental_cost(opt), &opt});
        std::stable_sort(ordered.begin(), ordered.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [delta, opt] : ordered) {
            if (!can_beat(base + delta)) break;
            chosen_[k] = opt;
            apply(*opt, +1);
            if (timing(k + 1)) assign(k + 1);
            apply(*opt, -1);
            chosen_[k] = nullptr;
            if (expired()) return;
        }
    }

    // ---- reductions and timing -----------------------------------------

    struct Reduction {
        Minutes time = 0;
        Minutes headway = 0;
    };

    void optimise_reductions() {
        std::set<int> used;
        for (std::size_t k = 0; k < active_.size(); ++k)
            for (const auto& leg : chosen_[k]->legs) used.insert(leg.section);
        sections_.assign(used.begin(), used.end());
        decided_.assign(spec_.sections().size(), std::nullopt);
        reduce(0, 0.0);
    }

    void reduce(std::size_t i, double spent) {
        if (expired()) return;
        const double total = activation_->penalty + infra_ + spent;
        if (!can_beat(total)) return;
        if (i == sections_.size()) {
            auto times = timing(active_.size());
            if (!times) return;
            record(total, *times);
            return;
        }
        const Section& s = spec_.sections()[sections_[i]];
        const Minutes ct = time_reduction_cap(s, config_);
        const Minutes ch = headway_reduction_cap(s, config_);
        std::vector<std::pair<double, Reduction>> values;
        for (Minutes rt = 0; rt <= ct; ++rt)
            for (Minutes rh = 0; rh <= ch; ++rh)
                values.push_back({s.time_reduction_cost_per_minute * rt + s.headway_reduction_cost_per_minute * rh,
                                  {rt, rh}});
        std::stable_sort(values.begin(), values.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [cost, r] : values) {
            if (!can_beat(total + cost)) break;
            decided_[sections_[i]] = r;
            const bool last = i + 1 == sections_.size();
            if (last || timing(active_.size())) reduce(i + 1, spent + cost);
            decided_[sections_[i]] = std::nullopt;
        }
    }

    /// Time points: 0 origin, then (departure, arrival) per leg of the first
    /// `count` chosen trains. Undecided reductions relax to their ranges.
    std::optional<std::vector<Minutes>> timing(std::size_t count) {
        std::vector<std::vector<int>> dep(count), arr(count);
        int points = 1;
        for (std::size_t k = 0; k < count; ++k)
            for (std::size_t l = 0; l < chosen_[k]->legs.size(); ++l) {
                dep[k].push_back(points++);
                arr[k].push_back(points++);
            }
        TemporalNetwork net(points);
        const Minutes horizon = config_.planning_horizon_end_minutes;
        for (int p = 1; p < points; ++p) {
            net.add({0, p, horizon});
            net.add({p, 0, 0});
        }
        auto reduction_range = [&](int section, bool headway) -> std::pair<Minutes, Minutes> {
            const Section& s = spec_.sections()[section];
            if (decided_.size() == spec_.sections().size() && decided_[section]) {
                const Minutes v = headway ? decided_[section]->headway : decided_[section]->time;
                return {v, v};
            }
            return {0, headway ? headway_reduction_cap(s, config_) : time_reduction_cap(s, config_)};
        };
        for (std::size_t k = 0; k < count; ++k) {
            const Train& t = *active_[k].train;
            const auto& legs = chosen_[k]->legs;
            for (std::size_t l = 0; l < legs.size(); ++l) {
                const auto [rlo, rhi] = reduction_range(legs[l].section, false);
                net.add({dep[k][l], arr[k][l], legs[l].travel - rlo});
                net.add({arr[k][l], dep[k][l], -(legs[l].travel - rhi)});
                if (l > 0) {
                    net.add({dep[k][l], arr[k][l - 1], 0});
                    net.add({arr[k][l - 1], dep[k][l], spec_.nodes()[legs[l].from].max_stop_minutes});
                }
            }
            net.add({dep[k].front(), 0, -t.earliest_departure_minutes});
            net.add({0, arr[k].back(), t.latest_arrival_minutes});
        }
        // Relations between trains already routed.
        auto event = [&](const TrainKey& key, int node, bool arrival) -> std::optional<int> {
            for (std::size_t k = 0; k < count; ++k) {
                if (!(active_[k].key == key)) continue;
                const auto& legs = chosen_[k]->legs;
                for (std::size_t l = 0; l < legs.size(); ++l) {
                    if (arrival && legs[l].to == node) return arr[k][l];
                    if (!arrival && legs[l].from == node) return dep[k][l];
                }
                return 0;
            }
            return std::nullopt;
        };
        for (const auto& sc : family_.scenarios) {
            if (!activation_->scenarios.count(sc.id)) continue;
            for (const auto& rel : sc.relations) {
                const int node = spec_.require_node(rel.at_node);
                const bool first_arrival = rel.kind != RelationKind::DepartureFrequency;
                const bool second_arrival = rel.kind == RelationKind::ArrivalFrequency;
                auto e1 = event({sc.id, rel.first_train}, node, first_arrival);
                auto e2 = event({sc.id, rel.second_train}, node, second_arrival);
                if (!e1 || !e2) continue;
                if (*e1 == *e2) {
                    if (rel.min_minutes > 0 || rel.max_minutes < 0) return std::nullopt;
                    continue;
                }
                net.add({*e2, *e1, -rel.min_minutes});
                net.add({*e1, *e2, rel.max_minutes});
            }
        }
        // Headway and crossing disjunctions.
        for (std::size_t k1 = 0; k1 < count; ++k1)
            for (std::size_t k2 = k1 + 1; k2 < count; ++k2) {
                if (active_[k1].scenario != active_[k2].scenario && !config_.cross_scenario_headways) continue;
                const auto& l1 = chosen_[k1]->legs;
                const auto& l2 = chosen_[k2]->legs;
                for (std::size_t a = 0; a < l1.size(); ++a)
                    for (std::size_t b = 0; b < l2.size(); ++b) {
                        if (l1[a].section != l2[b].section || l1[a].track != l2[b].track) continue;
                        const Section& s = spec_.sections()[l1[a].section];
                        if (l1[a].from == l2[b].from) {
                            const Minutes rh = reduction_range(l1[a].section, true).second;
                            const Minutes h12 = s.headway(active_[k1].train->train_type, active_[k2].train->train_type)
                                                    .value_or(0) - rh;
                            const Minutes h21 = s.headway(active_[k2].train->train_type, active_[k1].train->train_type)
                                                    .value_or(0) - rh;
                            net.add_disjunction({{dep[k2][b], dep[k1][a], -h12}, {dep[k1][a], dep[k2][b], -h21}});
                        } else {
                            const Minutes c_to1 = spec_.nodes()[l1[a].to].crossing_time_minutes;
                            const Minutes c_to2 = spec_.nodes()[l2[b].to].crossing_time_minutes;
                            net.add_disjunction({{dep[k2][b], arr[k1][a], -c_to1}, {dep[k1][a], arr[k2][b], -c_to2}});
                        }
                    }
            }
        return net.solve();
    }

    void record(double cost, const std::vector<Minutes>& times) {
        best_ = cost;
        PlanSolution plan;
        plan.active_scenarios = activation_->scenarios;
        int point = 1;
        std::map<int, std::set<int>> used;
        for (std::size_t k = 0; k < active_.size(); ++k) {
            plan.active_trains.insert(active_[k].key);
            std::vector<RouteLeg> legs;
            for (const auto& leg : chosen_[k]->legs) {
                const Minutes dep = times[point++];
                const Minutes arr = times[point++];
                legs.push_back({spec_.nodes()[leg.from].id, spec_.nodes()[leg.to].id, leg.track, dep, arr});
                used[leg.section].insert(leg.track);
            }
            plan.routes[active_[k].key] = std::move(legs);
            for (int l : chosen_[k]->links) {
                const NodeLink& link = spec_.links()[l];
                plan.built_links.insert({link.at, std::min(link.from, link.to), std::max(link.from, link.to)});
            }
        }
        for (const auto& [sec, tracks] : used) {
            const Section& s = spec_.sections()[sec];
            for (int tr : closure(tracks)) plan.built_arcs.insert({s.a, s.b, tr});
        }
        for (int sec : sections_) {
            if (!decided_[sec]) continue;
            const auto r = *decided_[sec];
            if (r.time == 0 && r.headway == 0) continue;
            const Section& s = spec_.sections()[sec];
            plan.reductions[{s.a, s.b}] = {r.time, r.headway};
        }
        best_plan_ = std::move(plan);
    }

    const TimetableFamily& family_;
    const InfrastructureSpec& spec_;
    const BuildConfig& config_;
    bool robust_;
    OracleLimits limits_;
    std::chrono::steady_clock::time_point start_;
    bool timed_out_ = false;
    long long leaves_ = 0;

    std::vector<std::vector<std::vector<RouteOption>>> options_;
    const Activation* activation_ = nullptr;
    std::vector<ActiveTrain> active_;
    std::vector<const RouteOption*> chosen_;
    std::vector<std::set<int>> used_tracks_;
    std::vector<std::map<int, int>> track_count_;
    std::vector<int> link_count_;
    double infra_ = 0.0;
    std::vector<int> sections_;
    std::vector<std::optional<Reduction>> decided_;

    std::optional<double> best_;
    PlanSolution best_plan_;
};

}  // namespace

OracleResult brute_force_optimum(const TimetableFamily& family, const InfrastructureSpec& spec,
                                 const BuildConfig& config, bool robust, const OracleLimits& limits) {
    return Oracle(family, spec, config, robust, limits).run();
}

}  // namespace railnet
