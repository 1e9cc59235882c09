/**
 * @brief Acceptance suite: one PASS/FAIL line per criterion, nonzero exit
 *        when any criterion fails.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fixtures.hpp"
#include "mutations.hpp"
#include "railnet/generator.hpp"
#include "railnet/pipeline.hpp"

using namespace railnet;
using namespace railnet::testing;

namespace {

constexpr int kSuiteSeeds = 50;
constexpr double kSuiteSeconds = 600.0;
constexpr int kMinMutations = 200;
constexpr double kShareTol = 1e-9;
constexpr double kCostTol = 1e-6;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Collects failure messages for one criterion.
struct Criterion {
    Criterion(int n, std::string label) : number(n), name(std::move(label)) {}

    int number = 0;
    std::string name;
    std::vector<std::string> failures;
    std::string detail;

    void fail(const std::string& message) { failures.push_back(message); }
    bool ok() const { return failures.empty(); }
};

std::string seed_tag(int seed) { return "seed " + std::to_string(seed); }

/// Solves the model of `inst` with the internal solver.
MilpSolution solve(const Instance& inst, bool robust) {
    return solve_branch_and_bound(build_model(inst, robust).model);
}

/// Maps plan legs to (train index, section, from, to, track) of the relevant sets.
struct LegIndex {
    std::map<std::string, int> train_by_name;

    explicit LegIndex(const RelevantSets& sets) {
        for (std::size_t k = 0; k < sets.trains.size(); ++k) train_by_name[sets.trains[k].name] = static_cast<int>(k);
    }

    std::optional<TrainArc> arc_of(const InfrastructureSpec& spec, const std::string& train, const RouteLeg& leg) const {
        const auto k = train_by_name.find(train);
        const auto u = spec.node_index(leg.from);
        const auto v = spec.node_index(leg.to);
        if (k == train_by_name.end() || !u || !v) return std::nullopt;
        const auto s = spec.section_index(*u, *v);
        if (!s) return std::nullopt;
        return TrainArc{k->second, *s, *u, *v, leg.track};
    }
};

struct PlacedLeg {
    TrainArc arc;
    RouteLeg leg;
    const Train* train = nullptr;
};

std::vector<PlacedLeg> placed_legs(const PlanSolution& plan, const Instance& inst, const LegIndex& index) {
    std::vector<PlacedLeg> out;
    for (const auto& [key, route] : plan.routes) {
        const Train* t = inst.family.scenarios.front().find_train(key.train);
        for (const auto& leg : route)
            if (const auto arc = index.arc_of(inst.spec, key.train, leg)) out.push_back({*arc, leg, t});
    }
    return out;
}

/// Pairs on one track that need no headway row: neither in an order set nor a conflict.
std::set<std::pair<int, int>> implicit_pairs(const RelevantSets& sets, const HeadwaySets& hw) {
    std::set<std::pair<TrainArc, TrainArc>> classified;
    auto add = [&](const std::vector<HeadwayTuple>& tuples) {
        for (const auto& t : tuples) {
            const int a = sets.find_x({t.first, t.section, t.from, t.to, t.track});
            for (const auto& x : sets.x) {
                if (x.train != t.second || x.section != t.section || x.track != t.track) continue;
                const TrainArc first{t.first, t.section, t.from, t.to, t.track};
                if (a >= 0) classified.insert({std::min(first, x), std::max(first, x)});
            }
        }
    };
    add(hw.free_following);
    add(hw.free_crossing);
    add(hw.fixed_following);
    add(hw.fixed_crossing);
    add(hw.conflicts);
    std::set<std::pair<int, int>> out;
    for (std::size_t i = 0; i < sets.x.size(); ++i)
        for (std::size_t j = i + 1; j < sets.x.size(); ++j) {
            const TrainArc& a = sets.x[i];
            const TrainArc& b = sets.x[j];
            if (a.train == b.train || a.section != b.section || a.track != b.track) continue;
            if (!classified.count({std::min(a, b), std::max(a, b)}))
                out.insert({static_cast<int>(i), static_cast<int>(j)});
        }
    return out;
}

/// Separation of two legs on one track, checked directly from the data.
bool separated(const Instance& inst, const PlanSolution& plan, const PlacedLeg& p, const PlacedLeg& q) {
    const Section& s = inst.spec.sections()[p.arc.section];
    const auto red = plan.reductions.find({s.a, s.b});
    const Minutes hred = red == plan.reductions.end() ? 0 : red->second.headway_minutes;
    if (p.arc.from == q.arc.from) {
        const PlacedLeg& lead = p.leg.departure <= q.leg.departure ? p : q;
        const PlacedLeg& follow = &lead == &p ? q : p;
        const Minutes h = *s.headway(lead.train->train_type, follow.train->train_type) - hred;
        return follow.leg.departure - lead.leg.departure >= h && follow.leg.arrival - lead.leg.arrival >= h;
    }
    const PlacedLeg& first = p.leg.departure <= q.leg.departure ? p : q;
    const PlacedLeg& second = &first == &p ? q : p;
    const Minutes ct = inst.spec.nodes()[first.arc.to].crossing_time_minutes;
    return second.leg.departure - first.leg.arrival >= ct;
}

/// Whole-route time shifts of single trains that the checker still accepts.
std::vector<PlanSolution> accepted_variants(const PlanSolution& plan, const Instance& inst) {
    std::vector<PlanSolution> out{plan};
    for (const auto& [key, route] : plan.routes)
        for (int delta = -4; delta <= 4; ++delta) {
            if (delta == 0) continue;
            PlanSolution v = plan;
            for (auto& leg : v.routes[key]) {
                leg.departure += delta;
                leg.arrival += delta;
            }
            if (check_plan(v, inst.family, inst.spec, inst.config).ok) out.push_back(std::move(v));
        }
    return out;
}

double smallest_positive_cost(const InfrastructureSpec& spec) {
    double best = 1e300;
    auto take = [&](double c) {
        if (c > 0) best = std::min(best, c);
    };
    for (const auto& s : spec.sections()) {
        for (const auto& [track, cost] : s.track_cost) take(cost);
        take(s.time_reduction_cost_per_minute);
        take(s.headway_reduction_cost_per_minute);
    }
    for (const auto& l : spec.links()) take(l.cost);
    return best;
}

void print(const Criterion& c) {
    std::printf("%s %d %s", c.ok() ? "PASS" : "FAIL", c.number, c.name.c_str());
    if (!c.detail.empty()) std::printf(" (%s)", c.detail.c_str());
    std::printf("\n");
    for (std::size_t i = 0; i < c.failures.size() && i < 10; ++i) std::printf("    %s\n", c.failures[i].c_str());
    if (c.failures.size() > 10) std::printf("    ... %zu more\n", c.failures.size() - 10);
    std::fflush(stdout);
}

}  // namespace

int main() {
    Criterion oracle{1, "oracle equivalence"};
    Criterion checker{2, "checker soundness and mutation detection"};
    Criterion chain{3, "configuration chain A <= B <= C"};
    Criterion sweep{4, "coverage sweep monotone and over-fulfilled"};
    Criterion degenerate{5, "robust model with one scenario equals deterministic"};
    Criterion optional{6, "optional trains run iff free of infrastructure cost"};
    Criterion preprocessing{7, "preprocessing soundness"};
    Criterion roundtrip{8, "model text round trip"};

    int mutations = 0;
    int implicit_checked = 0;
    int conflict_checked = 0;
    double suite_seconds = 0.0;

    for (int seed = 1; seed <= kSuiteSeeds; ++seed) {
        const std::string tag = seed_tag(seed);
        const Instance inst = generate_instance(seed, suite_params(seed));

        // Oracle equivalence, timed together with the solver.
        const auto start = Clock::now();
        const MilpModel det = build_model(inst, false).model;
        const auto sol = solve_branch_and_bound(det);
        const auto best = brute_force_optimum(inst.family, inst.spec, inst.config, false);
        suite_seconds += seconds_since(start);
        if (sol.has_solution() != best.feasible) {
            oracle.fail(tag + ": solver and oracle disagree on feasibility");
            continue;
        }
        if (!best.feasible) continue;
        if (sol.status != SolveStatus::Optimal) oracle.fail(tag + ": solver status " + std::string(to_string(sol.status)));
        if (sol.objective != best.cost) {
            std::ostringstream msg;
            msg << tag << ": solver " << sol.objective << " oracle " << best.cost;
            oracle.fail(msg.str());
        }

        // Checker soundness on the solver plan and mutation detection.
        const auto result = run_pipeline(inst);
        if (!result.plan) {
            checker.fail(tag + ": pipeline returned no plan");
            continue;
        }
        if (!result.validation.ok) checker.fail(tag + ": solver plan rejected");
        if (std::abs(result.recomputed_cost - result.objective) > kCostTol) checker.fail(tag + ": cost mismatch");
        if (!check_plan(best.plan, inst.family, inst.spec, inst.config).ok) checker.fail(tag + ": oracle plan rejected");
        for (const auto& m : plan_mutations(*result.plan, inst.family)) {
            ++mutations;
            const auto report = check_plan(m.plan, inst.family, inst.spec, inst.config);
            if (!report.has_rule(m.rule)) checker.fail(tag + ": " + m.label + " did not trip " + m.rule);
        }

        // Configuration chain.
        std::map<char, double> cost;
        bool all_optimal = true;
        for (char preset : {'A', 'B', 'C'}) {
            Instance variant = inst;
            variant.preset = preset;
            apply_preset(variant.config, preset);
            const auto r = solve(variant, false);
            if (r.status != SolveStatus::Optimal) {
                all_optimal = false;
                break;
            }
            cost[preset] = r.objective;
        }
        if (all_optimal && !(cost['A'] <= cost['B'] + kCostTol && cost['B'] <= cost['C'] + kCostTol)) {
            std::ostringstream msg;
            msg << tag << ": A " << cost['A'] << " B " << cost['B'] << " C " << cost['C'];
            chain.fail(msg.str());
        }

        // Robust degeneracy.
        const auto robust = solve(inst, true);
        if (robust.status != SolveStatus::Optimal || robust.objective != sol.objective) {
            std::ostringstream msg;
            msg << tag << ": robust " << robust.objective << " deterministic " << sol.objective;
            degenerate.fail(msg.str());
        }

        // Preprocessing soundness.
        const auto sets = build_relevant_sets(inst.spec, inst.family, inst.config);
        const auto hw = build_headway_sets(inst.spec, inst.family, sets, inst.config);
        const LegIndex index(sets);
        for (const auto& p : placed_legs(best.plan, inst, index))
            if (sets.find_x(p.arc) < 0) preprocessing.fail(tag + ": oracle leg outside X on " + p.leg.from + "-" + p.leg.to);
        const auto implicit = implicit_pairs(sets, hw);
        std::set<std::pair<TrainArc, TrainArc>> conflict_pairs;
        for (const auto& c : hw.conflicts)
            for (const auto& x : sets.x)
                if (x.train == c.second && x.section == c.section && x.track == c.track && x.from == c.to)
                    conflict_pairs.insert({{c.first, c.section, c.from, c.to, c.track}, x});
        conflict_checked += static_cast<int>(hw.conflicts.size());
        std::vector<PlanSolution> accepted = accepted_variants(*result.plan, inst);
        for (auto& v : accepted_variants(best.plan, inst)) accepted.push_back(std::move(v));
        for (const auto& plan : accepted) {
            const auto legs = placed_legs(plan, inst, index);
            for (const auto& p : legs)
                for (const auto& q : legs) {
                    if (&p == &q || p.arc.train == q.arc.train) continue;
                    if (p.arc.section != q.arc.section || p.arc.track != q.arc.track) continue;
                    if (conflict_pairs.count({p.arc, q.arc})) preprocessing.fail(tag + ": conflict pair shares a track");
                    const int i = sets.find_x(p.arc);
                    const int j = sets.find_x(q.arc);
                    if (i < 0 || j < 0 || i > j || !implicit.count({i, j})) continue;
                    ++implicit_checked;
                    if (!separated(inst, plan, p, q)) preprocessing.fail(tag + ": implicit pair violated");
                }
        }

        // Model text round trip.
        for (bool robust_model : {false, true}) {
            const MilpModel m = robust_model ? build_model(inst, true).model : det;
            const std::string text = emit_model_text(m);
            const MilpModel back = parse_model_text(text);
            if (back.variables() != m.variables() || back.constraints() != m.constraints() ||
                back.objective_offset != m.objective_offset || emit_model_text(back) != text)
                roundtrip.fail(tag + (robust_model ? " robust" : " deterministic") + ": round trip differs");
        }
    }
    if (suite_seconds >= kSuiteSeconds) oracle.fail("suite runtime " + std::to_string(suite_seconds) + " s");
    {
        std::ostringstream d;
        d.precision(3);
        d << kSuiteSeeds << " seeds, " << suite_seconds << " s";
        oracle.detail = d.str();
    }
    if (mutations < kMinMutations) checker.fail("only " + std::to_string(mutations) + " mutations");
    checker.detail = std::to_string(mutations) + " mutations";
    preprocessing.detail =
        std::to_string(implicit_checked) + " implicit pairs checked, " + std::to_string(conflict_checked) + " conflict pairs";

    // Coverage sweep on a ten-scenario family.
    {
        GeneratorParams p;
        p.nodes = 5;
        p.sections = 5;
        p.trains_per_type = {{"IC", 1}, {"RE", 2}};
        p.scenarios = 10;
        const Instance family = generate_instance(1, p);
        std::vector<double> percents;
        for (int s = 10; s <= 100; s += 10) percents.push_back(s);
        auto rows = sweep_coverage(family, percents);
        std::sort(rows.begin(), rows.end(),
                  [](const SweepRow& a, const SweepRow& b) { return a.requested_percent < b.requested_percent; });
        double previous = -1e300;
        std::ostringstream d;
        d << "costs";
        for (const auto& row : rows) {
            d << " " << row.cost;
            if (row.status != SolveStatus::Optimal)
                sweep.fail(std::to_string(row.requested_percent) + "%: status " + std::string(to_string(row.status)));
            if (row.achieved_percent + kShareTol < row.requested_percent)
                sweep.fail(std::to_string(row.requested_percent) + "%: achieved " + std::to_string(row.achieved_percent));
            if (row.cost + kCostTol < previous) sweep.fail(std::to_string(row.requested_percent) + "%: cost decreased");
            previous = row.cost;
        }
        if (rows.size() != percents.size()) sweep.fail("missing rows");
        sweep.detail = d.str();
    }

    // Optional-train penalties below every infrastructure cost.
    int optional_checked = 0;
    for (int seed = 1; seed <= 40; ++seed) {
        GeneratorParams p;
        p.nodes = 4 + seed % 2;
        p.sections = p.nodes + seed % 2;
        p.trains_per_type = {{"IC", 2}, {"RE", 2}};
        p.optional_share = 0.5;
        p.relation_probability = 0.0;
        p.max_slack = 15;
        Instance inst = generate_instance(seed, p);
        Scenario& sc = inst.family.scenarios.front();
        sc.demanded_optional_count = 0;
        sc.chosen_optional.clear();
        sc.relations.clear();
        int optional_trains = 0;
        for (auto& t : sc.trains)
            if (t.optional) ++optional_trains;
        if (optional_trains == 0) continue;
        const double penalty = smallest_positive_cost(inst.spec) / (2.0 * optional_trains);
        for (auto& t : sc.trains)
            if (t.optional) t.penalty = penalty;

        const std::string tag = seed_tag(seed);
        PipelineResult result;
        try {
            result = run_pipeline(inst);
        } catch (const std::exception& e) {
            optional.fail(tag + ": " + e.what());
            continue;
        }
        if (result.status != SolveStatus::Optimal || !result.plan) {
            if (result.status != SolveStatus::Infeasible) optional.fail(tag + ": not solved to optimality");
            continue;
        }
        const auto full = brute_force_optimum(inst.family, inst.spec, inst.config, true);
        if (!full.feasible || std::abs(full.cost - result.objective) > kCostTol) {
            std::ostringstream msg;
            msg << tag << ": solver " << result.objective << " oracle " << full.cost;
            optional.fail(msg.str());
        }
        for (const auto& t : sc.trains) {
            if (!t.optional) continue;
            const TrainKey key{sc.id, t.id};
            OracleLimits limits;
            for (const auto& other : sc.trains)
                if (other.optional && other.id != t.id)
                    limits.forced_activity[{sc.id, other.id}] = result.plan->active_trains.count({sc.id, other.id}) > 0;
            limits.forced_activity[key] = true;
            const auto on = brute_force_optimum(inst.family, inst.spec, inst.config, true, limits);
            limits.forced_activity[key] = false;
            const auto off = brute_force_optimum(inst.family, inst.spec, inst.config, true, limits);
            if (!off.feasible) {
                optional.fail(tag + ": oracle without " + t.id + " infeasible");
                continue;
            }
            const bool free = on.feasible && infrastructure_cost(on.plan, inst.spec) <=
                                                 infrastructure_cost(off.plan, inst.spec) + kCostTol;
            const bool active = result.plan->active_trains.count(key) > 0;
            ++optional_checked;
            if (free != active)
                optional.fail(tag + ": " + t.id + (active ? " active but costs infrastructure" : " inactive but free"));
        }
    }
    if (optional_checked == 0) optional.fail("no optional trains checked");
    optional.detail = std::to_string(optional_checked) + " optional trains";

    bool all = true;
    for (const Criterion* c : {&oracle, &checker, &chain, &sweep, &degenerate, &optional, &preprocessing, &roundtrip}) {
        print(*c);
        all = all && c->ok();
    }
    return all ? 0 : 1;
}
