#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "railnet/preprocess.hpp"

using namespace railnet;
using namespace railnet::testing;

namespace {

std::vector<std::string> node_names(const InfrastructureSpec& spec, const Path& p) {
    std::vector<std::string> out;
    for (int n : p.nodes) out.push_back(spec.nodes()[n].id);
    return out;
}

struct OraclePath {
    std::vector<int> nodes;
    Minutes time = 0;
    auto operator<=>(const OraclePath&) const = default;
};

/// Every admissible simple path by plain DFS over the section list.
std::vector<OraclePath> dfs_paths(const InfrastructureSpec& spec, int from, int to, Minutes budget,
                                  const std::set<int>& via, bool reduced) {
    std::vector<OraclePath> out;
    std::vector<int> stack{from};
    auto linked = [&](int a, int at, int b) {
        for (const auto& l : spec.links()) {
            const int li = *spec.node_index(l.at);
            const int lf = *spec.node_index(l.from);
            const int lt = *spec.node_index(l.to);
            if (li == at && ((lf == a && lt == b) || (lf == b && lt == a))) return true;
        }
        return false;
    };
    auto rec = [&](auto&& self, Minutes t) -> void {
        const int at = stack.back();
        if (t > budget) return;
        if (at == to) {
            bool all = true;
            for (int v : via) all &= std::find(stack.begin(), stack.end(), v) != stack.end();
            if (all) out.push_back({stack, t});
            return;
        }
        for (const auto& s : spec.sections()) {
            const int a = *spec.node_index(s.a);
            const int b = *spec.node_index(s.b);
            int next = -1;
            if (a == at) next = b;
            if (b == at) next = a;
            if (next < 0 || std::find(stack.begin(), stack.end(), next) != stack.end()) continue;
            if (stack.size() >= 2 && !linked(stack[stack.size() - 2], at, next)) continue;
            stack.push_back(next);
            self(self, t + *s.travel_time("IC") - (reduced ? s.max_time_reduction_minutes : 0));
            stack.pop_back();
        }
    };
    rec(rec, 0);
    std::sort(out.begin(), out.end(), [](const OraclePath& x, const OraclePath& y) {
        return std::tie(x.time, x.nodes) < std::tie(y.time, y.nodes);
    });
    return out;
}

const Train& train_of(const TimetableFamily& f, const RelevantSets& sets, int k) {
    return f.scenarios[sets.trains[k].scenario].trains[sets.trains[k].train];
}

}  // namespace

TEST(Paths, ChainWithinAndBeyondBudget) {
    const auto spec = chain_spec();
    const auto within = enumerate_paths(spec, "A", "C", "IC", 25, {});
    ASSERT_EQ(within.paths.size(), 1u);
    EXPECT_EQ(node_names(spec, within.paths[0]), (std::vector<std::string>{"A", "B", "C"}));
    EXPECT_EQ(within.paths[0].min_time, 20);
    EXPECT_EQ(within.paths[0].links.size(), 1u);
    EXPECT_TRUE(enumerate_paths(spec, "A", "C", "IC", 15, {}).paths.empty());
}

TEST(Paths, ViaFilterKeepsOnlyMatchingBranch) {
    const auto spec = diamond_spec();
    const auto all = enumerate_paths(spec, "A", "D", "IC", 60, {});
    ASSERT_EQ(all.paths.size(), 2u);
    EXPECT_EQ(node_names(spec, all.paths[0]), (std::vector<std::string>{"A", "B", "D"}));
    const auto via = enumerate_paths(spec, "A", "D", "IC", 60, {"C"});
    ASSERT_EQ(via.paths.size(), 1u);
    EXPECT_EQ(node_names(spec, via.paths[0]), (std::vector<std::string>{"A", "C", "D"}));
}

TEST(Paths, MissingLinkBlocksThroughMovement) {
    std::vector<Node> nodes{{"A", 0, 1}, {"B", 5, 1}, {"C", 0, 1}};
    const InfrastructureSpec spec(nodes, {make_section("A", "B", 10), make_section("B", "C", 10)}, {});
    EXPECT_TRUE(enumerate_paths(spec, "A", "C", "IC", 60, {}).paths.empty());
}

TEST(Paths, UnknownNodeThrows) {
    EXPECT_THROW(enumerate_paths(chain_spec(), "A", "Q", "IC", 60, {}), InputError);
}

TEST(Paths, CapTruncatesAndWarnsCheapestFirst) {
    const auto spec = random_spec(3, 7, 12);
    PathOptions opt;
    opt.max_paths = 1000;
    const auto full = enumerate_paths(spec, "A", "G", "IC", 200, {}, opt);
    ASSERT_GT(full.paths.size(), 3u);
    EXPECT_FALSE(full.truncated);
    opt.max_paths = 3;
    const auto capped = enumerate_paths(spec, "A", "G", "IC", 200, {}, opt);
    EXPECT_TRUE(capped.truncated);
    ASSERT_EQ(capped.paths.size(), 3u);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(capped.paths[i].nodes, full.paths[i].nodes);
}

TEST(Paths, MatchesExhaustiveDfsOnRandomMultigraph) {
    const auto spec = random_spec(42, 8, 7, 0.7);
    std::mt19937_64 rng(42);
    PathOptions opt;
    opt.max_paths = 100000;
    int compared = 0;
    for (std::size_t u = 0; u < spec.nodes().size(); ++u)
        for (std::size_t v = 0; v < spec.nodes().size(); ++v) {
            if (u == v) continue;
            const Minutes budget = 10 + static_cast<Minutes>(rng() % 50);
            std::set<int> via;
            std::set<NodeId> via_ids;
            if (rng() % 4 == 0) {
                const int w = static_cast<int>(rng() % spec.nodes().size());
                if (w != static_cast<int>(u) && w != static_cast<int>(v)) {
                    via.insert(w);
                    via_ids.insert(spec.nodes()[w].id);
                }
            }
            for (bool reduced : {false, true}) {
                opt.assume_max_reductions = reduced;
                const auto got = enumerate_paths(spec, spec.nodes()[u].id, spec.nodes()[v].id, "IC", budget,
                                                 via_ids, opt);
                const auto expected =
                    dfs_paths(spec, static_cast<int>(u), static_cast<int>(v), budget, via, reduced);
                ASSERT_EQ(got.paths.size(), expected.size());
                for (std::size_t i = 0; i < expected.size(); ++i) {
                    EXPECT_EQ(got.paths[i].nodes, expected[i].nodes);
                    EXPECT_EQ(got.paths[i].min_time, expected[i].time);
                    EXPECT_EQ(got.paths[i].steps.size() + 1, got.paths[i].nodes.size());
                    EXPECT_EQ(got.paths[i].links.size() + 2, std::max<std::size_t>(2, got.paths[i].nodes.size()));
                }
                ++compared;
            }
        }
    EXPECT_EQ(compared, 8 * 7 * 2);
}

TEST(Paths, DeterministicAcrossCalls) {
    const auto spec = random_spec(9, 7, 9);
    const auto a = enumerate_paths(spec, "B", "F", "IC", 80, {});
    const auto b = enumerate_paths(spec, "B", "F", "IC", 80, {});
    ASSERT_EQ(a.paths.size(), b.paths.size());
    for (std::size_t i = 0; i < a.paths.size(); ++i) {
        EXPECT_EQ(a.paths[i].nodes, b.paths[i].nodes);
        EXPECT_EQ(a.paths[i].steps, b.paths[i].steps);
        EXPECT_EQ(a.paths[i].links, b.paths[i].links);
    }
}

TEST(RelevantSets, AscendingTrainUsesTrackOne) {
    const auto spec = chain_spec();
    const auto family = single({make_train("k", "A", "C", 0, 40)});
    const auto sets = build_relevant_sets(spec, family, BuildConfig::preset('B'));
    ASSERT_EQ(sets.x.size(), 2u);
    EXPECT_EQ(sets.x[0], (TrainArc{0, 0, 0, 1, 1}));
    EXPECT_EQ(sets.x[1], (TrainArc{0, 1, 1, 2, 1}));
    EXPECT_EQ(sets.links, (std::vector<int>{0}));
    EXPECT_EQ(sets.nodes, (std::vector<int>{0, 1, 2}));
}

TEST(RelevantSets, DescendingTrainMayUseTracksOneAndTwo) {
    const auto spec = chain_spec();
    const auto family = single({make_train("k", "C", "A", 0, 40)});
    const auto sets = build_relevant_sets(spec, family, BuildConfig::preset('B'));
    std::set<std::tuple<int, int, int, int>> got;
    for (const auto& x : sets.x) got.insert({x.section, x.from, x.to, x.track});
    const std::set<std::tuple<int, int, int, int>> expected{{0, 1, 0, 1}, {0, 1, 0, 2}, {1, 2, 1, 1}, {1, 2, 1, 2}};
    EXPECT_EQ(got, expected);
    EXPECT_TRUE(sets.contains_arc(0, 2));
    EXPECT_TRUE(sets.contains_arc(1, 1));
}

TEST(RelevantSets, TrainWithoutPathIsInfeasible) {
    const auto spec = chain_spec();
    const auto family = single({make_train("late", "A", "C", 0, 15)});
    try {
        build_relevant_sets(spec, family, BuildConfig::preset('C'));
        FAIL() << "expected InfeasibleInstance";
    } catch (const InfeasibleInstance& e) {
        EXPECT_NE(std::string(e.what()).find("late"), std::string::npos);
    }
}

TEST(RelevantSets, MatchesBruteForceFilter) {
    const auto spec = random_spec(20, 6, 4);
    std::mt19937_64 rng(20);
    std::vector<Train> trains;
    for (int k = 0; k < 20; ++k) {
        const int o = static_cast<int>(rng() % 6);
        int d = static_cast<int>(rng() % 5);
        if (d >= o) ++d;
        const NodeId& from = spec.nodes()[o].id;
        const NodeId& to = spec.nodes()[d].id;
        const Minutes start = static_cast<Minutes>(rng() % 20);
        const Minutes run = *min_travel_time(spec, "IC", from, to, false);
        trains.push_back(make_train("k" + std::to_string(k), from, to, start, start + run + rng() % 12));
    }
    const auto family = single(trains);
    for (char preset : {'A', 'B', 'C'}) {
        BuildConfig config = BuildConfig::preset(preset, 200);
        config.max_paths_per_triple = 100000;
        const auto sets = build_relevant_sets(spec, family, config);
        std::set<TrainArc> expected;
        PathOptions opt;
        opt.assume_max_reductions = config.reductions_allowed;
        opt.max_paths = 100000;
        for (int k = 0; k < static_cast<int>(trains.size()); ++k) {
            const Train& t = trains[k];
            const auto paths = enumerate_paths(spec, t.origin, t.destination, "IC",
                                               t.latest_arrival_minutes - t.earliest_departure_minutes, {}, opt);
            for (std::size_t s = 0; s < spec.sections().size(); ++s) {
                const int a = spec.section_node_a(static_cast<int>(s));
                const int b = spec.section_node_b(static_cast<int>(s));
                for (auto [from, to] : {std::pair{a, b}, std::pair{b, a}}) {
                    bool on_path = false;
                    for (const auto& p : paths.paths) on_path |= p.uses_step(from, to);
                    if (!on_path) continue;
                    const int m = effective_max_tracks(spec.sections()[s], config);
                    for (int tr = 1; tr <= 4; ++tr) {
                        const auto ok = allowed_tracks(InfrastructureSpec::direction(from, to), m);
                        if (std::find(ok.begin(), ok.end(), tr) == ok.end()) continue;
                        const auto w = departure_window(spec, config, t, spec.nodes()[from].id, spec.nodes()[to].id, tr);
                        if (w.lb > w.ub) continue;
                        expected.insert({k, static_cast<int>(s), from, to, tr});
                    }
                }
            }
        }
        EXPECT_EQ(std::set<TrainArc>(sets.x.begin(), sets.x.end()), expected) << preset;
        EXPECT_TRUE(std::is_sorted(sets.x.begin(), sets.x.end()));
        ASSERT_EQ(sets.windows.size(), sets.x.size());
        for (std::size_t i = 0; i < sets.x.size(); ++i) {
            EXPECT_LE(sets.windows[i].lb, sets.windows[i].ub);
            EXPECT_GE(sets.find_x(sets.x[i]), 0);
            EXPECT_TRUE(sets.contains_arc(sets.x[i].section, sets.x[i].track));
        }
    }
}

TEST(RelevantSetsProperty, LongerWindowsNeverShrinkX) {
    for (int seed = 1; seed <= 25; ++seed) {
        Instance inst = generate_instance(seed, suite_params(seed));
        const auto before = build_relevant_sets(inst.spec, inst.family, inst.config);
        for (auto& t : inst.family.scenarios[0].trains) t.latest_arrival_minutes += 10;
        inst.config.planning_horizon_end_minutes += 10;
        const auto after = build_relevant_sets(inst.spec, inst.family, inst.config);
        for (std::size_t k = 0; k < before.paths.size(); ++k)
            EXPECT_GE(after.paths[k].size(), before.paths[k].size()) << seed;
        for (const auto& x : before.x) EXPECT_GE(after.find_x(x), 0) << seed;
    }
}

TEST(Windows, ChainExamples) {
    const auto spec = chain_spec(2);
    const auto train = make_train("k", "A", "C", 0, 40);
    const auto c = config_c();
    auto w = departure_window(spec, c, train, "B", "C");
    EXPECT_EQ(w.lb, 10);
    EXPECT_EQ(w.ub, 30);
    w = departure_window(spec, c, train, "A", "B");
    EXPECT_EQ(w.lb, 0);
    EXPECT_EQ(w.ub, 20);
    w = departure_window(spec, BuildConfig::preset('B'), train, "B", "C");
    EXPECT_EQ(w.lb, 8);
    EXPECT_EQ(w.ub, 32);
}

TEST(Classify, FollowingCases) {
    using V = HeadwayVariant;
    const auto G = HeadwayGeometry::Following;
    auto case_of = [&](TraversalWindow a, TraversalWindow b) { return classify_headway_pair(G, a, b, 5, 5); };
    EXPECT_EQ(case_of({10, 20, 5, 5}, {40, 50, 5, 5}).variant, V::Implicit);
    const auto fixed = case_of({10, 20, 5, 5}, {22, 50, 5, 5});
    EXPECT_EQ(fixed.variant, V::FixedOrder);
    EXPECT_EQ(fixed.first, 1);
    EXPECT_EQ(fixed.second, 2);
    const auto reversed = case_of({22, 50, 5, 5}, {10, 20, 5, 5});
    EXPECT_EQ(reversed.variant, V::FixedOrder);
    EXPECT_EQ(reversed.first, 2);
    EXPECT_EQ(case_of({10, 30, 5, 5}, {20, 40, 5, 5}).variant, V::FreeOrder);
}

TEST(Classify, CrossingCases) {
    using V = HeadwayVariant;
    const auto G = HeadwayGeometry::Crossing;
    EXPECT_EQ(classify_headway_pair(G, {0, 5, 10, 10}, {0, 5, 10, 10}, 1, 1).variant, V::Conflict);
    const auto fixed = classify_headway_pair(G, {0, 5, 10, 10}, {12, 20, 10, 10}, 1, 1);
    EXPECT_EQ(fixed.variant, V::FixedOrder);
    EXPECT_EQ(fixed.geometry, G);
    EXPECT_EQ(fixed.first, 1);
    EXPECT_EQ(classify_headway_pair(G, {0, 5, 10, 10}, {16, 20, 10, 10}, 1, 1).variant, V::Implicit);
    EXPECT_EQ(classify_headway_pair(G, {0, 40, 10, 10}, {0, 40, 10, 10}, 1, 1).variant, V::FreeOrder);
}

TEST(HeadwaySetsTest, FarApartTrainsNeedNothing) {
    std::vector<Node> nodes{{"A", 0, 1}, {"B", 0, 1}};
    const InfrastructureSpec spec(nodes, {make_section("A", "B", 10, 100.0, 1, 5)}, {});
    const auto family = single({make_train("k1", "A", "B", 0, 20), make_train("k2", "A", "B", 60, 80)});
    const auto config = config_c();
    const auto sets = build_relevant_sets(spec, family, config);
    const auto hw = build_headway_sets(spec, family, sets, config);
    EXPECT_TRUE(hw.free_following.empty() && hw.fixed_following.empty() && hw.enforce_following.empty());
    EXPECT_TRUE(hw.free_crossing.empty() && hw.fixed_crossing.empty() && hw.enforce_crossing.empty());
    EXPECT_TRUE(hw.conflicts.empty());
}

TEST(HeadwaySetsTest, FourTrainWindowFigure) {
    std::vector<Node> nodes{{"A", 0, 1}, {"B", 0, 1}};
    const InfrastructureSpec spec(nodes, {make_section("A", "B", 10, 100.0, 2, 5)}, {});
    // Departure windows k1 [0,10], k2 [30,40], k3 [42,60], k4 [50,70].
    const auto family = single({make_train("k1", "A", "B", 0, 20), make_train("k2", "A", "B", 30, 50),
                                make_train("k3", "A", "B", 42, 70), make_train("k4", "A", "B", 50, 80)});
    const auto config = config_c();
    const auto sets = build_relevant_sets(spec, family, config);
    const auto hw = build_headway_sets(spec, family, sets, config);
    ASSERT_EQ(hw.fixed_following.size(), 1u);
    EXPECT_EQ(hw.fixed_following[0].first, 1);
    EXPECT_EQ(hw.fixed_following[0].second, 2);
    ASSERT_EQ(hw.free_following.size(), 1u);
    EXPECT_EQ(std::min(hw.free_following[0].first, hw.free_following[0].second), 2);
    EXPECT_EQ(std::max(hw.free_following[0].first, hw.free_following[0].second), 3);
    EXPECT_EQ(hw.enforce_following.size(), 3u);
}

TEST(HeadwaySetsTest, OpposingTrainsOnSingleTrackConflict) {
    std::vector<Node> nodes{{"A", 0, 2}, {"B", 0, 2}};
    const InfrastructureSpec spec(nodes, {make_section("A", "B", 10, 100.0, 2, 5)}, {});
    const auto family = single({make_train("k1", "A", "B", 0, 12), make_train("k2", "B", "A", 0, 12)});
    const auto config = config_c();
    const auto sets = build_relevant_sets(spec, family, config);
    const auto hw = build_headway_sets(spec, family, sets, config);
    ASSERT_EQ(hw.conflicts.size(), 1u);
    EXPECT_EQ(hw.conflicts[0].track, 1);
    EXPECT_TRUE(hw.enforce_crossing.empty());
}

TEST(HeadwaySetsTest, MatchesPairwiseClassification) {
    for (int seed = 1; seed <= 12; ++seed) {
        GeneratorParams p;
        p.nodes = 5;
        p.sections = 6;
        p.trains_per_type = {{"IC", 5}, {"RE", 5}};
        p.max_slack = 25;
        p.preset = seed % 3 == 0 ? 'C' : 'A';
        const Instance inst = generate_instance(seed, p);
        const auto sets = build_relevant_sets(inst.spec, inst.family, inst.config);
        const auto hw = build_headway_sets(inst.spec, inst.family, sets, inst.config);

        std::set<HeadwayTuple> fixed_f, fixed_c, free_f, free_c, conflicts;
        for (std::size_t i = 0; i < sets.x.size(); ++i)
            for (std::size_t j = 0; j < sets.x.size(); ++j) {
                const TrainArc& x1 = sets.x[i];
                const TrainArc& x2 = sets.x[j];
                if (x1.train >= x2.train || x1.section != x2.section || x1.track != x2.track) continue;
                const Section& s = inst.spec.sections()[x1.section];
                const Train& t1 = train_of(inst.family, sets, x1.train);
                const Train& t2 = train_of(inst.family, sets, x2.train);
                const auto& w1 = sets.windows[i];
                const auto& w2 = sets.windows[j];
                auto tuple = [](const TrainArc& a, const TrainArc& b) {
                    return HeadwayTuple{a.section, a.from, a.to, a.track, a.train, b.train};
                };
                if (x1.from == x2.from) {
                    const Minutes h12 = *s.headway(t1.train_type, t2.train_type);
                    const Minutes h21 = *s.headway(t2.train_type, t1.train_type);
                    if (w1.ub < w2.lb) {
                        if (w2.lb - w1.ub < h12) fixed_f.insert(tuple(x1, x2));
                    } else if (w2.ub < w1.lb) {
                        if (w1.lb - w2.ub < h21) fixed_f.insert(tuple(x2, x1));
                    } else {
                        free_f.insert(tuple(x1, x2));
                    }
                    continue;
                }
                const bool swap = x1.from > x1.to;
                const TrainArc& up = swap ? x2 : x1;
                const TrainArc& down = swap ? x1 : x2;
                const auto& wu = swap ? w2 : w1;
                const auto& wd = swap ? w1 : w2;
                const Train& tu = swap ? t2 : t1;
                const Train& td = swap ? t1 : t2;
                const Minutes cap = time_reduction_cap(s, inst.config);
                const Minutes ru = *s.travel_time(tu.train_type);
                const Minutes rd = *s.travel_time(td.train_type);
                const Minutes ct_far = inst.spec.nodes()[up.to].crossing_time_minutes;
                const Minutes ct_near = inst.spec.nodes()[up.from].crossing_time_minutes;
                const bool up_first = wu.lb + ru - cap + ct_far <= wd.ub;
                const bool down_first = wd.lb + rd - cap + ct_near <= wu.ub;
                if (!up_first && !down_first) {
                    conflicts.insert(tuple(up, down));
                } else if (up_first && down_first) {
                    free_c.insert(tuple(up, down));
                } else if (up_first) {
                    if (wu.ub + ru + ct_far > wd.lb) fixed_c.insert(tuple(up, down));
                } else if (wd.ub + rd + ct_near > wu.lb) {
                    fixed_c.insert(tuple(down, up));
                }
            }
        auto as_set = [](const std::vector<HeadwayTuple>& v) { return std::set<HeadwayTuple>(v.begin(), v.end()); };
        EXPECT_EQ(as_set(hw.fixed_following), fixed_f) << seed;
        EXPECT_EQ(as_set(hw.free_following), free_f) << seed;
        EXPECT_EQ(as_set(hw.fixed_crossing), fixed_c) << seed;
        EXPECT_EQ(as_set(hw.free_crossing), free_c) << seed;
        EXPECT_EQ(as_set(hw.conflicts), conflicts) << seed;
        // Fixed pairs are enforced, free pairs in both orders, nothing else.
        EXPECT_EQ(hw.enforce_following.size(), fixed_f.size() + 2 * free_f.size());
        EXPECT_EQ(hw.enforce_crossing.size(), fixed_c.size() + 2 * free_c.size());
        for (const auto& t : fixed_f) EXPECT_TRUE(as_set(hw.enforce_following).count(t));
        for (const auto& t : fixed_c) EXPECT_TRUE(as_set(hw.enforce_crossing).count(t));
        for (const auto& t : conflicts) EXPECT_FALSE(as_set(hw.enforce_crossing).count(t));
    }
}
