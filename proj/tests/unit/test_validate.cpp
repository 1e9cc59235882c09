#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mutations.hpp"
#include "railnet/pipeline.hpp"
#include "railnet/validate.hpp"

using namespace railnet;
using namespace railnet::testing;

namespace {

/// One section A-B (10 min, headway 5) and two trains A->B on track 1.
struct FollowingCase {
    InfrastructureSpec spec;
    TimetableFamily family;
    PlanSolution plan;
};

FollowingCase following_case() {
    FollowingCase c;
    c.spec = InfrastructureSpec({{"A", 0, 1}, {"B", 0, 1}}, {make_section("A", "B", 10, 100.0, 1, 5)}, {});
    c.family = single({make_train("k1", "A", "B", 0, 40), make_train("k2", "A", "B", 0, 40)});
    c.plan.built_arcs = {{"A", "B", 1}};
    c.plan.routes[{"base", "k1"}] = {{"A", "B", 1, 0, 10}};
    c.plan.routes[{"base", "k2"}] = {{"A", "B", 1, 5, 15}};
    c.plan.active_scenarios = {"base"};
    c.plan.active_trains = {{"base", "k1"}, {"base", "k2"}};
    return c;
}

}  // namespace

TEST(Checker, EmptyPlanForZeroTrains) {
    PlanSolution plan;
    plan.active_scenarios = {"base"};
    const auto report = check_plan(plan, single({}), chain_spec(), BuildConfig::preset('B'));
    EXPECT_TRUE(report.ok);
    EXPECT_TRUE(report.violations.empty());
    EXPECT_EQ(recompute_cost(plan, chain_spec()), 0.0);
}

TEST(Checker, HeadwayShiftedByOneMinute) {
    auto c = following_case();
    EXPECT_TRUE(check_plan(c.plan, c.family, c.spec, config_c()).ok);
    c.plan.routes[{"base", "k2"}][0] = {"A", "B", 1, 4, 14};
    const auto report = check_plan(c.plan, c.family, c.spec, config_c());
    EXPECT_FALSE(report.ok);
    EXPECT_TRUE(report.has_rule("headway-following"));
}

TEST(Checker, OpposingTrainsNeedCrossingTime) {
    const InfrastructureSpec spec({{"A", 0, 2}, {"B", 0, 3}}, {make_section("A", "B", 10, 100.0, 2, 5)}, {});
    const auto family = single({make_train("k1", "A", "B", 0, 60), make_train("k2", "B", "A", 0, 60)});
    PlanSolution plan;
    plan.built_arcs = {{"A", "B", 1}};
    plan.routes[{"base", "k1"}] = {{"A", "B", 1, 0, 10}};
    plan.routes[{"base", "k2"}] = {{"B", "A", 1, 13, 23}};
    plan.active_scenarios = {"base"};
    plan.active_trains = {{"base", "k1"}, {"base", "k2"}};
    EXPECT_TRUE(check_plan(plan, family, spec, config_c()).ok);
    plan.routes[{"base", "k2"}][0] = {"B", "A", 1, 12, 22};
    EXPECT_TRUE(check_plan(plan, family, spec, config_c()).has_rule("headway-crossing"));
    plan.routes[{"base", "k2"}][0] = {"B", "A", 1, 5, 15};
    EXPECT_TRUE(check_plan(plan, family, spec, config_c()).has_rule("conflict"));
}

TEST(Checker, UnbuiltLinkIsReported) {
    const auto spec = chain_spec();
    const auto family = single({make_train("k1", "A", "C", 0, 40)});
    PlanSolution plan;
    plan.built_arcs = {{"A", "B", 1}, {"B", "C", 1}};
    plan.routes[{"base", "k1"}] = {{"A", "B", 1, 0, 10}, {"B", "C", 1, 10, 20}};
    plan.active_scenarios = {"base"};
    plan.active_trains = {{"base", "k1"}};
    const auto report = check_plan(plan, family, spec, config_c());
    EXPECT_TRUE(report.has_rule("link"));
    plan.built_links = {{"B", "A", "C"}};
    EXPECT_TRUE(check_plan(plan, family, spec, config_c()).ok);
    EXPECT_EQ(recompute_cost(plan, spec), 210.0);
}

TEST(Checker, TrackRuleAndCapViolations) {
    const auto spec = chain_spec(2);
    const auto family = single({make_train("k1", "A", "C", 0, 40)});
    PlanSolution plan;
    plan.built_arcs = {{"A", "B", 1}, {"A", "B", 2}, {"B", "C", 1}};
    plan.built_links = {{"B", "A", "C"}};
    plan.routes[{"base", "k1"}] = {{"A", "B", 2, 0, 10}, {"B", "C", 1, 10, 20}};
    plan.active_scenarios = {"base"};
    plan.active_trains = {{"base", "k1"}};
    EXPECT_TRUE(check_plan(plan, family, spec, BuildConfig::preset('B')).has_rule("track-order"));
    plan.routes[{"base", "k1"}][0].track = 1;
    plan.reductions[{"A", "B"}] = {3, 0};
    plan.routes[{"base", "k1"}][0].arrival = 7;
    plan.routes[{"base", "k1"}][1] = {"B", "C", 1, 7, 17};
    EXPECT_TRUE(check_plan(plan, family, spec, BuildConfig::preset('B')).has_rule("reduction-cap"));
}

TEST(Cost, RecomputeExamples) {
    PlanSolution plan;
    const auto spec = chain_spec();
    EXPECT_EQ(recompute_cost(plan, spec), 0.0);
    plan.built_arcs = {{"A", "B", 1}, {"B", "C", 1}};
    plan.built_links = {{"B", "A", "C"}};
    EXPECT_EQ(recompute_cost(plan, spec), 210.0);
    EXPECT_EQ(infrastructure_cost(plan, spec), 210.0);
}

TEST(Oracle, ForcedChain) {
    const auto result = brute_force_optimum(single({make_train("k1", "A", "C", 0, 40)}), chain_spec(), config_c(),
                                            false);
    ASSERT_TRUE(result.feasible);
    EXPECT_EQ(result.cost, 210.0);
}

TEST(Oracle, ForcedMeetNeedsSecondTrack) {
    const InfrastructureSpec spec({{"A", 0, 1}, {"B", 0, 1}}, {make_section("A", "B", 10, 100.0, 2, 5)}, {});
    const auto family = single({make_train("k1", "A", "B", 0, 12), make_train("k2", "B", "A", 0, 12)});
    const auto result = brute_force_optimum(family, spec, config_c(), false);
    ASSERT_TRUE(result.feasible);
    EXPECT_EQ(result.cost, 200.0);
    EXPECT_EQ(result.plan.built_arcs.size(), 2u);
    EXPECT_TRUE(check_plan(result.plan, family, spec, config_c()).ok);
}

TEST(Oracle, RefusesLargeInstances) {
    GeneratorParams p;
    p.nodes = 7;
    p.sections = 7;
    const Instance inst = generate_instance(1, p);
    EXPECT_THROW(brute_force_optimum(inst.family, inst.spec, inst.config, false), OracleRefusal);
}

TEST(Oracle, TrackRulesAreConservative) {
    for (int seed = 1; seed <= 10; ++seed) {
        Instance inst = generate_instance(seed, suite_params(seed, 'A'));
        const auto with = brute_force_optimum(inst.family, inst.spec, inst.config, false);
        inst.config.track_rules = false;
        const auto without = brute_force_optimum(inst.family, inst.spec, inst.config, false);
        ASSERT_EQ(with.feasible, without.feasible);
        if (with.feasible) {
            EXPECT_GE(with.cost, without.cost) << seed;
        }
    }
}

TEST(Extraction, FractionalBinaryIsRejected) {
    Instance inst;
    inst.spec = chain_spec();
    inst.family = single({make_train("k1", "A", "C", 0, 40)});
    inst.config = BuildConfig::preset('B');
    const MilpModel m = build_model(inst, false).model;
    auto sol = solve_branch_and_bound(m);
    ASSERT_TRUE(sol.has_solution());
    const auto plan = extract_plan(sol, m, inst.family);
    EXPECT_EQ(plan.routes.size(), 1u);
    EXPECT_EQ(plan.built_arcs.size(), 2u);
    sol.values[m.require("y(A,B,1)")] = 0.5;
    EXPECT_THROW(extract_plan(sol, m, inst.family), ExtractionError);
}

TEST(Extraction, InactiveScenarioTrainsAreAbsent) {
    for (int seed = 1; seed <= 6; ++seed) {
        GeneratorParams p;
        p.scenarios = 3;
        p.coverage_share = 0.34;
        Instance inst = generate_instance(seed, p);
        const auto result = run_pipeline(inst);
        ASSERT_TRUE(result.plan) << seed;
        for (const auto& [key, route] : result.plan->routes)
            EXPECT_TRUE(result.plan->active_scenarios.count(key.scenario)) << key.scenario;
        for (const auto& key : result.plan->active_trains)
            EXPECT_TRUE(result.plan->active_scenarios.count(key.scenario));
        EXPECT_TRUE(result.validation.ok);
    }
}

TEST(CheckerProperty, SolverPlansPassAndCostsAgree) {
    for (int seed = 1; seed <= 15; ++seed) {
        const Instance inst = generate_instance(seed, suite_params(seed, "ABC"[seed % 3]));
        const auto result = run_pipeline(inst);
        ASSERT_TRUE(result.plan) << seed;
        EXPECT_TRUE(result.validation.ok) << seed;
        EXPECT_NEAR(result.recomputed_cost, result.objective, 1e-6);
        EXPECT_NEAR(recompute_cost(*result.plan, inst.spec, &inst.family), result.objective, 1e-6);
    }
}

TEST(CheckerProperty, MutationsTripTheirRuleFamily) {
    int total = 0;
    for (int seed = 1; seed <= 6; ++seed) {
        const Instance inst = generate_instance(seed, suite_params(seed));
        const auto result = run_pipeline(inst);
        ASSERT_TRUE(result.plan);
        for (const auto& m : plan_mutations(*result.plan, inst.family)) {
            const auto report = check_plan(m.plan, inst.family, inst.spec, inst.config);
            EXPECT_FALSE(report.ok) << seed << " " << m.label;
            EXPECT_TRUE(report.has_rule(m.rule)) << seed << " " << m.label << " expected " << m.rule;
            ++total;
        }
    }
    EXPECT_GT(total, 100);
}
