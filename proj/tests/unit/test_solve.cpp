#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "railnet/pipeline.hpp"
#include "railnet/solve.hpp"

using namespace railnet;
using namespace railnet::testing;

namespace {

using S = ConstraintSense;

/// Random bounded integer program small enough to enumerate.
MilpModel random_ip(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
    MilpModel m;
    const int binaries = pick(2, 6);
    const int integers = pick(0, 2);
    for (int j = 0; j < binaries; ++j)
        m.add_variable("b" + std::to_string(j), VariableDomain::Binary, 0, 1, pick(-9, 9));
    for (int j = 0; j < integers; ++j)
        m.add_variable("g" + std::to_string(j), VariableDomain::Integer, 0, pick(1, 4), pick(-9, 9));
    const int rows = pick(1, 5);
    for (int r = 0; r < rows; ++r) {
        std::vector<LinearTerm> terms;
        for (int j = 0; j < binaries + integers; ++j)
            if (pick(0, 2) > 0) terms.push_back({j, static_cast<double>(pick(-5, 7))});
        const S sense = pick(0, 4) == 0 ? S::Equal : pick(0, 1) ? S::LessEqual : S::GreaterEqual;
        m.add_constraint("row", terms, sense, pick(-3, 8));
    }
    return m;
}

/// Exhaustive minimum of a random_ip model; nullopt when infeasible.
std::optional<double> enumerate_min(const MilpModel& m) {
    const auto& vars = m.variables();
    std::vector<double> v(vars.size(), 0.0);
    std::optional<double> best;
    auto rec = [&](auto&& self, std::size_t j) -> void {
        if (j == vars.size()) {
            if (m.max_violation(v) <= 1e-9) {
                const double obj = m.evaluate_objective(v);
                if (!best || obj < *best) best = obj;
            }
            return;
        }
        for (double x = vars[j].lower; x <= vars[j].upper; x += 1.0) {
            v[j] = x;
            self(self, j + 1);
        }
    };
    rec(rec, 0);
    return best;
}

MilpModel suite_model(int seed) { return build_model(generate_instance(seed, suite_params(seed)), false).model; }

}  // namespace

TEST(BranchAndBound, SingleBinary) {
    MilpModel m;
    const int x = m.add_variable("x", VariableDomain::Binary, 0, 1, 5.0);
    m.add_constraint("c", {{x, 1.0}}, S::GreaterEqual, 1.0);
    const auto sol = solve_branch_and_bound(m);
    EXPECT_EQ(sol.status, SolveStatus::Optimal);
    EXPECT_EQ(sol.objective, 5.0);
    EXPECT_EQ(sol.gap_percent, 0.0);
}

TEST(BranchAndBound, ContradictoryBoundsAreInfeasible) {
    MilpModel m;
    const int x = m.add_variable("x", VariableDomain::Binary, 0, 1, 1.0);
    m.add_constraint("lo", {{x, 1.0}}, S::GreaterEqual, 1.0);
    m.add_constraint("hi", {{x, 1.0}}, S::LessEqual, 0.0);
    const auto sol = solve_branch_and_bound(m);
    EXPECT_EQ(sol.status, SolveStatus::Infeasible);
    EXPECT_FALSE(sol.has_solution());
}

TEST(BranchAndBound, SmallIntegerProgram) {
    MilpModel m;
    const int x = m.add_variable("x", VariableDomain::Integer, 0, 10, -1.0);
    const int y = m.add_variable("y", VariableDomain::Integer, 0, 10, -1.0);
    m.add_constraint("c1", {{x, 1.0}, {y, 2.0}}, S::LessEqual, 4.0);
    m.add_constraint("c2", {{x, 3.0}, {y, 1.0}}, S::LessEqual, 6.0);
    const auto lp = solve_lp_relaxation(m);
    ASSERT_EQ(lp.status, LpStatus::Optimal);
    EXPECT_NEAR(lp.objective, -2.8, 1e-9);
    const auto sol = solve_branch_and_bound(m);
    ASSERT_EQ(sol.status, SolveStatus::Optimal);
    EXPECT_EQ(sol.objective, -2.0);
    EXPECT_LE(sol.best_bound, sol.objective + 1e-9);
}

TEST(BranchAndBoundProperty, MatchesEnumerationOnRandomPrograms) {
    int feasible = 0;
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
        const MilpModel m = random_ip(seed);
        const auto expected = enumerate_min(m);
        const auto sol = solve_branch_and_bound(m);
        ASSERT_EQ(sol.has_solution(), expected.has_value()) << seed;
        if (!expected) {
            EXPECT_EQ(sol.status, SolveStatus::Infeasible);
            continue;
        }
        ++feasible;
        EXPECT_EQ(sol.status, SolveStatus::Optimal) << seed;
        EXPECT_NEAR(sol.objective, *expected, 1e-9) << seed;
        EXPECT_LE(m.max_violation(sol.values), 1e-9);
        for (const auto& v : m.variables()) EXPECT_EQ(sol.values[v.id], std::round(sol.values[v.id]));
    }
    EXPECT_GT(feasible, 50);
}

TEST(BranchAndBound, DeterministicValues) {
    const MilpModel m = suite_model(4);
    const auto a = solve_branch_and_bound(m);
    const auto b = solve_branch_and_bound(m);
    ASSERT_TRUE(a.has_solution());
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.nodes, b.nodes);
}

TEST(BranchAndBound, NodeLimitReportsBoundAndGap) {
    const MilpModel m = suite_model(13);
    SolveLimits limits;
    limits.node_limit = 1;
    const auto sol = solve_branch_and_bound(m, limits);
    EXPECT_TRUE(sol.status == SolveStatus::Feasible || sol.status == SolveStatus::TimedOutNoSolution ||
                sol.status == SolveStatus::Optimal);
    if (sol.has_solution()) {
        EXPECT_LE(sol.best_bound, sol.objective + 1e-9);
        if (sol.objective > 0) {
            EXPECT_NEAR(sol.gap_percent, (sol.objective - sol.best_bound) / sol.objective * 100.0, 1e-9);
        }
    }
}

TEST(BranchAndBound, WarmStartKeepsOptimum) {
    const MilpModel m = suite_model(6);
    const auto cold = solve_branch_and_bound(m);
    ASSERT_EQ(cold.status, SolveStatus::Optimal);
    const auto warm = solve_branch_and_bound(m, {}, cold.values);
    EXPECT_EQ(warm.status, SolveStatus::Optimal);
    EXPECT_EQ(warm.objective, cold.objective);
    std::vector<double> junk(m.variables().size(), 0.5);
    EXPECT_EQ(solve_branch_and_bound(m, {}, junk).objective, cold.objective);
}

TEST(ModelText, SingleVariableModel) {
    MilpModel m;
    const int x = m.add_variable("x", VariableDomain::Binary, 0, 1, 5.0);
    m.add_constraint("c", {{x, 1.0}}, S::GreaterEqual, 1.0);
    const std::string text = emit_model_text(m);
    EXPECT_NE(text.find("Minimize"), std::string::npos);
    EXPECT_NE(text.find("5 x"), std::string::npos);
    EXPECT_NE(text.find("c_1: x >= 1"), std::string::npos);
    EXPECT_NE(text.find("Binaries"), std::string::npos);
    EXPECT_NE(text.find("End"), std::string::npos);
    EXPECT_EQ(text.find('\r'), std::string::npos);
    const MilpModel back = parse_model_text(text);
    EXPECT_EQ(back.variables(), m.variables());
    EXPECT_EQ(back.constraints(), m.constraints());
}

TEST(ModelText, EmptyModel) {
    const MilpModel m;
    const std::string text = emit_model_text(m);
    const MilpModel back = parse_model_text(text);
    EXPECT_TRUE(back.variables().empty());
    EXPECT_TRUE(back.constraints().empty());
    EXPECT_EQ(emit_model_text(back), text);
}

TEST(ModelText, BuiltModelsRoundTripBitExactly) {
    for (int seed = 1; seed <= 10; ++seed) {
        for (bool robust : {false, true}) {
            const Instance inst = generate_instance(seed, suite_params(seed, "ABC"[seed % 3]));
            const MilpModel m = build_model(inst, robust).model;
            const std::string text = emit_model_text(m);
            const MilpModel back = parse_model_text(text);
            EXPECT_EQ(back.variables(), m.variables()) << seed;
            EXPECT_EQ(back.constraints(), m.constraints()) << seed;
            EXPECT_EQ(back.objective_offset, m.objective_offset);
            EXPECT_EQ(back.big_m, m.big_m);
            EXPECT_EQ(emit_model_text(back), text);
        }
    }
}

TEST(ModelText, ParseErrorsCarryLineNumbers) {
    try {
        parse_model_text("Minimize\n obj: x\nSubject To\n c_0: x >= abc\nEnd\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4);
    }
    EXPECT_THROW(parse_model_text("Minimize\n obj: x\n"), ParseError);
}

TEST(SolutionText, ImportSetsValuesByName) {
    MilpModel m;
    const int x = m.add_variable("x(k1,A,B,1)", VariableDomain::Binary, 0, 1, 3.0);
    m.add_variable("y(A,B,1)", VariableDomain::Binary, 0, 1, 100.0);
    const auto sol = import_solution("# comment\nx(k1,A,B,1) 1\n", m);
    EXPECT_EQ(sol.values[x], 1.0);
    EXPECT_EQ(sol.objective, 3.0);
    ASSERT_EQ(sol.warnings.size(), 1u);
    EXPECT_NE(sol.warnings[0].find("missing"), std::string::npos);
}

TEST(SolutionText, UnknownAndMalformedLines) {
    MilpModel m;
    m.add_variable("x", VariableDomain::Binary, 0, 1, 3.0);
    try {
        import_solution("x 1\nghost 1\n", m);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
    }
    try {
        import_solution("\n\nx one\n", m);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3);
    }
    EXPECT_THROW(import_solution("x 1 2\n", m), ParseError);
    EXPECT_THROW(import_solution("x 1\nx 0\n", m), ParseError);
}

TEST(SolutionText, FormatImportRoundTrip) {
    for (int seed = 1; seed <= 5; ++seed) {
        const MilpModel m = suite_model(seed);
        const auto sol = solve_branch_and_bound(m);
        ASSERT_TRUE(sol.has_solution());
        const auto back = import_solution(format_solution(sol, m), m);
        EXPECT_EQ(back.values, sol.values);
        EXPECT_EQ(back.objective, sol.objective);
        EXPECT_TRUE(back.warnings.empty());
    }
}

TEST(SolutionText, ExternalSolveThroughTextFiles) {
    // Stand-in for an external solver: read the emitted text, solve, write values.
    const MilpModel m = suite_model(8);
    const MilpModel external = parse_model_text(emit_model_text(m));
    const auto ext = solve_branch_and_bound(external);
    const auto imported = import_solution(format_solution(ext, external), m);
    EXPECT_EQ(imported.objective, solve_branch_and_bound(m).objective);
}
