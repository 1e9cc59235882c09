#pragma once

/**
 * @file milp.hpp
 * @brief Solver-neutral MILP representation and the network design builders.
 *
 * Variable names are structured as `kind(index,...)`, e.g. `x(k1,A,B,1)`,
 * `y(A,B,2)`, `l(B,A,C)`, `p(k1,0)`, `z_hf(A,B,1,k1,k2)`, `a(k1,A,B,1)`,
 * `r_time(A,B)`, `o_train(s1.k3)`, `o_szo(s1)`. Constraint tags name the
 * model row family they belong to (`eq2` .. `eq39`, `linearization`, `linking`).
 */

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "railnet/core.hpp"
#include "railnet/preprocess.hpp"

namespace railnet {

class BuildError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class VariableDomain { Binary, Integer };

struct MilpVariable {
    int id = -1;
    std::string name;
    VariableDomain domain = VariableDomain::Binary;
    double lower = 0.0;
    double upper = 1.0;
    double objective = 0.0;

    bool operator==(const MilpVariable&) const = default;
};

enum class ConstraintSense { LessEqual, GreaterEqual, Equal };

struct LinearTerm {
    int variable = -1;
    double coefficient = 0.0;

    bool operator==(const LinearTerm&) const = default;
};

struct LinearConstraint {
    std::string name;
    std::string tag;
    std::vector<LinearTerm> terms;
    ConstraintSense sense = ConstraintSense::LessEqual;
    double rhs = 0.0;

    bool operator==(const LinearConstraint&) const = default;
};

/// Minimisation model. Constraint names are `<tag>_<n>` in insertion order.
class MilpModel {
public:
    int add_variable(std::string name, VariableDomain domain, double lower, double upper, double objective = 0.0);
    /// Merges repeated variables and drops zero coefficients.
    void add_constraint(const std::string& tag, std::vector<LinearTerm> terms, ConstraintSense sense, double rhs);
    /// Adds a constraint keeping its given name (used by the text reader).
    void add_named_constraint(LinearConstraint constraint);
    void set_objective_coefficient(int variable, double coefficient);

    const std::vector<MilpVariable>& variables() const { return variables_; }
    const std::vector<LinearConstraint>& constraints() const { return constraints_; }
    const std::map<std::string, int>& provenance() const { return provenance_; }
    std::optional<int> find(const std::string& name) const;
    int require(const std::string& name) const;

    double objective_offset = 0.0;
    Minutes big_m = 0;

    /// Objective value of an assignment (offset included).
    double evaluate_objective(const std::vector<double>& values) const;
    /// Largest bound or row violation of an assignment.
    double max_violation(const std::vector<double>& values) const;

private:
    std::vector<MilpVariable> variables_;
    std::vector<LinearConstraint> constraints_;
    std::unordered_map<std::string, int> lookup_;
    std::map<std::string, int> provenance_;
};

/// Latest arrival over all trains plus the largest headway or crossing time plus one.
Minutes compute_big_m(const TimetableFamily& family, const InfrastructureSpec& spec, const BuildConfig& config);

/// target = f1 * f2 for binary terms: target >= f1 + f2 - 1, target <= f1, target <= f2.
std::array<LinearConstraint, 3> linearize_product(const std::vector<LinearTerm>& target,
                                                  const std::vector<LinearTerm>& f1,
                                                  const std::vector<LinearTerm>& f2);

/**
 * @brief Deterministic single-scenario model.
 *
 * `sets` and `headways` must have been built for a family holding exactly
 * this scenario. Every train of the scenario runs.
 */
MilpModel build_deterministic(const Scenario& scenario, const RelevantSets& sets, const HeadwaySets& headways,
                              const InfrastructureSpec& spec, const BuildConfig& config);

/**
 * @brief Robust model over a timetable family with scenario and train
 *        activation variables and penalty terms.
 */
MilpModel build_robust(const TimetableFamily& family, const RelevantSets& sets, const HeadwaySets& headways,
                       const InfrastructureSpec& spec, const BuildConfig& config);

/// Structured variable name split into kind and arguments.
struct VariableName {
    std::string kind;
    std::vector<std::string> args;
};

std::optional<VariableName> parse_variable_name(const std::string& name);

}  // namespace railnet
