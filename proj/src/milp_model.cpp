#include <algorithm>
#include <cmath>

#include "railnet/milp.hpp"

namespace railnet {

int MilpModel::add_variable(std::string name, VariableDomain domain, double lower, double upper, double objective) {
    if (lookup_.count(name)) throw BuildError("duplicate variable name " + name);
    if (!(lower <= upper)) throw BuildError("empty domain for variable " + name);
    const int id = static_cast<int>(variables_.size());
    lookup_.emplace(name, id);
    variables_.push_back({id, std::move(name), domain, lower, upper, objective});
    return id;
}

void MilpModel::add_constraint(const std::string& tag, std::vector<LinearTerm> terms, ConstraintSense sense,
                               double rhs) {
    std::stable_sort(terms.begin(), terms.end(),
                     [](const LinearTerm& l, const LinearTerm& r) { return l.variable < r.variable; });
    std::vector<LinearTerm> merged;
    for (const auto& t : terms) {
        if (t.variable < 0 || t.variable >= static_cast<int>(variables_.size()))
            throw BuildError("constraint " + tag + " references an undeclared variable");
        if (!merged.empty() && merged.back().variable == t.variable)
            merged.back().coefficient += t.coefficient;
        else
            merged.push_back(t);
    }
    std::erase_if(merged, [](const LinearTerm& t) { return t.coefficient == 0.0; });
    // Order terms by first appearance in the input for readable output.
    std::vector<LinearTerm> ordered;
    ordered.reserve(merged.size());
    std::vector<char> used(merged.size(), 0);
    for (const auto& t : terms) {
        auto it = std::lower_bound(merged.begin(), merged.end(), t.variable,
                                   [](const LinearTerm& m, int v) { return m.variable < v; });
        if (it == merged.end() || it->variable != t.variable) continue;
        const auto pos = static_cast<std::size_t>(it - merged.begin());
        if (used[pos]) continue;
        used[pos] = 1;
        ordered.push_back(*it);
    }
    const int n = ++provenance_[tag];
    constraints_.push_back({tag + "_" + std::to_string(n), tag, std::move(ordered), sense, rhs});
}

void MilpModel::add_named_constraint(LinearConstraint constraint) {
    for (const auto& t : constraint.terms)
        if (t.variable < 0 || t.variable >= static_cast<int>(variables_.size()))
            throw BuildError("constraint " + constraint.name + " references an undeclared variable");
    ++provenance_[constraint.tag];
    constraints_.push_back(std::move(constraint));
}

void MilpModel::set_objective_coefficient(int variable, double coefficient) {
    variables_.at(variable).objective = coefficient;
}

std::optional<int> MilpModel::find(const std::string& name) const {
    auto it = lookup_.find(name);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

int MilpModel::require(const std::string& name) const {
    auto id = find(name);
    if (!id) throw BuildError("unknown variable " + name);
    return *id;
}

double MilpModel::evaluate_objective(const std::vector<double>& values) const {
    double total = objective_offset;
    for (const auto& v : variables_) total += v.objective * values.at(v.id);
    return total;
}

double MilpModel::max_violation(const std::vector<double>& values) const {
    double worst = 0.0;
    for (const auto& v : variables_) {
        worst = std::max(worst, v.lower - values.at(v.id));
        worst = std::max(worst, values.at(v.id) - v.upper);
    }
    for (const auto& c : constraints_) {
        double lhs = 0.0;
        for (const auto& t : c.terms) lhs += t.coefficient * values.at(t.variable);
        switch (c.sense) {
            case ConstraintSense::LessEqual: worst = std::max(worst, lhs - c.rhs); break;
            case ConstraintSense::GreaterEqual: worst = std::max(worst, c.rhs - lhs); break;
            case ConstraintSense::Equal: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
        }
    }
    return worst;
}

std::optional<VariableName> parse_variable_name(const std::string& name) {
    const auto open = name.find('(');
    if (open == std::string::npos || open == 0 || name.back() != ')') return std::nullopt;
    VariableName out;
    out.kind = name.substr(0, open);
    std::string inner = name.substr(open + 1, name.size() - open - 2);
    std::size_t start = 0;
    while (true) {
        const auto comma = inner.find(',', start);
        out.args.push_back(inner.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace railnet
