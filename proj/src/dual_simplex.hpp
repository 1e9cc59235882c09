#pragma once

// Dense bounded-variable dual simplex used for the branch-and-bound relaxations.

#include <cstdint>
#include <memory>
#include <vector>

#include "railnet/milp.hpp"

namespace railnet::detail {

enum class ColumnState : std::uint8_t { Basic, AtLower, AtUpper };

/// Row i reads sum_j a_ij x_j + s_i = b_i with slack s_i bounded by the sense.
struct LpProblem {
    int rows = 0;
    int structurals = 0;
    std::vector<std::vector<LinearTerm>> row_terms;
    std::vector<double> rhs;
    std::vector<double> cost;   ///< structurals only
    std::vector<double> lower;  ///< structurals then slacks
    std::vector<double> upper;

    static std::shared_ptr<const LpProblem> from_model(const MilpModel& model);
};

struct Basis {
    std::vector<ColumnState> state;
};

class DualSimplex {
public:
    /// Without `slack_start` the tableau stays empty until load_basis.
    explicit DualSimplex(std::shared_ptr<const LpProblem> problem, bool slack_start = true);

    /// Bounds of a structural column; keeps nonbasic columns on their bound.
    void set_bounds(int column, double lower, double upper);
    double lower(int column) const { return lower_[column]; }
    double upper(int column) const { return upper_[column]; }

    enum class Result { Optimal, Infeasible };
    Result solve();

    /// Rebuilds the tableau for a basis; false if the basis is singular.
    bool load_basis(const Basis& basis);
    void reset_to_slack_basis();
    Basis basis() const { return {state_}; }

    std::vector<double> primal() const;
    double objective() const;
    long long iterations() const { return iterations_; }
    std::size_t memory_bytes() const { return tableau_.size() * sizeof(double); }

private:
    double& at(int row, int col) { return tableau_[static_cast<std::size_t>(row) * columns_ + col]; }
    double at(int row, int col) const { return tableau_[static_cast<std::size_t>(row) * columns_ + col]; }
    double nonbasic_value(int col) const;
    void pivot(int row, int entering, double target);
    void recompute_basic_values(const std::vector<double>& transformed_rhs);
    void recompute_reduced_costs();
    Result run();

    std::shared_ptr<const LpProblem> problem_;
    int rows_ = 0;
    int columns_ = 0;
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<double> tableau_;
    std::vector<double> beta_;
    std::vector<double> reduced_;
    std::vector<int> basic_of_row_;
    std::vector<ColumnState> state_;
    long long iterations_ = 0;
    int pivots_since_factor_ = 0;
    std::vector<int> pivot_row_nonzeros_;
};

}  // namespace railnet::detail
