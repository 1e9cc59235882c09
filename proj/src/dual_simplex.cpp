#include "dual_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "railnet/solve.hpp"

namespace railnet::detail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPrimalTol = 1e-7;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kDropTol = 1e-12;
constexpr int kRefactorInterval = 150;
constexpr int kDegenerateLimit = 50;
constexpr double kBlandPivotTol = 1e-7;
}  // namespace

std::shared_ptr<const LpProblem> LpProblem::from_model(const MilpModel& model) {
    auto lp = std::make_shared<LpProblem>();
    lp->structurals = static_cast<int>(model.variables().size());
    lp->rows = static_cast<int>(model.constraints().size());
    for (const auto& v : model.variables()) {
        if (!std::isfinite(v.lower) || !std::isfinite(v.upper))
            throw SolverError("variable " + v.name + " is not finitely bounded");
        lp->cost.push_back(v.objective);
        lp->lower.push_back(v.lower);
        lp->upper.push_back(v.upper);
    }
    for (const auto& c : model.constraints()) {
        lp->row_terms.push_back(c.terms);
        lp->rhs.push_back(c.rhs);
        switch (c.sense) {
            case ConstraintSense::LessEqual:
                lp->lower.push_back(0.0);
                lp->upper.push_back(kInf);
                break;
            case ConstraintSense::GreaterEqual:
                lp->lower.push_back(-kInf);
                lp->upper.push_back(0.0);
                break;
            case ConstraintSense::Equal:
                lp->lower.push_back(0.0);
                lp->upper.push_back(0.0);
                break;
        }
    }
    return lp;
}

DualSimplex::DualSimplex(std::shared_ptr<const LpProblem> problem, bool slack_start)
    : problem_(std::move(problem)),
      rows_(problem_->rows),
      columns_(problem_->structurals + problem_->rows),
      lower_(problem_->lower),
      upper_(problem_->upper) {
    if (slack_start)
        reset_to_slack_basis();
    else
        state_.assign(columns_, ColumnState::Basic);
}

double DualSimplex::nonbasic_value(int col) const {
    return state_[col] == ColumnState::AtUpper ? upper_[col] : lower_[col];
}

void DualSimplex::reset_to_slack_basis() {
    const int n = problem_->structurals;
    state_.assign(columns_, ColumnState::Basic);
    for (int j = 0; j < n; ++j)
        state_[j] = problem_->cost[j] >= 0.0 ? ColumnState::AtLower : ColumnState::AtUpper;
    const bool ok = load_basis({state_});
    (void)ok;  // the slack basis is the identity
}

bool DualSimplex::load_basis(const Basis& basis) {
    const int n = problem_->structurals;
    if (static_cast<int>(basis.state.size()) != columns_) return false;
    tableau_.assign(static_cast<std::size_t>(rows_) * columns_, 0.0);
    std::vector<double> rhs = problem_->rhs;
    for (int i = 0; i < rows_; ++i) {
        for (const auto& t : problem_->row_terms[i]) at(i, t.variable) += t.coefficient;
        at(i, n + i) = 1.0;
    }
    basic_of_row_.assign(rows_, -1);
    std::vector<char> row_taken(rows_, 0);
    for (int i = 0; i < rows_; ++i)
        if (basis.state[n + i] == ColumnState::Basic) {
            basic_of_row_[i] = n + i;
            row_taken[i] = 1;
        }
    std::vector<int> structural_basics;
    for (int j = 0; j < n; ++j)
        if (basis.state[j] == ColumnState::Basic) structural_basics.push_back(j);
    const auto free_rows = std::count(row_taken.begin(), row_taken.end(), 0);
    if (static_cast<long>(structural_basics.size()) != free_rows) return false;

    for (int j : structural_basics) {
        int best = -1;
        double best_abs = 1e-9;
        for (int i = 0; i < rows_; ++i) {
            if (row_taken[i]) continue;
            const double v = std::abs(at(i, j));
            if (v > best_abs) {
                best_abs = v;
                best = i;
            }
        }
        if (best < 0) return false;
        row_taken[best] = 1;
        basic_of_row_[best] = j;
        const double inv = 1.0 / at(best, j);
        double* prow = &tableau_[static_cast<std::size_t>(best) * columns_];
        pivot_row_nonzeros_.clear();
        for (int c = 0; c < columns_; ++c) {
            if (prow[c] == 0.0) continue;
            prow[c] *= inv;
            if (std::abs(prow[c]) < kDropTol)
                prow[c] = 0.0;
            else
                pivot_row_nonzeros_.push_back(c);
        }
        rhs[best] *= inv;
        prow[j] = 1.0;
        for (int i = 0; i < rows_; ++i) {
            if (i == best) continue;
            const double f = at(i, j);
            if (f == 0.0) continue;
            double* row = &tableau_[static_cast<std::size_t>(i) * columns_];
            for (int c : pivot_row_nonzeros_) {
                row[c] -= f * prow[c];
                if (std::abs(row[c]) < kDropTol) row[c] = 0.0;
            }
            row[j] = 0.0;
            rhs[i] -= f * rhs[best];
        }
    }
    state_ = basis.state;
    recompute_basic_values(rhs);
    recompute_reduced_costs();
    // Keep the start dual feasible: boxed columns may sit on either bound.
    bool flipped = false;
    for (int j = 0; j < columns_; ++j) {
        if (state_[j] == ColumnState::AtLower && reduced_[j] < -kDualTol && std::isfinite(upper_[j])) {
            state_[j] = ColumnState::AtUpper;
            flipped = true;
        } else if (state_[j] == ColumnState::AtUpper && reduced_[j] > kDualTol && std::isfinite(lower_[j])) {
            state_[j] = ColumnState::AtLower;
            flipped = true;
        }
    }
    if (flipped) recompute_basic_values(rhs);
    pivots_since_factor_ = 0;
    return true;
}

void DualSimplex::recompute_basic_values(const std::vector<double>& transformed_rhs) {
    beta_ = transformed_rhs;
    for (int j = 0; j < columns_; ++j) {
        if (state_[j] == ColumnState::Basic) continue;
        const double v = nonbasic_value(j);
        if (v == 0.0) continue;
        for (int i = 0; i < rows_; ++i) beta_[i] -= at(i, j) * v;
    }
}

void DualSimplex::recompute_reduced_costs() {
    const int n = problem_->structurals;
    reduced_.assign(columns_, 0.0);
    for (int j = 0; j < n; ++j) reduced_[j] = problem_->cost[j];
    for (int i = 0; i < rows_; ++i) {
        const int b = basic_of_row_[i];
        const double cb = b < n ? problem_->cost[b] : 0.0;
        if (cb == 0.0) continue;
        for (int j = 0; j < columns_; ++j) reduced_[j] -= cb * at(i, j);
    }
    for (int i = 0; i < rows_; ++i) reduced_[basic_of_row_[i]] = 0.0;
}

void DualSimplex::set_bounds(int column, double lower, double upper) {
    if (state_[column] != ColumnState::Basic) {
        const double old = nonbasic_value(column);
        lower_[column] = lower;
        upper_[column] = upper;
        const double delta = nonbasic_value(column) - old;
        if (delta != 0.0)
            for (int i = 0; i < rows_; ++i) beta_[i] -= at(i, column) * delta;
    } else {
        lower_[column] = lower;
        upper_[column] = upper;
    }
}

void DualSimplex::pivot(int r, int q, double target) {
    const double alpha = at(r, q);
    const int leaving = basic_of_row_[r];
    const double delta = (beta_[r] - target) / alpha;
    const double entering_value = nonbasic_value(q);
    for (int i = 0; i < rows_; ++i)
        if (i != r) beta_[i] -= at(i, q) * delta;
    beta_[r] = entering_value + delta;

    double* prow = &tableau_[static_cast<std::size_t>(r) * columns_];
    const double dq = reduced_[q] / alpha;
    pivot_row_nonzeros_.clear();
    for (int c = 0; c < columns_; ++c)
        if (prow[c] != 0.0) pivot_row_nonzeros_.push_back(c);
    for (int c : pivot_row_nonzeros_) reduced_[c] -= dq * prow[c];
    reduced_[q] = 0.0;

    const double inv = 1.0 / alpha;
    for (int c : pivot_row_nonzeros_) prow[c] *= inv;
    prow[q] = 1.0;
    for (int i = 0; i < rows_; ++i) {
        if (i == r) continue;
        double* row = &tableau_[static_cast<std::size_t>(i) * columns_];
        const double f = row[q];
        if (f == 0.0) continue;
        for (int c : pivot_row_nonzeros_) {
            row[c] -= f * prow[c];
            if (std::abs(row[c]) < kDropTol) row[c] = 0.0;
        }
        row[q] = 0.0;
    }
    state_[leaving] = target == lower_[leaving] ? ColumnState::AtLower : ColumnState::AtUpper;
    state_[q] = ColumnState::Basic;
    basic_of_row_[r] = q;
    ++iterations_;
    ++pivots_since_factor_;
}

DualSimplex::Result DualSimplex::run() {
    const long long max_iterations = 50LL * (rows_ + columns_) + 1000;
    int degenerate_run = 0;
    for (long long iter = 0; iter < max_iterations; ++iter) {
        if (pivots_since_factor_ >= kRefactorInterval) {
            if (!load_basis({state_})) throw SolverError("basis became singular");
        }
        // Long degenerate stretches switch to Bland's smallest-index rule.
        const bool bland = degenerate_run > kDegenerateLimit;
        int r = -1;
        double worst = kPrimalTol;
        int smallest = columns_;
        for (int i = 0; i < rows_; ++i) {
            const int b = basic_of_row_[i];
            const double infeas = std::max(lower_[b] - beta_[i], beta_[i] - upper_[b]);
            if (infeas <= kPrimalTol) continue;
            if (bland) {
                if (b < smallest) {
                    smallest = b;
                    r = i;
                }
            } else if (infeas > worst) {
                worst = infeas;
                r = i;
            }
        }
        if (r < 0) return Result::Optimal;
        const int leaving = basic_of_row_[r];
        const bool to_lower = beta_[r] < lower_[leaving];
        const double target = to_lower ? lower_[leaving] : upper_[leaving];

        // Harris two-pass ratio test.
        const double* prow = &tableau_[static_cast<std::size_t>(r) * columns_];
        double theta_max = std::numeric_limits<double>::infinity();
        auto eligible = [&](int j, double alpha) {
            if (state_[j] == ColumnState::Basic || lower_[j] == upper_[j]) return false;
            const bool at_lower = state_[j] == ColumnState::AtLower;
            if (to_lower) return at_lower ? alpha < -kPivotTol : alpha > kPivotTol;
            return at_lower ? alpha > kPivotTol : alpha < -kPivotTol;
        };
        auto dual_slack = [&](int j) {
            return state_[j] == ColumnState::AtLower ? std::max(reduced_[j], 0.0) : std::max(-reduced_[j], 0.0);
        };
        for (int j = 0; j < columns_; ++j) {
            const double alpha = prow[j];
            if (alpha == 0.0 || !eligible(j, alpha)) continue;
            theta_max = std::min(theta_max, (dual_slack(j) + kDualTol) / std::abs(alpha));
        }
        if (!std::isfinite(theta_max)) return Result::Infeasible;
        int q = -1;
        double best_alpha = 0.0;
        if (bland) {
            double best_ratio = std::numeric_limits<double>::infinity();
            for (int j = 0; j < columns_; ++j) {
                const double alpha = prow[j];
                if (alpha == 0.0 || !eligible(j, alpha) || std::abs(alpha) < kBlandPivotTol) continue;
                const double ratio = dual_slack(j) / std::abs(alpha);
                if (ratio < best_ratio - kDualTol) {
                    best_ratio = ratio;
                    q = j;
                }
            }
        }
        if (q < 0) {
            for (int j = 0; j < columns_; ++j) {
                const double alpha = prow[j];
                if (alpha == 0.0 || !eligible(j, alpha)) continue;
                if (dual_slack(j) / std::abs(alpha) <= theta_max && std::abs(alpha) > best_alpha) {
                    best_alpha = std::abs(alpha);
                    q = j;
                }
            }
        }
        const double step = dual_slack(q) / std::abs(prow[q]);
        degenerate_run = step <= kDualTol ? degenerate_run + 1 : 0;
        pivot(r, q, target);
    }
    throw SolverError("dual simplex iteration limit reached");
}

DualSimplex::Result DualSimplex::solve() {
    Result res = run();
    if (res == Result::Infeasible && pivots_since_factor_ > 0) {
        // Confirm on a fresh factorisation before trusting the verdict.
        if (!load_basis({state_})) reset_to_slack_basis();
        res = run();
    }
    return res;
}

std::vector<double> DualSimplex::primal() const {
    const int n = problem_->structurals;
    std::vector<double> x(n);
    for (int j = 0; j < n; ++j)
        if (state_[j] != ColumnState::Basic) x[j] = nonbasic_value(j);
    for (int i = 0; i < rows_; ++i)
        if (basic_of_row_[i] < n) x[basic_of_row_[i]] = beta_[i];
    return x;
}

double DualSimplex::objective() const {
    const auto x = primal();
    double obj = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) obj += problem_->cost[j] * x[j];
    return obj;
}

}  // namespace railnet::detail
