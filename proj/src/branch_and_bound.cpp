#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>

#include "dual_simplex.hpp"
#include "railnet/solve.hpp"

namespace railnet {

using detail::DualSimplex;
using detail::LpProblem;

std::string_view to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal: return "Optimal";
        case SolveStatus::Feasible: return "Feasible";
        case SolveStatus::Infeasible: return "Infeasible";
        case SolveStatus::TimedOutNoSolution: return "TimedOut-NoSolution";
    }
    return "";
}

LpResult solve_lp_relaxation(const MilpModel& model) {
    DualSimplex lp(LpProblem::from_model(model));
    LpResult out;
    out.status = lp.solve() == DualSimplex::Result::Optimal ? LpStatus::Optimal : LpStatus::Infeasible;
    out.iterations = lp.iterations();
    if (out.status == LpStatus::Optimal) {
        out.values = lp.primal();
        out.objective = lp.objective() + model.objective_offset;
    }
    return out;
}

namespace {

constexpr std::size_t kStateCacheBytes = 384u << 20;

struct BoundChange {
    int variable;
    double lower;
    double upper;
};

struct OpenNode {
    double bound = 0.0;
    int depth = 0;
    long long id = 0;
    std::vector<BoundChange> changes;
    detail::Basis basis;
    std::unique_ptr<DualSimplex> state;  ///< cached relaxation, may be empty
};

struct NodeOrder {
    bool operator()(const std::unique_ptr<OpenNode>& l, const std::unique_ptr<OpenNode>& r) const {
        // priority_queue pops the largest; "larger" means worse here.
        if (l->bound != r->bound) return l->bound > r->bound;
        if (l->depth != r->depth) return l->depth < r->depth;
        return l->id > r->id;
    }
};

class BranchAndBound {
public:
    BranchAndBound(const MilpModel& model, const SolveLimits& limits)
        : model_(model), limits_(limits), problem_(LpProblem::from_model(model)) {
        integral_objective_ = true;
        for (const auto& v : model.variables())
            if (v.objective != std::round(v.objective)) integral_objective_ = false;
    }

    /// Seeds the incumbent; ignored unless integral and feasible.
    void seed(const std::vector<double>& start) {
        if (start.size() != model_.variables().size()) return;
        std::vector<double> rounded(start.size());
        for (std::size_t j = 0; j < start.size(); ++j) {
            rounded[j] = std::round(start[j]);
            if (std::abs(rounded[j] - start[j]) > 1e-6) return;
        }
        if (model_.max_violation(rounded) > 1e-6) return;
        incumbent_objective_ = model_.evaluate_objective(rounded);
        incumbent_ = std::move(rounded);
    }

    MilpSolution run() {
        start_ = std::chrono::steady_clock::now();
        MilpSolution out;
        auto root = std::make_unique<DualSimplex>(problem_);
        ++nodes_;
        if (root->solve() == DualSimplex::Result::Infeasible) {
            lp_iterations_ += root->iterations();
            return finish(std::move(out), -std::numeric_limits<double>::infinity(), true);
        }
        auto first = std::make_unique<OpenNode>();
        first->bound = root->objective() + model_.objective_offset;
        first->basis = root->basis();
        if (!consider(*first, *root)) {
            first->state = std::move(root);
            cached_bytes_ += first->state->memory_bytes();
            enqueue(std::move(first));
        } else {
            lp_iterations_ += root->iterations();
        }

        bool exhausted = true;
        while (!queue_.empty() || !dive_.empty()) {
            if (out_of_budget()) {
                exhausted = false;
                break;
            }
            if (incumbent_ && !dive_.empty()) {
                for (auto& n : dive_) queue_.push(std::move(n));
                dive_.clear();
            }
            std::unique_ptr<OpenNode> node;
            if (!dive_.empty()) {
                node = std::move(dive_.back());
                dive_.pop_back();
            } else {
                node = std::move(const_cast<std::unique_ptr<OpenNode>&>(queue_.top()));
                queue_.pop();
            }
            if (node->state) cached_bytes_ -= node->state->memory_bytes();
            if (!can_improve(node->bound)) continue;
            expand(*node);
        }
        double bound = incumbent_ ? *incumbent_objective_ : std::numeric_limits<double>::infinity();
        if (!exhausted) {
            if (!queue_.empty()) bound = std::min(bound, queue_.top()->bound);
            for (const auto& n : dive_) bound = std::min(bound, n->bound);
        }
        return finish(std::move(out), bound, exhausted);
    }

private:
    bool out_of_budget() const {
        if (nodes_ >= limits_.node_limit) return true;
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
        return elapsed.count() >= limits_.time_limit_seconds;
    }

    bool can_improve(double bound) const {
        if (!incumbent_) return true;
        const double inc = *incumbent_objective_;
        double b = bound;
        if (integral_objective_) b = std::ceil(bound - model_.objective_offset - 1e-6) + model_.objective_offset;
        const double tol = std::max(limits_.absolute_gap, limits_.relative_gap * std::abs(inc));
        return b < inc - std::max(tol, 1e-6);
    }

    /// Depth-first until the first incumbent, best-first afterwards.
    void enqueue(std::unique_ptr<OpenNode> node) {
        if (incumbent_)
            queue_.push(std::move(node));
        else
            dive_.push_back(std::move(node));
    }

    bool is_fractional(double v) const { return std::abs(v - std::round(v)) > limits_.integrality_tolerance; }

    /// Branching column or -1 when the relaxation is integral.
    int branching_variable(const std::vector<double>& x) const {
        const auto& vars = model_.variables();
        for (const auto& v : vars)
            if (v.domain == VariableDomain::Binary && is_fractional(x[v.id])) return v.id;
        for (const auto& v : vars)
            if (v.domain == VariableDomain::Integer && is_fractional(x[v.id])) return v.id;
        return -1;
    }

    /// Records an integral relaxation as incumbent; true when the node is closed.
    bool consider(const OpenNode& node, const DualSimplex& lp) {
        const auto x = lp.primal();
        if (branching_variable(x) >= 0) return false;
        std::vector<double> rounded(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) rounded[j] = std::round(x[j]);
        if (model_.max_violation(rounded) > 1e-6) {
            warnings_.push_back("integral relaxation failed verification after rounding");
            return true;
        }
        const double obj = model_.evaluate_objective(rounded);
        (void)node;
        if (!incumbent_ || obj < *incumbent_objective_ - 1e-9) {
            incumbent_ = std::move(rounded);
            incumbent_objective_ = obj;
        }
        return true;
    }

    std::unique_ptr<DualSimplex> restore(const OpenNode& node) {
        auto lp = std::make_unique<DualSimplex>(problem_, false);
        for (const auto& c : node.changes) lp->set_bounds(c.variable, c.lower, c.upper);
        if (!lp->load_basis(node.basis)) {
            lp = std::make_unique<DualSimplex>(problem_);
            for (const auto& c : node.changes) lp->set_bounds(c.variable, c.lower, c.upper);
        }
        if (lp->solve() == DualSimplex::Result::Infeasible) return nullptr;
        return lp;
    }

    void expand(OpenNode& node) {
        std::unique_ptr<DualSimplex> lp = node.state ? std::move(node.state) : restore(node);
        if (!lp) return;
        const long long base_iterations = lp->iterations();
        const auto x = lp->primal();
        const int j = branching_variable(x);
        if (j < 0) {
            consider(node, *lp);
            lp_iterations_ += lp->iterations();
            return;
        }
        const double lo = lp->lower(j);
        const double hi = lp->upper(j);
        const double down_hi = std::floor(x[j]);
        const double up_lo = std::ceil(x[j]);
        // The child nearer to the relaxation value is expanded first while diving.
        const bool up_first = x[j] - down_hi >= 0.5;
        const BoundChange down{j, lo, down_hi};
        const BoundChange up{j, up_lo, hi};
        const BoundChange children[2] = {up_first ? down : up, up_first ? up : down};
        for (int c = 0; c < 2; ++c) {
            const auto& change = children[c];
            std::unique_ptr<DualSimplex> child = c == 0 ? std::make_unique<DualSimplex>(*lp) : std::move(lp);
            child->set_bounds(change.variable, change.lower, change.upper);
            ++nodes_;
            const auto result = child->solve();
            lp_iterations_ += child->iterations() - base_iterations;
            if (result == DualSimplex::Result::Infeasible) continue;
            auto open = std::make_unique<OpenNode>();
            open->bound = child->objective() + model_.objective_offset;
            open->depth = node.depth + 1;
            open->id = ++next_id_;
            if (!can_improve(open->bound)) continue;
            if (consider(*open, *child)) continue;
            open->changes = node.changes;
            open->changes.push_back(change);
            open->basis = child->basis();
            if (cached_bytes_ + child->memory_bytes() <= kStateCacheBytes) {
                cached_bytes_ += child->memory_bytes();
                open->state = std::move(child);
            }
            enqueue(std::move(open));
        }
    }

    MilpSolution finish(MilpSolution out, double bound, bool exhausted) {
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
        out.seconds = elapsed.count();
        out.nodes = nodes_;
        out.lp_iterations = lp_iterations_;
        out.warnings = warnings_;
        if (incumbent_) {
            out.values = *incumbent_;
            out.objective = *incumbent_objective_;
            out.best_bound = exhausted ? out.objective : std::min(bound, out.objective);
            out.status = exhausted ? SolveStatus::Optimal : SolveStatus::Feasible;
            const double denom = std::abs(out.objective);
            out.gap_percent = exhausted || out.objective == out.best_bound
                                  ? 0.0
                                  : (denom > 0 ? (out.objective - out.best_bound) / denom * 100.0 : 100.0);
        } else {
            out.status = exhausted ? SolveStatus::Infeasible : SolveStatus::TimedOutNoSolution;
            out.best_bound = bound;
        }
        return out;
    }

    const MilpModel& model_;
    SolveLimits limits_;
    std::shared_ptr<const LpProblem> problem_;
    bool integral_objective_ = true;
    std::chrono::steady_clock::time_point start_;
    std::priority_queue<std::unique_ptr<OpenNode>, std::vector<std::unique_ptr<OpenNode>>, NodeOrder> queue_;
    std::vector<std::unique_ptr<OpenNode>> dive_;
    std::optional<std::vector<double>> incumbent_;
    std::optional<double> incumbent_objective_;
    std::vector<std::string> warnings_;
    std::size_t cached_bytes_ = 0;
    long long nodes_ = 0;
    long long next_id_ = 0;
    long long lp_iterations_ = 0;
};

}  // namespace

MilpSolution solve_branch_and_bound(const MilpModel& model, const SolveLimits& limits) {
    return BranchAndBound(model, limits).run();
}

MilpSolution solve_branch_and_bound(const MilpModel& model, const SolveLimits& limits,
                                    const std::vector<double>& start) {
    BranchAndBound bb(model, limits);
    bb.seed(start);
    return bb.run();
}

}  // namespace railnet
