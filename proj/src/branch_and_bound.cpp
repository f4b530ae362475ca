#include "predopt/branch_and_bound.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <utility>

namespace predopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BoundFix {
    int column = -1;
    double lower = -kInf;
    double upper = kInf;
};

struct Node {
    double bound = kInf;
    std::size_t id = 0;
    std::size_t depth = 0;
    std::vector<BoundFix> fixes;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) {
            return a.bound < b.bound;
        }
        return a.id < b.id;
    }
};

}

const char* milp_status_name(MilpStatus status) {
    switch (status) {
        case MilpStatus::optimal: return "optimal";
        case MilpStatus::feasible_gap_limit: return "feasible-gap-limit";
        case MilpStatus::infeasible: return "infeasible";
        case MilpStatus::unbounded: return "unbounded";
        case MilpStatus::node_limit: return "node-limit";
    }
    return "unknown";
}

Solution solve_milp(const Milp& milp, const MilpOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    if (milp.columns.empty()) {
        throw std::invalid_argument("milp needs at least one column");
    }

    std::vector<int> discrete;
    std::vector<Interval> root(milp.columns.size());
    for (std::size_t j = 0; j < milp.columns.size(); ++j) {
        double lo = milp.columns[j].lower;
        double hi = milp.columns[j].upper;
        if (milp.columns[j].kind != ColumnKind::continuous) {
            if (!std::isfinite(lo) || !std::isfinite(hi)) {
                throw std::invalid_argument("discrete columns need finite bounds");
            }
            lo = std::ceil(lo - options.integrality_tol);
            hi = std::floor(hi + options.integrality_tol);
            discrete.push_back(static_cast<int>(j));
        }
        root[j] = Interval{lo, hi};
    }

    const double sense = milp.maximize ? 1.0 : -1.0;
    SimplexSolver solver;
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    auto rel_gap = [](double bound_score, double incumbent_score) {
        if (incumbent_score == -kInf) {
            return kInf;
        }
        return (bound_score - incumbent_score) / std::max(1.0, std::abs(incumbent_score));
    };

    Solution out;
    double incumbent_score = -kInf;
    std::vector<double> incumbent_values;
    double global_bound_score = kInf;
    bool hit_limit = false;
    bool root_unbounded = false;

    std::priority_queue<Node, std::vector<Node>, NodeOrder> queue;
    std::size_t next_id = 0;
    queue.push(Node{kInf, next_id++, 0, {}});
    std::vector<Interval> bounds(root.size());

    while (!queue.empty()) {
        global_bound_score =
            std::min(global_bound_score, std::max(queue.top().bound, incumbent_score));
        if (rel_gap(global_bound_score, incumbent_score) <= options.gap) {
            break;
        }
        if (options.node_limit != 0 && out.nodes >= options.node_limit) {
            hit_limit = true;
            break;
        }
        if (options.time_limit_s > 0.0 && elapsed() > options.time_limit_s) {
            hit_limit = true;
            break;
        }

        Node node = queue.top();
        queue.pop();
        bounds = root;
        for (const BoundFix& fix : node.fixes) {
            bounds[fix.column].lo = std::max(bounds[fix.column].lo, fix.lower);
            bounds[fix.column].hi = std::min(bounds[fix.column].hi, fix.upper);
        }

        ++out.nodes;
        const LpResult lp = solver.solve(milp, bounds, options.lp);
        if (lp.status == LpStatus::infeasible) {
            continue;
        }
        if (lp.status == LpStatus::unbounded) {
            if (node.depth != 0) {
                throw std::logic_error("relaxation of a restricted node reported unbounded");
            }
            root_unbounded = true;
            break;
        }

        double score = sense * lp.objective;
        if (score > node.bound) {
            score = node.bound;
        }
        if (rel_gap(score, incumbent_score) <= options.gap) {
            continue;
        }

        int branch_col = -1;
        double best_frac = options.integrality_tol;
        for (int j : discrete) {
            const double v = lp.values[static_cast<std::size_t>(j)];
            const double frac = std::abs(v - std::round(v));
            if (frac > best_frac) {
                best_frac = frac;
                branch_col = j;
            }
        }

        if (branch_col < 0) {
            if (score > incumbent_score) {
                incumbent_score = score;
                incumbent_values = lp.values;
            }
            continue;
        }

        const double v = lp.values[static_cast<std::size_t>(branch_col)];
        Node down;
        down.bound = score;
        down.id = next_id++;
        down.depth = node.depth + 1;
        down.fixes = node.fixes;
        down.fixes.push_back(BoundFix{branch_col, -kInf, std::floor(v)});
        Node up;
        up.bound = score;
        up.id = next_id++;
        up.depth = node.depth + 1;
        up.fixes = std::move(node.fixes);
        up.fixes.push_back(BoundFix{branch_col, std::ceil(v), kInf});
        queue.push(std::move(down));
        queue.push(std::move(up));
    }

    out.wall_time_s = elapsed();
    if (root_unbounded) {
        out.status = MilpStatus::unbounded;
        out.objective = 0.0;
        out.bound = milp.maximize ? kInf : -kInf;
        out.gap = kInf;
        return out;
    }
    if (queue.empty() && incumbent_score > -kInf) {
        global_bound_score = std::min(global_bound_score, incumbent_score);
    }
    if (incumbent_score == -kInf) {
        out.status = hit_limit ? MilpStatus::node_limit : MilpStatus::infeasible;
        out.objective = 0.0;
        out.bound = sense * global_bound_score;
        out.gap = kInf;
        return out;
    }
    out.values = std::move(incumbent_values);
    out.objective = sense * incumbent_score;
    out.bound = sense * global_bound_score;
    out.gap = rel_gap(global_bound_score, incumbent_score);
    out.status = out.gap <= options.gap ? MilpStatus::optimal : MilpStatus::feasible_gap_limit;
    return out;
}

}
