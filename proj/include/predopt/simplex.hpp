#pragma once

#include "predopt/interval.hpp"
#include "predopt/kernels.hpp"
#include "predopt/milp.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace predopt {

enum class LpStatus {
    optimal,
    infeasible,
    unbounded,
};

const char* lp_status_name(LpStatus status);

struct LpOptions {
    double feasibility_tol = 1e-7;
    double reduced_cost_tol = 1e-9;
    std::size_t stall_threshold = 100;
    std::size_t max_iterations = 0;
    KernelConfig kernels;
};

struct LpResult {
    LpStatus status = LpStatus::optimal;
    std::vector<double> values;
    double objective = 0.0;
    std::size_t iterations = 0;
};

class SimplexSolver {
public:
    LpResult solve(const Milp& milp, const LpOptions& options = {});
    LpResult solve(const Milp& milp, std::span<const Interval> column_bounds,
                   const LpOptions& options = {});

private:
    std::size_t structural_ = 0;
    std::size_t row_count_ = 0;
    std::size_t width_ = 0;
    bool maximize_ = true;
    LpOptions options_;
    double pivot_rel_col_ = 1e-3;
    double window_cap_ = 256.0;
    std::size_t rebuilds_ = 0;

    std::vector<SparseVec> rows_;
    std::vector<double> cost_row_;
    std::vector<double> sigma_row_;
    SparseWorkspace kernel_ws_;
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<double> value_;
    std::vector<double> cost0_;
    std::vector<double> col_scale_;
    std::vector<double> row_scale_;
    std::vector<std::int8_t> state_;
    std::vector<std::size_t> basic_;
    std::vector<std::int8_t> violated_;
    std::size_t infeasible_rows_ = 0;

    std::vector<double> column_;
    std::vector<std::size_t> targets_;
    std::vector<double> factors_;
    std::vector<std::size_t> plus_rows_;
    std::vector<std::size_t> minus_rows_;
    std::vector<std::size_t> banned_;
    std::vector<std::uint8_t> banned_flags_;

    LpResult run(const Milp& milp, std::span<const Interval> column_bounds);
    void extract_column(std::size_t cand);
    void normalize_pivot_row(std::size_t row, std::size_t entering, double pivot_value);
    bool point_feasible(const Milp& milp, std::span<const Interval> column_bounds,
                        const LpResult& result) const;
    bool consistent(const Milp& milp) const;
    bool rebuild(const Milp& milp);
    bool build(const Milp& milp, std::span<const Interval> column_bounds);
    void crash();
    void resync();
    void rebuild_sigma();
    void refresh_violation(std::size_t row);
    std::size_t price(std::size_t price_row, bool bland, int& direction) const;
    LpResult finish(const Milp& milp, LpStatus status, std::size_t iterations) const;
};

LpResult solve_lp(const Milp& milp, const LpOptions& options = {});

}
