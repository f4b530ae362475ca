#pragma once

#include "predopt/milp.hpp"
#include "predopt/simplex.hpp"

#include <cstddef>
#include <limits>
#include <vector>

namespace predopt {

enum class MilpStatus {
    optimal,
    feasible_gap_limit,
    infeasible,
    unbounded,
    node_limit,
};

const char* milp_status_name(MilpStatus status);

struct MilpOptions {
    double gap = 1e-6;
    double integrality_tol = 1e-6;
    std::size_t node_limit = 1000000;
    double time_limit_s = 0.0;
    LpOptions lp;
};

struct Solution {
    MilpStatus status = MilpStatus::infeasible;
    std::vector<double> values;
    double objective = 0.0;
    double bound = 0.0;
    double gap = std::numeric_limits<double>::infinity();
    std::size_t nodes = 0;
    double wall_time_s = 0.0;
};

Solution solve_milp(const Milp& milp, const MilpOptions& options = {});

}
