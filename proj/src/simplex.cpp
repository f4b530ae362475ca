#include "predopt/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace predopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDropTol = 1e-12;
constexpr double kPivotTol = 1e-9;
constexpr double kPivotRelRow = 1e-5;
constexpr double kStepTol = 1e-12;
constexpr double kWindowGrowth = 16.0;
constexpr double kWindowMax = 4096.0;
constexpr std::size_t kMaxBans = 64;
constexpr std::size_t kMaxRebuilds = 32;

enum : std::int8_t { kAtLower = 0, kAtUpper = 1, kFreeNonbasic = 2, kBasic = 3 };

void dense_eliminate(double* out, double factor, const SparseVec& pivot, std::size_t pivot_col) {
    for (std::size_t k = 0; k < pivot.size(); ++k) {
        out[pivot.idx[k]] -= factor * pivot.val[k];
    }
    out[pivot_col] = 0.0;
}

}

const char* lp_status_name(LpStatus status) {
    switch (status) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
    }
    return "unknown";
}

bool SimplexSolver::build(const Milp& milp, std::span<const Interval> column_bounds) {
    structural_ = milp.columns.size();
    row_count_ = milp.rows.size();
    width_ = structural_ + row_count_;

    lower_.assign(width_, -kInf);
    upper_.assign(width_, kInf);
    value_.assign(width_, 0.0);
    state_.assign(width_, kAtLower);
    banned_flags_.assign(width_, 0);
    basic_.assign(row_count_, 0);
    violated_.assign(row_count_, 0);
    column_.assign(row_count_ + 2, 0.0);
    rows_.assign(row_count_, SparseVec{});
    cost_row_.assign(width_, 0.0);
    sigma_row_.assign(width_, 0.0);
    col_scale_.assign(structural_, 1.0);
    row_scale_.assign(row_count_, 1.0);
    infeasible_rows_ = 0;

    std::vector<double> colmin(structural_, kInf);
    std::vector<double> colmax(structural_, 0.0);
    std::vector<double> rowmin(row_count_, kInf);
    std::vector<double> rowmax(row_count_, 0.0);
    for (int round = 0; round < 3; ++round) {
        std::fill(colmin.begin(), colmin.end(), kInf);
        std::fill(colmax.begin(), colmax.end(), 0.0);
        for (std::size_t i = 0; i < row_count_; ++i) {
            for (const RowTerm& term : milp.rows[i].terms) {
                const std::size_t j = static_cast<std::size_t>(term.column);
                const double a = std::abs(term.coeff) * row_scale_[i] * col_scale_[j];
                if (a > 0.0) {
                    colmin[j] = std::min(colmin[j], a);
                    colmax[j] = std::max(colmax[j], a);
                }
            }
        }
        for (std::size_t j = 0; j < structural_; ++j) {
            if (colmax[j] > 0.0) {
                col_scale_[j] *=
                    std::exp2(-std::round(0.5 * (std::log2(colmin[j]) + std::log2(colmax[j]))));
            }
        }
        std::fill(rowmin.begin(), rowmin.end(), kInf);
        std::fill(rowmax.begin(), rowmax.end(), 0.0);
        for (std::size_t i = 0; i < row_count_; ++i) {
            for (const RowTerm& term : milp.rows[i].terms) {
                const std::size_t j = static_cast<std::size_t>(term.column);
                const double a = std::abs(term.coeff) * row_scale_[i] * col_scale_[j];
                if (a > 0.0) {
                    rowmin[i] = std::min(rowmin[i], a);
                    rowmax[i] = std::max(rowmax[i], a);
                }
            }
        }
        for (std::size_t i = 0; i < row_count_; ++i) {
            if (rowmax[i] > 0.0) {
                row_scale_[i] *=
                    std::exp2(-std::round(0.5 * (std::log2(rowmin[i]) + std::log2(rowmax[i]))));
            }
        }
    }
    std::fill(rowmax.begin(), rowmax.end(), 0.0);
    for (std::size_t i = 0; i < row_count_; ++i) {
        for (const RowTerm& term : milp.rows[i].terms) {
            const std::size_t j = static_cast<std::size_t>(term.column);
            rowmax[i] = std::max(rowmax[i],
                                 std::abs(term.coeff) * row_scale_[i] * col_scale_[j]);
        }
    }
    for (std::size_t i = 0; i < row_count_; ++i) {
        if (rowmax[i] > 0.0) {
            row_scale_[i] *= std::exp2(-std::ceil(std::log2(rowmax[i])));
        }
    }

    for (std::size_t j = 0; j < structural_; ++j) {
        double lo = milp.columns[j].lower;
        double hi = milp.columns[j].upper;
        if (!column_bounds.empty()) {
            lo = column_bounds[j].lo;
            hi = column_bounds[j].hi;
        }
        if (lo > hi) {
            if (lo - hi > options_.feasibility_tol) {
                return false;
            }
            hi = lo;
        }
        lo /= col_scale_[j];
        hi /= col_scale_[j];
        lower_[j] = lo;
        upper_[j] = hi;
        if (std::isfinite(lo)) {
            state_[j] = kAtLower;
            value_[j] = lo;
        } else if (std::isfinite(hi)) {
            state_[j] = kAtUpper;
            value_[j] = hi;
        } else {
            state_[j] = kFreeNonbasic;
            value_[j] = 0.0;
        }
    }

    std::vector<std::pair<int, double>> entries;
    for (std::size_t i = 0; i < row_count_; ++i) {
        entries.clear();
        for (const RowTerm& term : milp.rows[i].terms) {
            entries.emplace_back(term.column, term.coeff);
        }
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        SparseVec& row = rows_[i];
        row.clear();
        const double rs = row_scale_[i];
        double activity = 0.0;
        for (std::size_t k = 0; k < entries.size();) {
            const int col = entries[k].first;
            double coeff = 0.0;
            while (k < entries.size() && entries[k].first == col) {
                coeff += entries[k].second;
                ++k;
            }
            const double v = -coeff * rs * col_scale_[static_cast<std::size_t>(col)];
            if (v != 0.0) {
                row.push(col, v);
                activity -= v * value_[static_cast<std::size_t>(col)];
            }
        }
        const std::size_t slack = structural_ + i;
        row.push(static_cast<int>(slack), 1.0);
        lower_[slack] = milp.rows[i].lower * rs;
        upper_[slack] = milp.rows[i].upper * rs;
        value_[slack] = activity;
        state_[slack] = kBasic;
        basic_[i] = slack;
    }

    cost0_.assign(width_, 0.0);
    for (std::size_t j = 0; j < structural_; ++j) {
        const double c = milp.columns[j].objective * col_scale_[j];
        cost0_[j] = milp.maximize ? -c : c;
    }
    std::copy(cost0_.begin(), cost0_.end(), cost_row_.begin());

    for (std::size_t i = 0; i < row_count_; ++i) {
        refresh_violation(i);
    }
    rebuild_sigma();
    return true;
}

void SimplexSolver::resync() {
    for (std::size_t i = 0; i < row_count_; ++i) {
        const SparseVec& row = rows_[i];
        double acc = 0.0;
        for (std::size_t k = 0; k < row.size(); ++k) {
            const std::size_t j = static_cast<std::size_t>(row.idx[k]);
            if (state_[j] != kBasic) {
                acc -= row.val[k] * value_[j];
            }
        }
        value_[basic_[i]] = acc;
    }
    std::copy(cost0_.begin(), cost0_.end(), cost_row_.begin());
    for (std::size_t i = 0; i < row_count_; ++i) {
        const double cb = cost0_[basic_[i]];
        if (cb == 0.0) {
            continue;
        }
        const SparseVec& row = rows_[i];
        for (std::size_t k = 0; k < row.size(); ++k) {
            cost_row_[row.idx[k]] -= cb * row.val[k];
        }
    }
    for (std::size_t i = 0; i < row_count_; ++i) {
        refresh_violation(i);
    }
    rebuild_sigma();
}

bool SimplexSolver::consistent(const Milp& milp) const {
    const double tol = 10.0 * options_.feasibility_tol;
    for (std::size_t i = 0; i < row_count_; ++i) {
        double activity = 0.0;
        for (const RowTerm& term : milp.rows[i].terms) {
            const std::size_t j = static_cast<std::size_t>(term.column);
            activity += term.coeff * value_[j] * col_scale_[j];
        }
        const double claimed = value_[structural_ + i];
        const double scaled = activity * row_scale_[i];
        if (std::abs(scaled - claimed) > tol * (1.0 + std::abs(claimed))) {
            return false;
        }
    }
    return true;
}

void SimplexSolver::extract_column(std::size_t cand) {
    const int j = static_cast<int>(cand);
    for (std::size_t i = 0; i < row_count_; ++i) {
        column_[i] = rows_[i].at(j);
    }
    column_[row_count_] = cost_row_[cand];
    column_[row_count_ + 1] = sigma_row_[cand];
}

void SimplexSolver::normalize_pivot_row(std::size_t row, std::size_t entering,
                                        double pivot_value) {
    SparseVec& pivot = rows_[row];
    double row_peak = 0.0;
    for (double v : pivot.val) {
        row_peak = std::max(row_peak, std::abs(v));
    }
    const double drop = kDropTol * std::max(1.0, row_peak / std::abs(pivot_value));
    const int enter_col = static_cast<int>(entering);
    std::size_t w = 0;
    for (std::size_t k = 0; k < pivot.size(); ++k) {
        if (pivot.idx[k] == enter_col) {
            continue;
        }
        const double v = pivot.val[k] / pivot_value;
        if (std::abs(v) <= drop) {
            continue;
        }
        pivot.idx[w] = pivot.idx[k];
        pivot.val[w] = v;
        ++w;
    }
    pivot.idx.resize(w);
    pivot.val.resize(w);
    const auto it = std::lower_bound(pivot.idx.begin(), pivot.idx.end(), enter_col);
    const std::size_t pos = static_cast<std::size_t>(it - pivot.idx.begin());
    pivot.idx.insert(it, enter_col);
    pivot.val.insert(pivot.val.begin() + static_cast<std::ptrdiff_t>(pos), 1.0);
}

bool SimplexSolver::rebuild(const Milp& milp) {
    std::vector<std::pair<int, double>> entries;
    for (std::size_t i = 0; i < row_count_; ++i) {
        entries.clear();
        for (const RowTerm& term : milp.rows[i].terms) {
            entries.emplace_back(term.column, term.coeff);
        }
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        SparseVec& row = rows_[i];
        row.clear();
        const double rs = row_scale_[i];
        for (std::size_t k = 0; k < entries.size();) {
            const int col = entries[k].first;
            double coeff = 0.0;
            while (k < entries.size() && entries[k].first == col) {
                coeff += entries[k].second;
                ++k;
            }
            const double v = -coeff * rs * col_scale_[static_cast<std::size_t>(col)];
            if (v != 0.0) {
                row.push(col, v);
            }
        }
        row.push(static_cast<int>(structural_ + i), 1.0);
    }
    std::copy(cost0_.begin(), cost0_.end(), cost_row_.begin());

    std::vector<std::uint8_t> slack_in_basis(row_count_, 0);
    std::vector<std::size_t> place;
    for (std::size_t i = 0; i < row_count_; ++i) {
        const std::size_t b = basic_[i];
        if (b >= structural_) {
            slack_in_basis[b - structural_] = 1;
        } else {
            place.push_back(b);
        }
    }
    std::sort(place.begin(), place.end());
    std::vector<std::uint8_t> row_taken(row_count_, 0);
    for (std::size_t i = 0; i < row_count_; ++i) {
        if (slack_in_basis[i]) {
            row_taken[i] = 1;
            basic_[i] = structural_ + i;
        }
    }

    for (std::size_t b : place) {
        const int bcol = static_cast<int>(b);
        for (std::size_t k = 0; k < row_count_; ++k) {
            column_[k] = rows_[k].at(bcol);
        }
        std::size_t pivot_at = row_count_;
        double best = 1e-11;
        for (std::size_t i = 0; i < row_count_; ++i) {
            if (row_taken[i]) {
                continue;
            }
            const double a = std::abs(column_[i]);
            if (a > best) {
                best = a;
                pivot_at = i;
            }
        }
        if (pivot_at == row_count_) {
            return false;
        }
        normalize_pivot_row(pivot_at, b, column_[pivot_at]);
        const SparseVec& pivot_row = rows_[pivot_at];

        targets_.clear();
        factors_.clear();
        for (std::size_t k = 0; k < row_count_; ++k) {
            if (k == pivot_at) {
                continue;
            }
            const double f = column_[k];
            if (std::abs(f) <= kDropTol) {
                continue;
            }
            targets_.push_back(k);
            factors_.push_back(f);
        }
        eliminate_rows(options_.kernels, rows_, targets_, factors_, pivot_row, bcol, kDropTol,
                       kernel_ws_);
        const double fc = cost_row_[b];
        if (std::abs(fc) > kDropTol) {
            dense_eliminate(cost_row_.data(), fc, pivot_row, b);
        }
        row_taken[pivot_at] = 1;
        basic_[pivot_at] = b;
    }
    resync();
    return true;
}

void SimplexSolver::crash() {
    if (infeasible_rows_ == 0) {
        return;
    }
    bool pivoted = false;
    for (std::size_t i = 0; i < row_count_; ++i) {
        if (violated_[i] == 0) {
            continue;
        }
        const std::size_t slack = structural_ + i;
        if (basic_[i] != slack || lower_[slack] != upper_[slack]) {
            continue;
        }
        const SparseVec& probe = rows_[i];
        std::size_t entering = width_;
        double best = 0.0;
        double row_max = 0.0;
        for (std::size_t k = 0; k < probe.size(); ++k) {
            const std::size_t j = static_cast<std::size_t>(probe.idx[k]);
            const double a = std::abs(probe.val[k]);
            row_max = std::max(row_max, a);
            if (j >= structural_ || state_[j] == kBasic) {
                continue;
            }
            if (state_[j] != kFreeNonbasic && !(lower_[j] < upper_[j])) {
                continue;
            }
            if (a > best) {
                best = a;
                entering = j;
            }
        }
        if (entering == width_ || best < kPivotTol || best < kPivotRelRow * row_max) {
            continue;
        }
        extract_column(entering);
        normalize_pivot_row(i, entering, column_[i]);
        const SparseVec& pivot_row = rows_[i];

        targets_.clear();
        factors_.clear();
        for (std::size_t k = 0; k < row_count_; ++k) {
            if (k == i) {
                continue;
            }
            const double f = column_[k];
            if (std::abs(f) <= kDropTol) {
                continue;
            }
            targets_.push_back(k);
            factors_.push_back(f);
        }
        eliminate_rows(options_.kernels, rows_, targets_, factors_, pivot_row,
                       static_cast<int>(entering), kDropTol, kernel_ws_);
        const double fc = column_[row_count_];
        if (std::abs(fc) > kDropTol) {
            dense_eliminate(cost_row_.data(), fc, pivot_row, entering);
        }
        basic_[i] = entering;
        state_[entering] = kBasic;
        state_[slack] = kAtLower;
        value_[slack] = lower_[slack];
        pivoted = true;
    }
    if (pivoted) {
        resync();
    }
}

void SimplexSolver::refresh_violation(std::size_t row) {
    const std::size_t b = basic_[row];
    const double tol = options_.feasibility_tol;
    std::int8_t flag = 0;
    if (value_[b] < lower_[b] - tol * (1.0 + std::abs(lower_[b]))) {
        flag = 1;
    } else if (value_[b] > upper_[b] + tol * (1.0 + std::abs(upper_[b]))) {
        flag = -1;
    }
    if (flag != 0 && violated_[row] == 0) {
        ++infeasible_rows_;
    } else if (flag == 0 && violated_[row] != 0) {
        --infeasible_rows_;
    }
    violated_[row] = flag;
}

void SimplexSolver::rebuild_sigma() {
    plus_rows_.clear();
    minus_rows_.clear();
    for (std::size_t i = 0; i < row_count_; ++i) {
        if (violated_[i] > 0) {
            plus_rows_.push_back(i);
        } else if (violated_[i] < 0) {
            minus_rows_.push_back(i);
        }
    }
    signed_row_sum(options_.kernels, rows_, width_, plus_rows_, minus_rows_, sigma_row_.data());
}

std::size_t SimplexSolver::price(std::size_t price_row, bool bland, int& direction) const {
    const double* price =
        price_row == row_count_ ? cost_row_.data() : sigma_row_.data();
    const double tol = options_.reduced_cost_tol;
    std::size_t best = width_;
    double best_score = tol;
    for (std::size_t j = 0; j < width_; ++j) {
        if (state_[j] == kBasic) {
            continue;
        }
        if (state_[j] != kFreeNonbasic && !(lower_[j] < upper_[j])) {
            continue;
        }
        if (banned_flags_[j] != 0) {
            continue;
        }
        const double d = price[j];
        double score = 0.0;
        int dir = 0;
        if (state_[j] == kAtLower) {
            if (d < -tol) {
                score = -d;
                dir = 1;
            }
        } else if (state_[j] == kAtUpper) {
            if (d > tol) {
                score = d;
                dir = -1;
            }
        } else if (d < -tol) {
            score = -d;
            dir = 1;
        } else if (d > tol) {
            score = d;
            dir = -1;
        }
        if (dir == 0) {
            continue;
        }
        if (bland) {
            direction = dir;
            return j;
        }
        if (score > best_score) {
            best_score = score;
            best = j;
            direction = dir;
        }
    }
    return best;
}

LpResult SimplexSolver::finish(const Milp& milp, LpStatus status, std::size_t iterations) const {
    LpResult result;
    result.status = status;
    result.iterations = iterations;
    result.values.assign(milp.columns.size(), 0.0);
    for (std::size_t j = 0; j < result.values.size(); ++j) {
        result.values[j] = value_[j] * col_scale_[j];
    }
    double objective = 0.0;
    for (std::size_t j = 0; j < result.values.size(); ++j) {
        objective += milp.columns[j].objective * result.values[j];
    }
    result.objective = objective;
    return result;
}

LpResult SimplexSolver::solve(const Milp& milp, const LpOptions& options) {
    return solve(milp, std::span<const Interval>{}, options);
}

LpResult SimplexSolver::solve(const Milp& milp, std::span<const Interval> column_bounds,
                              const LpOptions& options) {
    if (!column_bounds.empty() && column_bounds.size() != milp.columns.size()) {
        throw std::invalid_argument("column bound overrides must match the column count");
    }
    options_ = options;
    pivot_rel_col_ = 1e-4;
    window_cap_ = kWindowMax;
    LpResult result = run(milp, column_bounds);
    if (result.status == LpStatus::optimal && !point_feasible(milp, column_bounds, result)) {
        pivot_rel_col_ = 1e-2;
        window_cap_ = 1.0;
        result = run(milp, column_bounds);
        if (result.status == LpStatus::optimal && !point_feasible(milp, column_bounds, result)) {
            throw std::logic_error("simplex optimum violates the original constraints");
        }
    }
    return result;
}

bool SimplexSolver::point_feasible(const Milp& milp, std::span<const Interval> column_bounds,
                                   const LpResult& result) const {
    const double tol = 10.0 * options_.feasibility_tol;
    for (std::size_t j = 0; j < milp.columns.size(); ++j) {
        double lo = milp.columns[j].lower;
        double hi = milp.columns[j].upper;
        if (!column_bounds.empty()) {
            lo = column_bounds[j].lo;
            hi = column_bounds[j].hi;
        }
        const double v = result.values[j];
        if (v < lo - tol * (1.0 + std::abs(lo)) || v > hi + tol * (1.0 + std::abs(hi))) {
            return false;
        }
    }
    for (const Row& row : milp.rows) {
        double activity = 0.0;
        for (const RowTerm& term : row.terms) {
            activity += term.coeff * result.values[static_cast<std::size_t>(term.column)];
        }
        if (activity < row.lower - tol * (1.0 + std::abs(row.lower)) ||
            activity > row.upper + tol * (1.0 + std::abs(row.upper))) {
            return false;
        }
    }
    return true;
}

LpResult SimplexSolver::run(const Milp& milp, std::span<const Interval> column_bounds) {
    if (!build(milp, column_bounds)) {
        return finish(milp, LpStatus::infeasible, 0);
    }
    rebuilds_ = 0;
    crash();

    const std::size_t cap = options_.max_iterations != 0
                                ? options_.max_iterations
                                : 20000 + 20 * (row_count_ + structural_);
    std::size_t stall = 0;
    std::size_t iterations = 0;
    bool certified = false;
    std::size_t last_rebuild_iter = std::numeric_limits<std::size_t>::max();

    for (;;) {
        if (iterations >= cap) {
            throw std::logic_error("simplex iteration cap exceeded");
        }
        const bool phase_one = infeasible_rows_ > 0;
        const std::size_t price_row = phase_one ? row_count_ + 1 : row_count_;
        const bool bland = stall >= options_.stall_threshold;

        for (std::size_t j : banned_) {
            banned_flags_[j] = 0;
        }
        banned_.clear();
        std::size_t entering = width_;
        int direction = 0;
        double step = 0.0;
        std::size_t leaving_row = row_count_;
        bool ray = false;

        std::size_t alt_entering = width_;
        int alt_direction = 0;
        double alt_pivot = 0.0;

        auto block_t = [&](std::size_t i, int dir) {
            const double a = column_[i];
            if (std::abs(a) <= kDropTol) {
                return kInf;
            }
            const double rate = -dir * a;
            const std::size_t b = basic_[i];
            double t;
            if (violated_[i] > 0) {
                if (rate <= 0.0) {
                    return kInf;
                }
                t = (lower_[b] - value_[b]) / rate;
            } else if (violated_[i] < 0) {
                if (rate >= 0.0) {
                    return kInf;
                }
                t = (value_[b] - upper_[b]) / (-rate);
            } else if (rate > 0.0) {
                if (upper_[b] == kInf) {
                    return kInf;
                }
                t = (upper_[b] - value_[b]) / rate;
            } else {
                if (lower_[b] == -kInf) {
                    return kInf;
                }
                t = (value_[b] - lower_[b]) / (-rate);
            }
            return std::max(t, 0.0);
        };

        double wmult = 1.0;
        bool restart_iteration = false;
        for (;;) {
            bool accept_any = false;
            int dir = 0;
            std::size_t cand = width_;
            bool exhausted = banned_.size() > kMaxBans;
            if (!exhausted) {
                cand = price(price_row, bland, dir);
                exhausted = cand == width_;
            }
            if (exhausted) {
                if (wmult < window_cap_ && !banned_.empty()) {
                    wmult *= kWindowGrowth;
                    for (std::size_t j : banned_) {
                        banned_flags_[j] = 0;
                    }
                    banned_.clear();
                    continue;
                }
                if (alt_entering == width_ || alt_pivot < kPivotTol) {
                    break;
                }
                if (last_rebuild_iter != iterations && rebuilds_ < kMaxRebuilds) {
                    last_rebuild_iter = iterations;
                    ++rebuilds_;
                    if (rebuild(milp)) {
                        restart_iteration = true;
                        break;
                    }
                }
                cand = alt_entering;
                dir = alt_direction;
                accept_any = true;
            }
            extract_column(cand);

            const double own_range = upper_[cand] - lower_[cand];
            double t_min = own_range;
            for (std::size_t i = 0; i < row_count_; ++i) {
                t_min = std::min(t_min, block_t(i, dir));
            }
            if (t_min == kInf) {
                entering = cand;
                direction = dir;
                ray = true;
                break;
            }

            const double window =
                bland ? t_min + 1e-12 : t_min + (1e-9 * (1.0 + t_min) + 1e-12) * wmult;
            leaving_row = row_count_;
            step = t_min;
            if (own_range <= window) {
                step = own_range;
            } else {
                double best_pivot = 0.0;
                for (std::size_t i = 0; i < row_count_; ++i) {
                    const double t = block_t(i, dir);
                    if (t > window) {
                        continue;
                    }
                    const double a = std::abs(column_[i]);
                    if (bland) {
                        if (leaving_row == row_count_ || basic_[i] < basic_[leaving_row]) {
                            leaving_row = i;
                            step = t;
                        }
                    } else if (a > best_pivot ||
                               (a == best_pivot && leaving_row != row_count_ &&
                                basic_[i] < basic_[leaving_row])) {
                        best_pivot = a;
                        leaving_row = i;
                        step = t;
                    }
                }
            }

            if (leaving_row == row_count_ || accept_any) {
                entering = cand;
                direction = dir;
                break;
            }
            const double p = std::abs(column_[leaving_row]);
            const SparseVec& pivot_probe = rows_[leaving_row];
            double row_max = 0.0;
            for (double v : pivot_probe.val) {
                row_max = std::max(row_max, std::abs(v));
            }
            double col_max = 0.0;
            for (std::size_t i = 0; i < row_count_; ++i) {
                col_max = std::max(col_max, std::abs(column_[i]));
            }
            if (p >= kPivotTol && p >= kPivotRelRow * row_max && p >= pivot_rel_col_ * col_max) {
                entering = cand;
                direction = dir;
                break;
            }
            if (p > alt_pivot) {
                alt_pivot = p;
                alt_entering = cand;
                alt_direction = dir;
            }
            banned_.push_back(cand);
            banned_flags_[cand] = 1;
        }

        if (restart_iteration) {
            certified = false;
            continue;
        }
        if (ray || entering == width_) {
            if (!certified) {
                resync();
                certified = true;
                continue;
            }
            if (!consistent(milp)) {
                if (rebuilds_ < kMaxRebuilds) {
                    ++rebuilds_;
                    if (rebuild(milp)) {
                        certified = false;
                        continue;
                    }
                }
                throw std::logic_error("simplex tableau lost the original constraints");
            }
            if (ray) {
                if (phase_one) {
                    throw std::logic_error("phase one ratio test found no blocking bound");
                }
                return finish(milp, LpStatus::unbounded, iterations);
            }
            return finish(milp, phase_one ? LpStatus::infeasible : LpStatus::optimal, iterations);
        }

        ++iterations;
        certified = false;

        std::int8_t leaving_flag = 0;
        if (leaving_row != row_count_) {
            leaving_flag = violated_[leaving_row];
        }

        if (step > 0.0) {
            value_[entering] += direction * step;
            for (std::size_t i = 0; i < row_count_; ++i) {
                const double a = column_[i];
                if (std::abs(a) <= kDropTol) {
                    continue;
                }
                value_[basic_[i]] -= direction * step * a;
                const std::int8_t old_flag = violated_[i];
                refresh_violation(i);
                if (violated_[i] != old_flag) {
                    const double delta = static_cast<double>(violated_[i] - old_flag);
                    const SparseVec& row = rows_[i];
                    for (std::size_t k = 0; k < row.size(); ++k) {
                        sigma_row_[row.idx[k]] += delta * row.val[k];
                    }
                }
            }
        }
        if (step > kStepTol) {
            stall = 0;
        } else {
            ++stall;
        }

        if (leaving_row == row_count_) {
            if (state_[entering] == kAtLower) {
                state_[entering] = kAtUpper;
                value_[entering] = upper_[entering];
            } else {
                state_[entering] = kAtLower;
                value_[entering] = lower_[entering];
            }
        } else {
            const std::size_t leaving = basic_[leaving_row];
            const double rate = -direction * column_[leaving_row];
            const bool to_lower = rate > 0.0 ? leaving_flag > 0 : leaving_flag == 0;
            value_[leaving] = to_lower ? lower_[leaving] : upper_[leaving];
            state_[leaving] = to_lower ? kAtLower : kAtUpper;
            refresh_violation(leaving_row);

            normalize_pivot_row(leaving_row, entering, column_[leaving_row]);
            const SparseVec& pivot_row = rows_[leaving_row];

            targets_.clear();
            factors_.clear();
            for (std::size_t k = 0; k < row_count_; ++k) {
                if (k == leaving_row) {
                    continue;
                }
                const double f = column_[k];
                if (std::abs(f) <= kDropTol) {
                    continue;
                }
                targets_.push_back(k);
                factors_.push_back(f);
            }
            eliminate_rows(options_.kernels, rows_, targets_, factors_, pivot_row,
                           static_cast<int>(entering), kDropTol, kernel_ws_);
            const double fc = column_[row_count_];
            if (std::abs(fc) > kDropTol) {
                dense_eliminate(cost_row_.data(), fc, pivot_row, entering);
            }
            const double fs = sigma_row_[entering];
            if (std::abs(fs) > kDropTol) {
                dense_eliminate(sigma_row_.data(), fs, pivot_row, entering);
            }
            basic_[leaving_row] = entering;
            state_[entering] = kBasic;
        }

        if ((iterations & 511u) == 0u) {
            resync();
        }
    }
}

LpResult solve_lp(const Milp& milp, const LpOptions& options) {
    SimplexSolver solver;
    return solver.solve(milp, options);
}

}
