#include "predopt/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace predopt {

namespace {

constexpr int kEnd = std::numeric_limits<int>::max();

void merge_eliminated(const SparseVec& target, double factor, const SparseVec& pivot,
                      int pivot_col, double drop_tol, SparseVec& out) {
    out.clear();
    const std::size_t na = target.size();
    const std::size_t nb = pivot.size();
    out.idx.reserve(na + nb);
    out.val.reserve(na + nb);
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < na || j < nb) {
        const int ja = i < na ? target.idx[i] : kEnd;
        const int jb = j < nb ? pivot.idx[j] : kEnd;
        if (ja < jb) {
            out.push(ja, target.val[i]);
            ++i;
        } else if (jb < ja) {
            const double v = -factor * pivot.val[j];
            if (jb != pivot_col && std::abs(v) > drop_tol) {
                out.push(jb, v);
            }
            ++j;
        } else {
            const double v = target.val[i] - factor * pivot.val[j];
            if (ja != pivot_col && std::abs(v) > drop_tol) {
                out.push(ja, v);
            }
            ++i;
            ++j;
        }
    }
}

void eliminate_chunk(std::span<SparseVec> rows, std::span<const std::size_t> targets,
                     std::span<const double> factors, const SparseVec& pivot, int pivot_col,
                     double drop_tol, SparseVec& out, std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
        SparseVec& row = rows[targets[k]];
        merge_eliminated(row, factors[k], pivot, pivot_col, drop_tol, out);
        std::swap(row.idx, out.idx);
        std::swap(row.val, out.val);
    }
}

}

double SparseVec::at(int j) const {
    const auto it = std::lower_bound(idx.begin(), idx.end(), j);
    if (it == idx.end() || *it != j) {
        return 0.0;
    }
    return val[static_cast<std::size_t>(it - idx.begin())];
}

void eliminate_rows_serial(std::span<SparseVec> rows, std::span<const std::size_t> targets,
                           std::span<const double> factors, const SparseVec& pivot, int pivot_col,
                           double drop_tol, SparseWorkspace& ws) {
    if (ws.scratch.empty()) {
        ws.scratch.resize(1);
    }
    eliminate_chunk(rows, targets, factors, pivot, pivot_col, drop_tol, ws.scratch[0], 0,
                    targets.size());
}

void eliminate_rows_omp(std::span<SparseVec> rows, std::span<const std::size_t> targets,
                        std::span<const double> factors, const SparseVec& pivot, int pivot_col,
                        double drop_tol, SparseWorkspace& ws) {
#ifdef _OPENMP
    const std::size_t threads = static_cast<std::size_t>(omp_get_max_threads());
    if (ws.scratch.size() < threads) {
        ws.scratch.resize(threads);
    }
    const std::int64_t count = static_cast<std::int64_t>(targets.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < count; ++k) {
        SparseVec& out = ws.scratch[static_cast<std::size_t>(omp_get_thread_num())];
        SparseVec& row = rows[targets[static_cast<std::size_t>(k)]];
        merge_eliminated(row, factors[static_cast<std::size_t>(k)], pivot, pivot_col, drop_tol,
                         out);
        std::swap(row.idx, out.idx);
        std::swap(row.val, out.val);
    }
#else
    eliminate_rows_serial(rows, targets, factors, pivot, pivot_col, drop_tol, ws);
#endif
}

void eliminate_rows(const KernelConfig& config, std::span<SparseVec> rows,
                    std::span<const std::size_t> targets, std::span<const double> factors,
                    const SparseVec& pivot, int pivot_col, double drop_tol, SparseWorkspace& ws) {
    const std::size_t work = targets.size() * (pivot.size() + 8);
    if (config.use_openmp && work >= config.min_parallel_work) {
        eliminate_rows_omp(rows, targets, factors, pivot, pivot_col, drop_tol, ws);
    } else {
        eliminate_rows_serial(rows, targets, factors, pivot, pivot_col, drop_tol, ws);
    }
}

namespace {

void signed_sum_range(std::span<const SparseVec> rows, std::span<const std::size_t> plus_rows,
                      std::span<const std::size_t> minus_rows, double* out, int begin, int end) {
    std::fill(out + begin, out + end, 0.0);
    for (std::size_t i : plus_rows) {
        const SparseVec& row = rows[i];
        for (std::size_t k = 0; k < row.size(); ++k) {
            const int j = row.idx[k];
            if (j >= begin && j < end) {
                out[j] += row.val[k];
            }
        }
    }
    for (std::size_t i : minus_rows) {
        const SparseVec& row = rows[i];
        for (std::size_t k = 0; k < row.size(); ++k) {
            const int j = row.idx[k];
            if (j >= begin && j < end) {
                out[j] -= row.val[k];
            }
        }
    }
}

}

void signed_row_sum_serial(std::span<const SparseVec> rows, std::size_t width,
                           std::span<const std::size_t> plus_rows,
                           std::span<const std::size_t> minus_rows, double* out) {
    signed_sum_range(rows, plus_rows, minus_rows, out, 0, static_cast<int>(width));
}

void signed_row_sum_omp(std::span<const SparseVec> rows, std::size_t width,
                        std::span<const std::size_t> plus_rows,
                        std::span<const std::size_t> minus_rows, double* out) {
#ifdef _OPENMP
#pragma omp parallel
    {
        const int t = omp_get_thread_num();
        const int nt = omp_get_num_threads();
        const int w = static_cast<int>(width);
        const int begin = static_cast<int>((static_cast<std::int64_t>(w) * t) / nt);
        const int end = static_cast<int>((static_cast<std::int64_t>(w) * (t + 1)) / nt);
        if (begin < end) {
            signed_sum_range(rows, plus_rows, minus_rows, out, begin, end);
        }
    }
#else
    signed_row_sum_serial(rows, width, plus_rows, minus_rows, out);
#endif
}

void signed_row_sum(const KernelConfig& config, std::span<const SparseVec> rows, std::size_t width,
                    std::span<const std::size_t> plus_rows,
                    std::span<const std::size_t> minus_rows, double* out) {
    std::size_t work = 0;
    for (std::size_t i : plus_rows) {
        work += rows[i].size();
    }
    for (std::size_t i : minus_rows) {
        work += rows[i].size();
    }
    if (config.use_openmp && work >= config.min_parallel_work) {
        signed_row_sum_omp(rows, width, plus_rows, minus_rows, out);
    } else {
        signed_row_sum_serial(rows, width, plus_rows, minus_rows, out);
    }
}

}
