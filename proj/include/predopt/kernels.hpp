#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace predopt {

struct KernelConfig {
    bool use_openmp = true;
    std::size_t min_parallel_work = 16384;
};

struct SparseVec {
    std::vector<int> idx;
    std::vector<double> val;

    std::size_t size() const { return idx.size(); }
    void clear() {
        idx.clear();
        val.clear();
    }
    void push(int j, double v) {
        idx.push_back(j);
        val.push_back(v);
    }
    double at(int j) const;
};

struct SparseWorkspace {
    std::vector<SparseVec> scratch;
};

void eliminate_rows_serial(std::span<SparseVec> rows, std::span<const std::size_t> targets,
                           std::span<const double> factors, const SparseVec& pivot, int pivot_col,
                           double drop_tol, SparseWorkspace& ws);

void eliminate_rows_omp(std::span<SparseVec> rows, std::span<const std::size_t> targets,
                        std::span<const double> factors, const SparseVec& pivot, int pivot_col,
                        double drop_tol, SparseWorkspace& ws);

void eliminate_rows(const KernelConfig& config, std::span<SparseVec> rows,
                    std::span<const std::size_t> targets, std::span<const double> factors,
                    const SparseVec& pivot, int pivot_col, double drop_tol, SparseWorkspace& ws);

void signed_row_sum_serial(std::span<const SparseVec> rows, std::size_t width,
                           std::span<const std::size_t> plus_rows,
                           std::span<const std::size_t> minus_rows, double* out);

void signed_row_sum_omp(std::span<const SparseVec> rows, std::size_t width,
                        std::span<const std::size_t> plus_rows,
                        std::span<const std::size_t> minus_rows, double* out);

void signed_row_sum(const KernelConfig& config, std::span<const SparseVec> rows, std::size_t width,
                    std::span<const std::size_t> plus_rows,
                    std::span<const std::size_t> minus_rows, double* out);

}
