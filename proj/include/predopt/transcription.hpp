#pragma once

#include "predopt/interval.hpp"
#include "predopt/milp.hpp"
#include "predopt/model.hpp"

#include <span>
#include <string>
#include <vector>

namespace predopt {

struct TranscriptionOptions {
    int delta = 10;
    double big_m_margin = 1e-4;
    bool parallel = true;
};

// Pre- and post-activation intervals per layer, layer 0 being the inputs.
struct NodeBounds {
    std::vector<std::vector<Interval>> pre;
    std::vector<std::vector<Interval>> post;
};

NodeBounds propagate_bounds_nn(const NeuralNetworkModel& m, std::span<const Interval> inputs);

Interval logodds_range(const LogisticRegressionModel& m, std::span<const Interval> inputs);

// Exact mean of sigmoid over [lower, upper] via the softplus closed form.
double v_delta(double lower, double upper);

// The block transcribers append one predicted variable's encoding to the
// MILP and return the column holding its value.  Binding.var refers to an
// existing MILP column; that column must have finite bounds.
int transcribe_linreg(Milp& milp, const std::string& var_name, const LinearRegressionModel& m,
                      std::span<const Binding> bindings);
int transcribe_logreg(Milp& milp, const std::string& var_name, const LogisticRegressionModel& m,
                      std::span<const Binding> bindings, int delta = 10);
int transcribe_nn(Milp& milp, const std::string& var_name, const NeuralNetworkModel& m,
                  std::span<const Binding> bindings, double big_m_margin = 1e-4);

struct TranscriptionResult {
    Milp milp;
    std::vector<int> variable_columns;
    std::vector<int> predicted_columns;
};

TranscriptionResult transcribe_model(const Model& model, const PredictorRegistry& registry,
                                     const TranscriptionOptions& options = {});

} // namespace predopt
