#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace predopt {

// y = intercept + coefficients . features
struct LinearRegressionModel {
    std::vector<double> coefficients;
    double intercept = 0.0;
};

// y = sigmoid(intercept + coefficients . features)
struct LogisticRegressionModel {
    std::vector<double> coefficients;
    double intercept = 0.0;
};

// One dense layer: weights[i][j] is the weight into output neuron i from
// input neuron j.
struct DenseLayer {
    std::vector<std::vector<double>> weights;
    std::vector<double> biases;

    std::size_t out_dim() const { return weights.size(); }
    std::size_t in_dim() const { return weights.empty() ? 0 : weights[0].size(); }
};

// Feed-forward network with ReLU on every hidden layer and an affine output
// layer with exactly one node.
struct NeuralNetworkModel {
    std::vector<DenseLayer> layers;
};

using PredictorFamily =
    std::variant<LinearRegressionModel, LogisticRegressionModel, NeuralNetworkModel>;

// A pre-trained predictive model with a declared feature order. Immutable
// after construction; the forward evaluators are pure functions.
struct Predictor {
    std::string id;
    PredictorFamily family;
    std::vector<std::string> feature_names;

    std::size_t feature_count() const;
    const char* family_name() const;

    // Exact forward evaluation, dispatching on the family.
    double predict(std::span<const double> features) const;

    // Throws std::invalid_argument on dimension inconsistencies or
    // non-finite parameters.
    void validate() const;
};

// Numerically stable logistic function, exact branch for either sign.
double sigmoid(double a);

// log(1 + e^a) without overflow for large |a|.
double softplus(double a);

double linreg_predict(const LinearRegressionModel& m, std::span<const double> features);
double logreg_predict(const LogisticRegressionModel& m, std::span<const double> features);
double nn_forward(const NeuralNetworkModel& m, std::span<const double> features);

// Predictor file schema, one self-describing JSON object per predictor:
//   {"id": ..., "type": "linear_regression", "feature_names": [...],
//    "coefficients": [...], "intercept": ...}
//   {"id": ..., "type": "logistic_regression", ...same fields...}
//   {"id": ..., "type": "neural_network", "feature_names": [...],
//    "layers": [{"weights": [[...], ...], "biases": [...]}, ...]}
Predictor load_predictor(const nlohmann::json& doc);
nlohmann::json save_predictor(const Predictor& p);

// A predictor file holds either one predictor object or an array of them.
std::vector<Predictor> load_predictor_file(const std::string& path);
void save_predictor_file(const std::string& path, std::span<const Predictor> predictors);

} // namespace predopt
