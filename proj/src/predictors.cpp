#include "predopt/predictors.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace predopt {

double sigmoid(double a) {
    // Branch on the sign so the exponential never overflows.
    if (a >= 0.0) {
        return 1.0 / (1.0 + std::exp(-a));
    }
    const double e = std::exp(a);
    return e / (1.0 + e);
}

double softplus(double a) {
    if (a > 0.0)
        return a + std::log1p(std::exp(-a));
    return std::log1p(std::exp(a));
}

double linreg_predict(const LinearRegressionModel& m, std::span<const double> features) {
    if (features.size() != m.coefficients.size())
        throw std::invalid_argument("linreg_predict: feature arity mismatch");
    double acc = m.intercept;
    for (std::size_t l = 0; l < features.size(); ++l)
        acc += m.coefficients[l] * features[l];
    return acc;
}

double logreg_predict(const LogisticRegressionModel& m, std::span<const double> features) {
    if (features.size() != m.coefficients.size())
        throw std::invalid_argument("logreg_predict: feature arity mismatch");
    double logodds = m.intercept;
    for (std::size_t l = 0; l < features.size(); ++l)
        logodds += m.coefficients[l] * features[l];
    return sigmoid(logodds);
}

double nn_forward(const NeuralNetworkModel& m, std::span<const double> features) {
    if (m.layers.empty())
        throw std::invalid_argument("nn_forward: network has no layers");
    if (features.size() != m.layers.front().in_dim())
        throw std::invalid_argument("nn_forward: feature arity mismatch");

    std::vector<double> cur(features.begin(), features.end());
    std::vector<double> next;
    for (std::size_t j = 0; j < m.layers.size(); ++j) {
        const DenseLayer& layer = m.layers[j];
        const bool hidden = j + 1 < m.layers.size();
        next.assign(layer.out_dim(), 0.0);
        for (std::size_t i = 0; i < layer.out_dim(); ++i) {
            double pre = layer.biases[i];
            for (std::size_t k = 0; k < cur.size(); ++k)
                pre += layer.weights[i][k] * cur[k];
            next[i] = hidden ? std::max(0.0, pre) : pre;
        }
        cur.swap(next);
    }
    return cur[0];
}

std::size_t Predictor::feature_count() const {
    return std::visit(
        [](const auto& fam) -> std::size_t {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, NeuralNetworkModel>)
                return fam.layers.empty() ? 0 : fam.layers.front().in_dim();
            else
                return fam.coefficients.size();
        },
        family);
}

const char* Predictor::family_name() const {
    switch (family.index()) {
    case 0: return "linear_regression";
    case 1: return "logistic_regression";
    default: return "neural_network";
    }
}

double Predictor::predict(std::span<const double> features) const {
    return std::visit(
        [&](const auto& fam) -> double {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, LinearRegressionModel>)
                return linreg_predict(fam, features);
            else if constexpr (std::is_same_v<T, LogisticRegressionModel>)
                return logreg_predict(fam, features);
            else
                return nn_forward(fam, features);
        },
        family);
}

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v))
        throw std::invalid_argument(std::string("predictor: non-finite ") + what);
}

void validate_coeffs(const std::vector<double>& coeffs, double intercept) {
    for (double c : coeffs)
        require_finite(c, "coefficient");
    require_finite(intercept, "intercept");
}

void validate_network(const NeuralNetworkModel& nn) {
    if (nn.layers.empty())
        throw std::invalid_argument("neural_network: needs at least one layer");
    std::size_t prev = nn.layers.front().in_dim();
    for (std::size_t j = 0; j < nn.layers.size(); ++j) {
        const DenseLayer& layer = nn.layers[j];
        if (layer.weights.empty())
            throw std::invalid_argument("neural_network: empty layer");
        if (layer.biases.size() != layer.out_dim())
            throw std::invalid_argument("neural_network: bias length mismatch");
        for (const auto& row : layer.weights) {
            if (row.size() != prev)
                throw std::invalid_argument("neural_network: layer dimension inconsistency");
            for (double w : row)
                require_finite(w, "weight");
        }
        for (double b : layer.biases)
            require_finite(b, "bias");
        prev = layer.out_dim();
    }
    if (nn.layers.back().out_dim() != 1)
        throw std::invalid_argument("neural_network: output layer must have exactly one node");
}

} // namespace

void Predictor::validate() const {
    std::visit(
        [](const auto& fam) {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, NeuralNetworkModel>)
                validate_network(fam);
            else
                validate_coeffs(fam.coefficients, fam.intercept);
        },
        family);
    if (feature_names.size() != feature_count())
        throw std::invalid_argument("predictor: feature_names length must equal feature count");
}

Predictor load_predictor(const nlohmann::json& doc) {
    Predictor p;
    p.id = doc.value("id", "");
    const std::string type = doc.at("type").get<std::string>();
    p.feature_names = doc.at("feature_names").get<std::vector<std::string>>();

    if (type == "linear_regression") {
        LinearRegressionModel m;
        m.coefficients = doc.at("coefficients").get<std::vector<double>>();
        m.intercept = doc.at("intercept").get<double>();
        p.family = std::move(m);
    } else if (type == "logistic_regression") {
        LogisticRegressionModel m;
        m.coefficients = doc.at("coefficients").get<std::vector<double>>();
        m.intercept = doc.at("intercept").get<double>();
        p.family = std::move(m);
    } else if (type == "neural_network") {
        NeuralNetworkModel nn;
        for (const auto& layer_doc : doc.at("layers")) {
            DenseLayer layer;
            layer.weights = layer_doc.at("weights").get<std::vector<std::vector<double>>>();
            layer.biases = layer_doc.at("biases").get<std::vector<double>>();
            nn.layers.push_back(std::move(layer));
        }
        p.family = std::move(nn);
    } else {
        throw std::invalid_argument("load_predictor: unknown family tag '" + type + "'");
    }
    p.validate();
    return p;
}

nlohmann::json save_predictor(const Predictor& p) {
    nlohmann::json doc;
    doc["id"] = p.id;
    doc["type"] = p.family_name();
    doc["feature_names"] = p.feature_names;
    std::visit(
        [&](const auto& fam) {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, NeuralNetworkModel>) {
                nlohmann::json layers = nlohmann::json::array();
                for (const DenseLayer& layer : fam.layers)
                    layers.push_back({{"weights", layer.weights}, {"biases", layer.biases}});
                doc["layers"] = std::move(layers);
            } else {
                doc["coefficients"] = fam.coefficients;
                doc["intercept"] = fam.intercept;
            }
        },
        p.family);
    return doc;
}

std::vector<Predictor> load_predictor_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open predictor file: " + path);
    nlohmann::json doc = nlohmann::json::parse(in);
    std::vector<Predictor> out;
    if (doc.is_array()) {
        for (const auto& item : doc)
            out.push_back(load_predictor(item));
    } else {
        out.push_back(load_predictor(doc));
    }
    return out;
}

void save_predictor_file(const std::string& path, std::span<const Predictor> predictors) {
    nlohmann::json doc;
    if (predictors.size() == 1) {
        doc = save_predictor(predictors[0]);
    } else {
        doc = nlohmann::json::array();
        for (const Predictor& p : predictors)
            doc.push_back(save_predictor(p));
    }
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write predictor file: " + path);
    out << doc.dump(2) << "\n";
}

} // namespace predopt
