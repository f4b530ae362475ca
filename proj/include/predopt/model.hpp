#pragma once

#include "predopt/milp.hpp"
#include "predopt/predictors.hpp"

#include <string>
#include <unordered_map>
#include <vector>

namespace predopt {

enum class VarKind { continuous, integer_, binary };

struct RegularVariable {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
    VarKind kind = VarKind::continuous;
};

// One predictor input: either a constant or a regular decision variable.
struct Binding {
    bool is_fixed = true;
    double value = 0.0;
    int var = -1;

    static Binding fixed(double v) { return {true, v, -1}; }
    static Binding variable(int var_index) { return {false, 0.0, var_index}; }
};

struct PredictedVariable {
    std::string name;
    std::string predictor_id;
    std::vector<Binding> bindings;
};

struct LinearTerm {
    int var = -1;
    double coeff = 0.0;
};

struct Constraint {
    std::string name;
    std::vector<LinearTerm> terms;
    RowSense sense = RowSense::le;
    double rhs = 0.0;
};

struct Objective {
    bool maximize = true;
    std::vector<LinearTerm> variable_terms;
    std::vector<LinearTerm> predicted_terms;
};

// Keyed collection of predictors shared by models that reference them by id.
class PredictorRegistry {
public:
    void add(Predictor p);
    void load_file(const std::string& path);
    bool contains(const std::string& id) const { return by_id_.count(id) != 0; }
    const Predictor& get(const std::string& id) const;
    std::size_t size() const { return by_id_.size(); }

private:
    std::unordered_map<std::string, Predictor> by_id_;
};

// An optimization model over regular decision variables plus outcome
// variables whose values are produced by predictors.  Regular and predicted
// variables share one name namespace.
class Model {
public:
    std::string name = "model";

    int add_regular_variable(const std::string& name, double lower, double upper,
                             VarKind kind = VarKind::continuous);
    int add_binary_variable(const std::string& name);
    int add_predicted_variable(const std::string& name, const std::string& predictor_id,
                               std::vector<Binding> bindings);
    int add_constraint(const std::string& name, std::vector<LinearTerm> terms, RowSense sense,
                       double rhs);
    void set_objective(bool maximize, std::vector<LinearTerm> variable_terms,
                       std::vector<LinearTerm> predicted_terms);

    int variable_index(const std::string& name) const;
    int predicted_index(const std::string& name) const;

    const std::vector<RegularVariable>& variables() const { return variables_; }
    const std::vector<PredictedVariable>& predicted() const { return predicted_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    const Objective& objective() const { return objective_; }

    // Checks predictor references: ids resolve and binding arity matches.
    void validate(const PredictorRegistry& registry) const;

private:
    void claim_name(const std::string& name);

    std::vector<RegularVariable> variables_;
    std::vector<PredictedVariable> predicted_;
    std::vector<Constraint> constraints_;
    Objective objective_;
    std::unordered_map<std::string, int> names_;
};

nlohmann::json save_model(const Model& model);
Model load_model(const nlohmann::json& doc);
void save_model_file(const std::string& path, const Model& model);
Model load_model_file(const std::string& path);

} // namespace predopt
