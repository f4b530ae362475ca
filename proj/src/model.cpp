#include "predopt/model.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace predopt {

void PredictorRegistry::add(Predictor p) {
    p.validate();
    if (p.id.empty())
        throw std::invalid_argument("predictor registry: predictor needs a non-empty id");
    if (!by_id_.emplace(p.id, p).second)
        throw std::invalid_argument("predictor registry: duplicate id '" + p.id + "'");
}

void PredictorRegistry::load_file(const std::string& path) {
    for (Predictor& p : load_predictor_file(path))
        add(std::move(p));
}

const Predictor& PredictorRegistry::get(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end())
        throw std::invalid_argument("predictor registry: no predictor with id '" + id + "'");
    return it->second;
}

void Model::claim_name(const std::string& name) {
    if (name.empty())
        throw std::invalid_argument("model: variable names must be non-empty");
    if (names_.count(name))
        throw std::invalid_argument("model: duplicate name '" + name + "'");
}

int Model::add_regular_variable(const std::string& name, double lower, double upper,
                                VarKind kind) {
    claim_name(name);
    if (kind == VarKind::binary) {
        lower = 0.0;
        upper = 1.0;
    }
    if (!std::isfinite(lower) || !std::isfinite(upper))
        throw std::invalid_argument("model: variable '" + name + "' needs finite bounds");
    if (lower > upper)
        throw std::invalid_argument("model: variable '" + name + "' has reversed bounds");
    const int index = static_cast<int>(variables_.size());
    variables_.push_back({name, lower, upper, kind});
    names_[name] = index;
    return index;
}

int Model::add_binary_variable(const std::string& name) {
    return add_regular_variable(name, 0.0, 1.0, VarKind::binary);
}

int Model::add_predicted_variable(const std::string& name, const std::string& predictor_id,
                                  std::vector<Binding> bindings) {
    claim_name(name);
    for (const Binding& b : bindings) {
        if (b.is_fixed) {
            if (!std::isfinite(b.value))
                throw std::invalid_argument("model: fixed binding of '" + name +
                                            "' must be finite");
        } else if (b.var < 0 || b.var >= static_cast<int>(variables_.size())) {
            throw std::invalid_argument("model: binding of '" + name +
                                        "' references an unknown variable");
        }
    }
    const int index = static_cast<int>(predicted_.size());
    predicted_.push_back({name, predictor_id, std::move(bindings)});
    names_[name] = -1 - index;
    return index;
}

int Model::add_constraint(const std::string& name, std::vector<LinearTerm> terms, RowSense sense,
                          double rhs) {
    if (!std::isfinite(rhs))
        throw std::invalid_argument("model: constraint '" + name + "' needs a finite rhs");
    for (const LinearTerm& t : terms) {
        if (t.var < 0 || t.var >= static_cast<int>(variables_.size()))
            throw std::invalid_argument("model: constraint '" + name +
                                        "' references an unknown variable");
        if (!std::isfinite(t.coeff))
            throw std::invalid_argument("model: constraint '" + name +
                                        "' has a non-finite coefficient");
    }
    const int index = static_cast<int>(constraints_.size());
    constraints_.push_back({name, std::move(terms), sense, rhs});
    return index;
}

void Model::set_objective(bool maximize, std::vector<LinearTerm> variable_terms,
                          std::vector<LinearTerm> predicted_terms) {
    for (const LinearTerm& t : variable_terms)
        if (t.var < 0 || t.var >= static_cast<int>(variables_.size()))
            throw std::invalid_argument("model: objective references an unknown variable");
    for (const LinearTerm& t : predicted_terms)
        if (t.var < 0 || t.var >= static_cast<int>(predicted_.size()))
            throw std::invalid_argument("model: objective references an unknown predicted variable");
    objective_ = {maximize, std::move(variable_terms), std::move(predicted_terms)};
}

int Model::variable_index(const std::string& name) const {
    auto it = names_.find(name);
    if (it == names_.end() || it->second < 0)
        throw std::invalid_argument("model: no regular variable named '" + name + "'");
    return it->second;
}

int Model::predicted_index(const std::string& name) const {
    auto it = names_.find(name);
    if (it == names_.end() || it->second >= 0)
        throw std::invalid_argument("model: no predicted variable named '" + name + "'");
    return -1 - it->second;
}

void Model::validate(const PredictorRegistry& registry) const {
    for (const PredictedVariable& pv : predicted_) {
        if (!registry.contains(pv.predictor_id))
            throw std::invalid_argument("model: predicted variable '" + pv.name +
                                        "' references unknown predictor '" + pv.predictor_id +
                                        "'");
        const Predictor& p = registry.get(pv.predictor_id);
        if (pv.bindings.size() != p.feature_count())
            throw std::invalid_argument(
                "model: predicted variable '" + pv.name + "' binds " +
                std::to_string(pv.bindings.size()) + " inputs but predictor '" + pv.predictor_id +
                "' expects " + std::to_string(p.feature_count()));
    }
}

namespace {

const char* var_kind_name(VarKind k) {
    switch (k) {
    case VarKind::continuous: return "continuous";
    case VarKind::integer_: return "integer";
    default: return "binary";
    }
}

VarKind var_kind_from(const std::string& s) {
    if (s == "continuous")
        return VarKind::continuous;
    if (s == "integer")
        return VarKind::integer_;
    if (s == "binary")
        return VarKind::binary;
    throw std::runtime_error("model file: unknown variable kind '" + s + "'");
}

RowSense sense_from(const std::string& s) {
    if (s == "le")
        return RowSense::le;
    if (s == "eq")
        return RowSense::eq;
    if (s == "ge")
        return RowSense::ge;
    throw std::runtime_error("model file: unknown constraint sense '" + s + "'");
}

nlohmann::json terms_to_json(const std::vector<LinearTerm>& terms,
                             const std::vector<std::string>& names) {
    nlohmann::json arr = nlohmann::json::array();
    for (const LinearTerm& t : terms)
        arr.push_back({{"var", names[t.var]}, {"coeff", t.coeff}});
    return arr;
}

} // namespace

nlohmann::json save_model(const Model& model) {
    std::vector<std::string> var_names, pred_names;
    for (const RegularVariable& v : model.variables())
        var_names.push_back(v.name);
    for (const PredictedVariable& pv : model.predicted())
        pred_names.push_back(pv.name);

    nlohmann::json doc;
    doc["name"] = model.name;

    nlohmann::json vars = nlohmann::json::array();
    for (const RegularVariable& v : model.variables())
        vars.push_back({{"name", v.name},
                        {"lower", v.lower},
                        {"upper", v.upper},
                        {"kind", var_kind_name(v.kind)}});
    doc["regular_variables"] = std::move(vars);

    nlohmann::json cons = nlohmann::json::array();
    for (const Constraint& c : model.constraints())
        cons.push_back({{"name", c.name},
                        {"terms", terms_to_json(c.terms, var_names)},
                        {"sense", row_sense_name(c.sense)},
                        {"rhs", c.rhs}});
    doc["constraints"] = std::move(cons);

    doc["objective"] = {{"maximize", model.objective().maximize},
                        {"terms", terms_to_json(model.objective().variable_terms, var_names)},
                        {"predicted_terms",
                         terms_to_json(model.objective().predicted_terms, pred_names)}};

    nlohmann::json preds = nlohmann::json::array();
    for (const PredictedVariable& pv : model.predicted()) {
        nlohmann::json bindings = nlohmann::json::array();
        for (const Binding& b : pv.bindings) {
            if (b.is_fixed)
                bindings.push_back({{"fixed", b.value}});
            else
                bindings.push_back({{"var", var_names[b.var]}});
        }
        preds.push_back(
            {{"name", pv.name}, {"predictor", pv.predictor_id}, {"bindings", std::move(bindings)}});
    }
    doc["predicted_variables"] = std::move(preds);
    return doc;
}

Model load_model(const nlohmann::json& doc) {
    Model model;
    model.name = doc.value("name", "model");

    for (const auto& v : doc.at("regular_variables")) {
        const VarKind kind = var_kind_from(v.value("kind", "continuous"));
        const double lower = kind == VarKind::binary ? 0.0 : v.at("lower").get<double>();
        const double upper = kind == VarKind::binary ? 1.0 : v.at("upper").get<double>();
        model.add_regular_variable(v.at("name").get<std::string>(), lower, upper, kind);
    }

    auto read_terms = [&](const nlohmann::json& arr, bool predicted) {
        std::vector<LinearTerm> terms;
        for (const auto& t : arr) {
            const std::string ref = t.at("var").get<std::string>();
            const int index =
                predicted ? model.predicted_index(ref) : model.variable_index(ref);
            terms.push_back({index, t.at("coeff").get<double>()});
        }
        return terms;
    };

    if (doc.contains("predicted_variables")) {
        for (const auto& pv : doc.at("predicted_variables")) {
            std::vector<Binding> bindings;
            for (const auto& b : pv.at("bindings")) {
                if (b.contains("fixed"))
                    bindings.push_back(Binding::fixed(b.at("fixed").get<double>()));
                else
                    bindings.push_back(Binding::variable(
                        model.variable_index(b.at("var").get<std::string>())));
            }
            model.add_predicted_variable(pv.at("name").get<std::string>(),
                                         pv.at("predictor").get<std::string>(),
                                         std::move(bindings));
        }
    }

    for (const auto& c : doc.at("constraints"))
        model.add_constraint(c.at("name").get<std::string>(), read_terms(c.at("terms"), false),
                             sense_from(c.at("sense").get<std::string>()),
                             c.at("rhs").get<double>());

    const auto& obj = doc.at("objective");
    model.set_objective(obj.value("maximize", true), read_terms(obj.at("terms"), false),
                        obj.contains("predicted_terms")
                            ? read_terms(obj.at("predicted_terms"), true)
                            : std::vector<LinearTerm>{});
    return model;
}

void save_model_file(const std::string& path, const Model& model) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write model file: " + path);
    out << save_model(model).dump(2) << "\n";
}

Model load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open model file: " + path);
    return load_model(nlohmann::json::parse(in));
}

} // namespace predopt
