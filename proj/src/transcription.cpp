#include "predopt/transcription.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

namespace predopt {

NodeBounds propagate_bounds_nn(const NeuralNetworkModel& m, std::span<const Interval> inputs) {
    if (m.layers.empty())
        throw std::invalid_argument("propagate_bounds_nn: network has no layers");
    if (inputs.size() != m.layers.front().in_dim())
        throw std::invalid_argument("propagate_bounds_nn: input arity mismatch");
    for (const Interval& iv : inputs)
        if (!iv.finite() || iv.lo > iv.hi)
            throw std::invalid_argument("propagate_bounds_nn: inputs must be finite intervals");

    NodeBounds nb;
    nb.pre.emplace_back(inputs.begin(), inputs.end());
    nb.post.push_back(nb.pre.front());
    for (std::size_t j = 0; j < m.layers.size(); ++j) {
        const DenseLayer& layer = m.layers[j];
        const bool hidden = j + 1 < m.layers.size();
        std::vector<Interval> pre(layer.out_dim());
        std::vector<Interval> post(layer.out_dim());
        for (std::size_t i = 0; i < layer.out_dim(); ++i) {
            pre[i] = affine_range(layer.biases[i], layer.weights[i], nb.post.back());
            post[i] = hidden ? pre[i].relu() : pre[i];
        }
        nb.pre.push_back(std::move(pre));
        nb.post.push_back(std::move(post));
    }
    return nb;
}

Interval logodds_range(const LogisticRegressionModel& m, std::span<const Interval> inputs) {
    return affine_range(m.intercept, m.coefficients, inputs);
}

double v_delta(double lower, double upper) {
    if (!std::isfinite(lower) || !std::isfinite(upper))
        throw std::invalid_argument("v_delta: bounds must be finite");
    if (lower >= upper)
        throw std::invalid_argument("v_delta: lower must be strictly below upper");
    return (softplus(upper) - softplus(lower)) / (upper - lower);
}

namespace {

// Appends one predicted variable's block.  In the direct path the sink wraps
// the target MILP itself (base 0); during parallel transcription it wraps a
// scratch MILP whose columns will land at global index base onward.
struct BlockSink {
    Milp& milp;
    int base;

    int add_column(Column c) {
        milp.add_column(std::move(c));
        return base + static_cast<int>(milp.columns.size()) - 1;
    }
    void add_row(Row r) { milp.add_row(std::move(r)); }
};

void push_term(std::vector<RowTerm>& terms, int column, double coeff) {
    if (coeff != 0.0)
        terms.push_back({column, coeff});
}

std::vector<Interval> binding_intervals(const std::vector<Column>& columns,
                                        std::span<const Binding> bindings,
                                        const std::string& var_name) {
    std::vector<Interval> ivs;
    ivs.reserve(bindings.size());
    for (const Binding& b : bindings) {
        if (b.is_fixed) {
            if (!std::isfinite(b.value))
                throw std::invalid_argument("transcription: fixed binding of '" + var_name +
                                            "' must be finite");
            ivs.push_back({b.value, b.value});
        } else {
            if (b.var < 0 || b.var >= static_cast<int>(columns.size()))
                throw std::invalid_argument("transcription: binding of '" + var_name +
                                            "' references an unknown column");
            const Column& c = columns[b.var];
            if (!std::isfinite(c.lower) || !std::isfinite(c.upper))
                throw std::invalid_argument("transcription: binding of '" + var_name +
                                            "' needs finite bounds on column '" + c.name + "'");
            ivs.push_back({c.lower, c.upper});
        }
    }
    return ivs;
}

int build_linreg(BlockSink& sink, const std::string& name, const LinearRegressionModel& m,
                 std::span<const Binding> bindings, std::span<const Interval> ivs) {
    const Interval range = affine_range(m.intercept, m.coefficients, ivs);
    const int y = sink.add_column(
        {name, range.lo, range.hi, ColumnKind::continuous, ColumnTag::predicted_output, 0.0});

    std::vector<RowTerm> terms{{y, 1.0}};
    double rhs = m.intercept;
    for (std::size_t l = 0; l < bindings.size(); ++l) {
        if (bindings[l].is_fixed)
            rhs += m.coefficients[l] * bindings[l].value;
        else
            push_term(terms, bindings[l].var, -m.coefficients[l]);
    }
    sink.add_row(row_eq(name + "_aff", std::move(terms), rhs));
    return y;
}

struct HullPoint {
    double x = 0.0;
    double y = 0.0;
};

double cross(const HullPoint& o, const HullPoint& a, const HullPoint& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Monotone chain over points with strictly increasing x.  upper=true keeps
// the concave envelope from above, otherwise the convex envelope from below.
std::vector<HullPoint> envelope(const std::vector<HullPoint>& points, bool upper) {
    std::vector<HullPoint> hull;
    for (const HullPoint& p : points) {
        while (hull.size() >= 2) {
            const double c = cross(hull[hull.size() - 2], hull.back(), p);
            if (upper ? c >= 0.0 : c <= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }
    return hull;
}

int build_logreg(BlockSink& sink, const std::string& name, const LogisticRegressionModel& m,
                 std::span<const Binding> bindings, std::span<const Interval> ivs, int delta) {
    if (delta < 1)
        throw std::invalid_argument("transcribe_logreg: interval count must be at least 1");

    const bool all_fixed =
        std::all_of(bindings.begin(), bindings.end(), [](const Binding& b) { return b.is_fixed; });
    if (all_fixed) {
        double logodds = m.intercept;
        for (std::size_t l = 0; l < bindings.size(); ++l)
            logodds += m.coefficients[l] * bindings[l].value;
        const double value = sigmoid(logodds);
        return sink.add_column(
            {name, value, value, ColumnKind::continuous, ColumnTag::predicted_output, 0.0});
    }

    Interval range = logodds_range(m, ivs);
    if (range.width() == 0.0) {
        range.lo -= 1e-6;
        range.hi += 1e-6;
    }

    std::vector<double> edge(delta + 1);
    for (int i = 0; i <= delta; ++i)
        edge[i] = range.lo + range.width() * i / delta;
    edge[delta] = range.hi;
    std::vector<double> mean(delta);
    for (int d = 0; d < delta; ++d)
        mean[d] = v_delta(edge[d], edge[d + 1]);

    const double s_lo = sigmoid(range.lo);
    const double s_hi = sigmoid(range.hi);
    const int y = sink.add_column(
        {name, s_lo, s_hi, ColumnKind::continuous, ColumnTag::predicted_output, 0.0});
    std::vector<int> z(delta);
    for (int d = 0; d < delta; ++d)
        z[d] = sink.add_column({name + "_z" + std::to_string(d + 1), 0.0, 1.0, ColumnKind::binary,
                                ColumnTag::interval_indicator, 0.0});

    std::vector<RowTerm> logodds_terms;
    double logodds_const = m.intercept;
    for (std::size_t l = 0; l < bindings.size(); ++l) {
        if (bindings[l].is_fixed)
            logodds_const += m.coefficients[l] * bindings[l].value;
        else
            push_term(logodds_terms, bindings[l].var, m.coefficients[l]);
    }

    {
        std::vector<RowTerm> terms;
        for (int d = 0; d < delta; ++d)
            terms.push_back({z[d], 1.0});
        sink.add_row(row_eq(name + "_pick", std::move(terms), 1.0));
    }
    for (int d = 0; d < delta; ++d) {
        std::vector<RowTerm> terms = logodds_terms;
        push_term(terms, z[d], -(edge[d] - edge[0]));
        sink.add_row(
            row_ge(name + "_lob" + std::to_string(d + 1), std::move(terms), edge[0] - logodds_const));
    }
    for (int d = 0; d < delta; ++d) {
        std::vector<RowTerm> terms = logodds_terms;
        push_term(terms, z[d], -(edge[d + 1] - edge[delta]));
        sink.add_row(row_le(name + "_upb" + std::to_string(d + 1), std::move(terms),
                            edge[delta] - logodds_const));
    }
    for (int d = 0; d < delta; ++d) {
        std::vector<RowTerm> terms{{y, 1.0}};
        push_term(terms, z[d], -(mean[d] - s_lo));
        sink.add_row(row_ge(name + "_ylo" + std::to_string(d + 1), std::move(terms), s_lo));
    }
    for (int d = 0; d < delta; ++d) {
        std::vector<RowTerm> terms{{y, 1.0}};
        push_term(terms, z[d], -(mean[d] - s_hi));
        sink.add_row(row_le(name + "_yhi" + std::to_string(d + 1), std::move(terms), s_hi));
    }
    {
        std::vector<RowTerm> terms{{y, 1.0}};
        for (int d = 0; d < delta; ++d)
            push_term(terms, z[d], -mean[d]);
        sink.add_row(row_eq(name + "_mean", std::move(terms), 0.0));
    }

    // The interval means form a staircase in the log-odds; its concave upper
    // and convex lower envelopes are valid at every integral point and give
    // the LP relaxation a bound that tracks the staircase instead of letting
    // fractional z spread across distant intervals.
    std::vector<HullPoint> upper_pts(delta + 1), lower_pts(delta + 1);
    for (int i = 0; i <= delta; ++i) {
        upper_pts[i] = {edge[i], mean[std::min(i, delta - 1)]};
        lower_pts[i] = {edge[i], mean[std::max(i - 1, 0)]};
    }
    const auto emit_envelope = [&](const std::vector<HullPoint>& hull, bool upper) {
        for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
            const double slope = (hull[s + 1].y - hull[s].y) / (hull[s + 1].x - hull[s].x);
            std::vector<RowTerm> terms{{y, 1.0}};
            for (const RowTerm& t : logodds_terms)
                push_term(terms, t.column, -slope * t.coeff);
            const double rhs = hull[s].y - slope * hull[s].x + slope * logodds_const;
            const std::string row_name =
                name + (upper ? "_cap" : "_cup") + std::to_string(s + 1);
            sink.add_row(upper ? row_le(row_name, std::move(terms), rhs)
                               : row_ge(row_name, std::move(terms), rhs));
        }
    };
    emit_envelope(envelope(upper_pts, true), true);
    emit_envelope(envelope(lower_pts, false), false);
    return y;
}

int build_nn(BlockSink& sink, const std::string& name, const NeuralNetworkModel& m,
             std::span<const Binding> bindings, std::span<const Interval> ivs, double margin) {
    if (m.layers.empty() || m.layers.back().out_dim() != 1)
        throw std::invalid_argument("transcribe_nn: network must end in a single output node");
    const NodeBounds nb = propagate_bounds_nn(m, ivs);
    const std::size_t depth = nb.pre.size();

    std::vector<std::vector<int>> g(depth), f(depth), z(depth);
    for (std::size_t j = 0; j < depth; ++j) {
        const bool hidden = j > 0 && j + 1 < depth;
        const std::string suffix_layer = std::to_string(j);
        g[j].resize(nb.pre[j].size());
        f[j].resize(nb.pre[j].size());
        if (hidden)
            z[j].resize(nb.pre[j].size());
        for (std::size_t i = 0; i < nb.pre[j].size(); ++i) {
            const std::string suffix = suffix_layer + "_" + std::to_string(i);
            g[j][i] = sink.add_column({name + "_g" + suffix, nb.pre[j][i].lo, nb.pre[j][i].hi,
                                       ColumnKind::continuous, ColumnTag::neuron_pre, 0.0});
            f[j][i] = sink.add_column({name + "_f" + suffix, nb.post[j][i].lo, nb.post[j][i].hi,
                                       ColumnKind::continuous, ColumnTag::neuron_post, 0.0});
            if (hidden)
                z[j][i] = sink.add_column({name + "_z" + suffix, 0.0, 1.0, ColumnKind::binary,
                                           ColumnTag::relu_indicator, 0.0});
        }
    }
    const Interval out = nb.pre.back().front();
    const int y = sink.add_column(
        {name, out.lo, out.hi, ColumnKind::continuous, ColumnTag::predicted_output, 0.0});

    for (std::size_t i = 0; i < ivs.size(); ++i) {
        const std::string suffix = std::to_string(i);
        if (bindings[i].is_fixed)
            sink.add_row(row_eq(name + "_src" + suffix, {{g[0][i], 1.0}}, bindings[i].value));
        else
            sink.add_row(
                row_eq(name + "_src" + suffix, {{g[0][i], 1.0}, {bindings[i].var, -1.0}}, 0.0));
        sink.add_row(row_eq(name + "_pass0_" + suffix, {{f[0][i], 1.0}, {g[0][i], -1.0}}, 0.0));
    }

    for (std::size_t j = 1; j < depth; ++j) {
        const DenseLayer& layer = m.layers[j - 1];
        const bool hidden = j + 1 < depth;
        for (std::size_t i = 0; i < layer.out_dim(); ++i) {
            const std::string suffix = std::to_string(j) + "_" + std::to_string(i);
            std::vector<RowTerm> terms{{g[j][i], 1.0}};
            for (std::size_t u = 0; u < layer.in_dim(); ++u)
                push_term(terms, f[j - 1][u], -layer.weights[i][u]);
            sink.add_row(row_eq(name + "_aff" + suffix, std::move(terms), layer.biases[i]));
            if (!hidden)
                continue;
            const double big_m =
                std::max(std::abs(nb.pre[j][i].lo), std::abs(nb.pre[j][i].hi)) + margin;
            sink.add_row(row_range(name + "_on" + suffix, {{g[j][i], 1.0}, {z[j][i], -big_m}},
                                   -big_m, 0.0));
            sink.add_row(row_ge(name + "_lo" + suffix,
                                {{f[j][i], 1.0}, {g[j][i], -1.0}, {z[j][i], -big_m}}, -big_m));
            sink.add_row(row_le(name + "_hi" + suffix,
                                {{f[j][i], 1.0}, {g[j][i], -1.0}, {z[j][i], big_m}}, big_m));
            sink.add_row(row_range(name + "_off" + suffix, {{f[j][i], 1.0}, {z[j][i], -big_m}},
                                   -big_m, 0.0));
        }
    }

    const std::size_t last = depth - 1;
    sink.add_row(row_eq(name + "_pass" + std::to_string(last) + "_0",
                        {{f[last][0], 1.0}, {g[last][0], -1.0}}, 0.0));
    sink.add_row(row_eq(name + "_out", {{y, 1.0}, {f[last][0], -1.0}}, 0.0));
    return y;
}

int build_block(BlockSink& sink, const std::string& name, const Predictor& p,
                std::span<const Binding> bindings, std::span<const Interval> ivs,
                const TranscriptionOptions& options) {
    return std::visit(
        [&](const auto& fam) -> int {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, LinearRegressionModel>)
                return build_linreg(sink, name, fam, bindings, ivs);
            else if constexpr (std::is_same_v<T, LogisticRegressionModel>)
                return build_logreg(sink, name, fam, bindings, ivs, options.delta);
            else
                return build_nn(sink, name, fam, bindings, ivs, options.big_m_margin);
        },
        p.family);
}

void check_arity(const std::string& name, std::size_t bound, std::size_t expected) {
    if (bound != expected)
        throw std::invalid_argument("transcription: '" + name + "' binds " +
                                    std::to_string(bound) + " inputs, predictor expects " +
                                    std::to_string(expected));
}

} // namespace

int transcribe_linreg(Milp& milp, const std::string& var_name, const LinearRegressionModel& m,
                      std::span<const Binding> bindings) {
    check_arity(var_name, bindings.size(), m.coefficients.size());
    const auto ivs = binding_intervals(milp.columns, bindings, var_name);
    BlockSink sink{milp, 0};
    return build_linreg(sink, var_name, m, bindings, ivs);
}

int transcribe_logreg(Milp& milp, const std::string& var_name, const LogisticRegressionModel& m,
                      std::span<const Binding> bindings, int delta) {
    check_arity(var_name, bindings.size(), m.coefficients.size());
    const auto ivs = binding_intervals(milp.columns, bindings, var_name);
    BlockSink sink{milp, 0};
    return build_logreg(sink, var_name, m, bindings, ivs, delta);
}

int transcribe_nn(Milp& milp, const std::string& var_name, const NeuralNetworkModel& m,
                  std::span<const Binding> bindings, double big_m_margin) {
    if (m.layers.empty())
        throw std::invalid_argument("transcribe_nn: network has no layers");
    check_arity(var_name, bindings.size(), m.layers.front().in_dim());
    const auto ivs = binding_intervals(milp.columns, bindings, var_name);
    BlockSink sink{milp, 0};
    return build_nn(sink, var_name, m, bindings, ivs, big_m_margin);
}

TranscriptionResult transcribe_model(const Model& model, const PredictorRegistry& registry,
                                     const TranscriptionOptions& options) {
    if (options.delta < 1)
        throw std::invalid_argument("transcription: interval count must be at least 1");
    model.validate(registry);

    TranscriptionResult res;
    Milp& milp = res.milp;
    milp.name = model.name;
    milp.maximize = model.objective().maximize;

    for (const RegularVariable& v : model.variables()) {
        ColumnKind kind = ColumnKind::continuous;
        if (v.kind == VarKind::binary)
            kind = ColumnKind::binary;
        else if (v.kind == VarKind::integer_)
            kind = ColumnKind::general_integer;
        res.variable_columns.push_back(
            milp.add_column({v.name, v.lower, v.upper, kind, ColumnTag::user_variable, 0.0}));
    }
    for (const Constraint& c : model.constraints()) {
        std::vector<RowTerm> terms;
        for (const LinearTerm& t : c.terms)
            push_term(terms, t.var, t.coeff);
        switch (c.sense) {
        case RowSense::le: milp.add_row(row_le(c.name, std::move(terms), c.rhs)); break;
        case RowSense::eq: milp.add_row(row_eq(c.name, std::move(terms), c.rhs)); break;
        case RowSense::ge: milp.add_row(row_ge(c.name, std::move(terms), c.rhs)); break;
        }
    }
    for (const LinearTerm& t : model.objective().variable_terms)
        milp.columns[t.var].objective += t.coeff;

    const int user_count = static_cast<int>(milp.columns.size());
    const int blocks = static_cast<int>(model.predicted().size());
    std::vector<Milp> scratch(blocks);
    std::vector<int> y_local(blocks, -1);
    std::exception_ptr failure;

#pragma omp parallel for schedule(static) if (options.parallel && blocks > 1)
    for (int k = 0; k < blocks; ++k) {
        try {
            const PredictedVariable& pv = model.predicted()[k];
            const Predictor& p = registry.get(pv.predictor_id);
            const auto ivs = binding_intervals(milp.columns, pv.bindings, pv.name);
            BlockSink sink{scratch[k], user_count};
            y_local[k] = build_block(sink, pv.name, p, pv.bindings, ivs, options);
        } catch (...) {
#pragma omp critical
            if (!failure)
                failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);

    for (int k = 0; k < blocks; ++k) {
        const int shift = static_cast<int>(milp.columns.size()) - user_count;
        for (Column& c : scratch[k].columns)
            milp.add_column(std::move(c));
        for (Row& r : scratch[k].rows) {
            for (RowTerm& t : r.terms)
                if (t.column >= user_count)
                    t.column += shift;
            milp.add_row(std::move(r));
        }
        res.predicted_columns.push_back(y_local[k] + shift);
    }
    for (const LinearTerm& t : model.objective().predicted_terms)
        milp.columns[res.predicted_columns[t.var]].objective += t.coeff;
    return res;
}

} // namespace predopt
