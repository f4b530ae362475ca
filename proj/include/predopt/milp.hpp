#pragma once

#include <limits>
#include <string>
#include <vector>

namespace predopt {

enum class RowSense { le, eq, ge };

enum class ColumnKind { continuous, binary, general_integer };

// What produced a column, so reports can separate user-facing values from
// encoding machinery.
enum class ColumnTag {
    user_variable,
    neuron_pre,
    neuron_post,
    relu_indicator,
    interval_indicator,
    predicted_output,
};

struct Column {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
    ColumnKind kind = ColumnKind::continuous;
    ColumnTag tag = ColumnTag::user_variable;
    double objective = 0.0;
};

struct RowTerm {
    int column = -1;
    double coeff = 0.0;
};

// A row constrains its activity (sum of terms) to [lower, upper]; equalities
// have lower == upper and one-sided rows leave the other end infinite.
struct Row {
    std::string name;
    std::vector<RowTerm> terms;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
};

inline Row row_le(std::string name, std::vector<RowTerm> terms, double rhs) {
    return {std::move(name), std::move(terms), -std::numeric_limits<double>::infinity(), rhs};
}
inline Row row_ge(std::string name, std::vector<RowTerm> terms, double rhs) {
    return {std::move(name), std::move(terms), rhs, std::numeric_limits<double>::infinity()};
}
inline Row row_eq(std::string name, std::vector<RowTerm> terms, double rhs) {
    return {std::move(name), std::move(terms), rhs, rhs};
}
inline Row row_range(std::string name, std::vector<RowTerm> terms, double lower, double upper) {
    return {std::move(name), std::move(terms), lower, upper};
}

struct Milp {
    std::string name = "model";
    bool maximize = true;
    std::vector<Column> columns;
    std::vector<Row> rows;

    int add_column(Column c) {
        columns.push_back(std::move(c));
        return static_cast<int>(columns.size()) - 1;
    }
    int add_row(Row r) {
        rows.push_back(std::move(r));
        return static_cast<int>(rows.size()) - 1;
    }
    std::size_t discrete_count() const {
        std::size_t n = 0;
        for (const Column& c : columns)
            if (c.kind != ColumnKind::continuous)
                ++n;
        return n;
    }
};

inline const char* row_sense_name(RowSense s) {
    switch (s) {
    case RowSense::le: return "le";
    case RowSense::eq: return "eq";
    default: return "ge";
    }
}

} // namespace predopt
