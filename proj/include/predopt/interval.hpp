#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

namespace predopt {

// Closed interval [lo, hi]. Used for variable bounds, neuron pre/post
// activation ranges and log-odds ranges.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    bool contains(double v) const { return v >= lo && v <= hi; }
    bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }

    // Adds c * [lo, hi] to this interval with a sign-split product, so the
    // result is sound for either sign of c.
    void add_scaled(double c, const Interval& other) {
        if (c >= 0.0) {
            lo += c * other.lo;
            hi += c * other.hi;
        } else {
            lo += c * other.hi;
            hi += c * other.lo;
        }
    }

    // Post-ReLU image of a pre-activation interval.
    Interval relu() const { return {std::max(0.0, lo), std::max(0.0, hi)}; }
};

// Range of constant + sum_l coeffs[l] * inputs[l] over the input box.
inline Interval affine_range(double constant, std::span<const double> coeffs,
                             std::span<const Interval> inputs) {
    if (coeffs.size() != inputs.size())
        throw std::invalid_argument("affine_range: length mismatch");
    Interval r{constant, constant};
    for (std::size_t l = 0; l < coeffs.size(); ++l)
        r.add_scaled(coeffs[l], inputs[l]);
    return r;
}

} // namespace predopt
