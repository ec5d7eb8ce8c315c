#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace vatom {

/// Reduced density matrix of one subsystem (atom, field, or field 1).
/// `trace_defect` is the probability lost to Fock truncation, so the trace is
/// expected within that amount of one.
struct ReducedDensityMatrix {
    Eigen::MatrixXcd entries;
    double trace_defect = 0.0;

    int dimension() const noexcept { return static_cast<int>(entries.rows()); }
    double trace() const { return entries.trace().real(); }
};

/// Uniformly sampled scalar trajectory; sample i sits at t0 + i * dt.
struct ObservableSeries {
    std::vector<double> values;
    double dt = 1.0;
    double t0 = 0.0;
    std::string label;
    std::string origin;
    /// Set when a resource ceiling cut the series short.
    bool partial = false;

    std::size_t size() const noexcept { return values.size(); }
    double time(std::size_t i) const noexcept { return t0 + static_cast<double>(i) * dt; }
};

}  // namespace vatom
