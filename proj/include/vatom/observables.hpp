#pragma once

#include "vatom/bipartite.hpp"
#include "vatom/density.hpp"
#include "vatom/tripartite.hpp"

#include <cstddef>
#include <span>
#include <string>

namespace vatom {

/// Eigenvalues below this count as exact zeros in entropy sums.
inline constexpr double entropy_zero = 1e-14;
/// Eigenvalues below minus this are reported as a positivity violation.
inline constexpr double positivity_tol = 1e-8;

/// -Tr(rho log2 rho). Throws PositivityViolation on a clearly negative eigenvalue.
double svne(const ReducedDensityMatrix& rho);

/// Mandel Q from the diagonal, read as a photon-number distribution.
/// Throws UndefinedQuantity when the mean is below 1e-12.
double mandel_q(const ReducedDensityMatrix& rho_field);
double mandel_q_from_distribution(std::span<const double> p);

double mean_photon_number(const ReducedDensityMatrix& rho_field);

struct TimeGrid {
    double t0 = 0.0;
    double dt = 1.0;
    std::size_t count = 0;

    double time(std::size_t i) const noexcept { return t0 + static_cast<double>(i) * dt; }
    void validate() const;
};

enum class Observable { svne, mandel_q, mean_photon };

const char* to_string(Observable which) noexcept;
Observable parse_observable(const std::string& name);

struct SeriesOptions {
    int threads = 0;
    /// Ceiling on the number of points; 0 means no ceiling.
    std::size_t max_points = 0;
    /// Past the ceiling, return the leading max_points values flagged partial
    /// instead of throwing ResourceError.
    bool allow_partial = false;
};

/// Bipartite series: SVNE of the atom (equal to that of the field), Q and
/// mean photon number of the field.
ObservableSeries series(const BipartiteModel& model, const TimeGrid& grid, Observable which,
                        const SeriesOptions& options = {});

/// Tripartite series: SVNE, Q and mean photon number of mode F1.
ObservableSeries series(const TripartiteModel& model, const TimeGrid& grid, Observable which,
                        const SeriesOptions& options = {});

}  // namespace vatom
