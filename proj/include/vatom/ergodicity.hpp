#pragma once

#include "vatom/density.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace vatom {

// ---------------------------------------------------------------------------
// Coarse-grained recurrence statistics
// ---------------------------------------------------------------------------

/// Equal-width partition of a scalar series and the cell visited at each step.
struct CellSequence {
    std::vector<int> indices;
    int n_cells = 0;
    std::vector<double> cell_edges;  ///< n_cells + 1 edges
    std::vector<double> measures;    ///< occupation fraction per cell
    /// Constant input: everything lands in a single cell.
    bool degenerate = false;
};

CellSequence coarse_grain(std::span<const double> values, int n_cells);
inline CellSequence coarse_grain(const ObservableSeries& s, int n_cells) { return coarse_grain(s.values, n_cells); }

/// Most-visited cell away from the two boundary cells (any cell if n_cells < 3).
int default_target_cell(const CellSequence& cells);

/// exit_required: consecutive in-cell samples form one visit, and a return is
/// the gap between successive entries. every_visit: every in-cell sample is a
/// visit, so a one-step stay is a return of length 1.
enum class ReturnConvention { exit_required, every_visit };

/// Histogram of return times in steps; histogram[tau] counts returns of length tau.
struct RecurrenceStats {
    std::vector<std::uint64_t> histogram;
    double mean_return = 0.0;
    std::uint64_t sample_count = 0;
    int k = 1;

    std::vector<double> normalized() const;
};

RecurrenceStats first_return_distribution(const CellSequence& cells, int target_cell,
                                          ReturnConvention convention = ReturnConvention::exit_required);

/// Time to the k-th return. With `disjoint` the blocks of k returns do not
/// overlap, so the samples are independent when the returns are.
RecurrenceStats kth_return_distribution(const CellSequence& cells, int target_cell, int k,
                                        ReturnConvention convention = ReturnConvention::exit_required,
                                        bool disjoint = false);

/// Share of all returns that fall in the `bins` most populated return times.
double top_bin_mass(const RecurrenceStats& stats, int bins = 5);

/// Least-squares line through ln(count) of the return histogram, regrouped into
/// bins of `bin_width` steps, from the fullest bin up to the first one holding
/// fewer than `min_count` returns.
struct ExponentialFit {
    double rate = 0.0;  ///< decay per step
    double r_squared = 0.0;
    int bins = 0;
    int bin_width = 1;
};

ExponentialFit exponential_tail_fit(const RecurrenceStats& stats, int bin_width, std::uint64_t min_count = 10);

/// Pearson test of phi_k against the k-fold convolution of the observed phi_1,
/// i.e. the law of k independent returns. Bins are merged until each expects
/// at least `min_expected` counts.
struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 0.0;
    int bins = 0;
    std::uint64_t samples = 0;
};

ChiSquareResult successive_returns_test(const CellSequence& cells, int target_cell, int k,
                                        ReturnConvention convention = ReturnConvention::exit_required,
                                        double min_expected = 5.0);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;  ///< exclusive, except that a degenerate lo == hi cell holds exactly lo
};

/// `count` cells centred on `center`, widths shrinking geometrically from
/// `widest` by `ratio`.
std::vector<Interval> nested_cells(double center, double widest, int count, double ratio = 0.5);

struct KacPoint {
    Interval cell;
    double measure = 0.0;
    double inverse_measure = 0.0;
    double mean_return = 0.0;
    std::uint64_t returns = 0;
    /// Too few returns to enter the fit.
    bool dropped = false;
};

struct KacReport {
    std::vector<KacPoint> points;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int used = 0;
};

/// Mean return time against 1/measure over the given cells, with a
/// least-squares line through the retained points.
KacReport mean_recurrence_vs_measure(std::span<const double> values, std::span<const Interval> cells,
                                     ReturnConvention convention = ReturnConvention::every_visit,
                                     std::uint64_t min_returns = 50);

/// Pairs (s[i], s[i + lag]) in time order.
std::vector<std::pair<double, double>> return_map(std::span<const double> values, int lag = 1);

// ---------------------------------------------------------------------------
// Delay embedding
// ---------------------------------------------------------------------------

/// Sample autocorrelation for lags 0..max_lag.
std::vector<double> autocorrelation(std::span<const double> values, int max_lag);

/// First lag where the autocorrelation crosses zero, else its first local
/// minimum, else 1.
int default_delay(std::span<const double> values, int max_lag = 1000);

/// Period in samples of the strongest non-zero frequency of the periodogram.
double dominant_period(std::span<const double> values);

struct FnnOptions {
    int delay = 0;  ///< 0: default_delay
    int d_max = 10;
    double r_tol = 10.0;
    double a_tol = 2.0;
    int theiler = 0;
    double threshold = 1e-5;
    /// Reference vectors per dimension; 0 uses all of them.
    std::size_t max_references = 0;
    int threads = 0;
};

struct EmbeddingReport {
    std::vector<double> fnn_fraction;  ///< entry d - 1 for d = 1..d_max
    int d_min = 0;                     ///< 0 when no tested d falls below the threshold
    int delay = 0;
    double r_tol = 0.0;
    double a_tol = 0.0;
    int theiler = 0;
    double threshold = 0.0;
    /// No finite d_min within d_max.
    bool saturated = false;
};

EmbeddingReport fnn_embedding_dimension(std::span<const double> values, const FnnOptions& options = {});

struct LyapunovOptions {
    int dim = 1;
    int delay = 1;
    int theiler = -1;  ///< < 0: dominant_period
    int k_max = 50;
    std::optional<std::pair<int, int>> fit_range;
    double dt = 1.0;
    int threads = 0;
};

struct LyapunovReport {
    std::vector<double> divergence_curve;  ///< <ln d_j(k)> for k = 0..k_max
    int fit_lo = 0;
    int fit_hi = 0;
    double slope = 0.0;  ///< per step
    double slope_per_time = 0.0;
    double intercept = 0.0;
    int theiler = 0;
    std::size_t pairs = 0;
};

LyapunovReport rosenstein_mle(std::span<const double> values, const LyapunovOptions& options = {});

/// Longest window whose local slopes stay within 20% of the window's own
/// slope, ignoring windows flatter than a noise floor; the full range if none.
std::pair<int, int> auto_fit_range(std::span<const double> curve);

}  // namespace vatom
