#include "vatom/ergodicity.hpp"

#include "vatom/errors.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>

namespace vatom {

namespace {

template <class InCell>
std::vector<std::size_t> visit_times(std::size_t n, InCell&& in_cell, ReturnConvention convention) {
    std::vector<std::size_t> times;
    bool inside = false;
    for (std::size_t i = 0; i < n; ++i) {
        const bool now = in_cell(i);
        if (now && (convention == ReturnConvention::every_visit || !inside)) times.push_back(i);
        inside = now;
    }
    return times;
}

std::vector<std::size_t> cell_visits(const CellSequence& cells, int target, ReturnConvention convention) {
    if (target < 0 || target >= cells.n_cells) {
        throw InvalidInput("target cell " + std::to_string(target) + " outside the partition");
    }
    return visit_times(
        cells.indices.size(), [&](std::size_t i) { return cells.indices[i] == target; }, convention);
}

RecurrenceStats histogram_of(const std::vector<std::size_t>& gaps, int k) {
    RecurrenceStats out;
    out.k = k;
    std::size_t longest = 0;
    for (std::size_t g : gaps) longest = std::max(longest, g);
    out.histogram.assign(longest + 1, 0);
    double total = 0.0;
    for (std::size_t g : gaps) {
        ++out.histogram[g];
        total += static_cast<double>(g);
    }
    out.sample_count = gaps.size();
    out.mean_return = gaps.empty() ? 0.0 : total / static_cast<double>(gaps.size());
    return out;
}

std::vector<std::size_t> kth_gaps(const std::vector<std::size_t>& visits, int k, bool disjoint) {
    std::vector<std::size_t> gaps;
    const std::size_t kk = static_cast<std::size_t>(k);
    const std::size_t stride = disjoint ? kk : 1;
    for (std::size_t j = 0; j + kk < visits.size(); j += stride) gaps.push_back(visits[j + kk] - visits[j]);
    return gaps;
}

// k-fold self-convolution of a probability vector.
std::vector<double> convolve_power(const std::vector<double>& p, int k) {
    const std::size_t length = (p.size() - 1) * static_cast<std::size_t>(k) + 1;
    std::size_t size = 1;
    while (size < length) size <<= 1;
    std::vector<double> padded(size, 0.0);
    std::copy(p.begin(), p.end(), padded.begin());

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spectrum;
    fft.fwd(spectrum, padded);
    for (auto& z : spectrum) z = std::pow(z, k);
    std::vector<double> result;
    fft.inv(result, spectrum);
    result.resize(length);
    for (double& v : result) v = std::max(v, 0.0);
    return result;
}

}  // namespace

CellSequence coarse_grain(std::span<const double> values, int n_cells) {
    if (n_cells < 2) throw InvalidInput("coarse_grain needs at least two cells");
    if (values.empty()) throw InsufficientData("coarse_grain of an empty series");
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidInput("series contains non-finite values");
    }
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;

    CellSequence out;
    out.indices.assign(values.size(), 0);
    if (hi == lo) {
        out.degenerate = true;
        out.n_cells = 1;
        out.cell_edges = {lo, hi};
        out.measures = {1.0};
        return out;
    }

    out.n_cells = n_cells;
    const double width = (hi - lo) / n_cells;
    out.cell_edges.resize(static_cast<std::size_t>(n_cells) + 1);
    for (int c = 0; c <= n_cells; ++c) out.cell_edges[static_cast<std::size_t>(c)] = lo + c * width;
    out.cell_edges.back() = hi;

    std::vector<std::uint64_t> counts(static_cast<std::size_t>(n_cells), 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        int c = static_cast<int>(std::floor((values[i] - lo) / width));
        c = std::clamp(c, 0, n_cells - 1);
        out.indices[i] = c;
        ++counts[static_cast<std::size_t>(c)];
    }
    out.measures.resize(counts.size());
    for (std::size_t c = 0; c < counts.size(); ++c) {
        out.measures[c] = static_cast<double>(counts[c]) / static_cast<double>(values.size());
    }
    return out;
}

int default_target_cell(const CellSequence& cells) {
    if (cells.n_cells < 1) throw InvalidInput("empty partition");
    const int first = cells.n_cells >= 3 ? 1 : 0;
    const int last = cells.n_cells >= 3 ? cells.n_cells - 2 : cells.n_cells - 1;
    int best = first;
    for (int c = first; c <= last; ++c) {
        if (cells.measures[static_cast<std::size_t>(c)] > cells.measures[static_cast<std::size_t>(best)]) best = c;
    }
    return best;
}

std::vector<double> RecurrenceStats::normalized() const {
    std::vector<double> out(histogram.size(), 0.0);
    if (sample_count == 0) return out;
    for (std::size_t i = 0; i < histogram.size(); ++i) {
        out[i] = static_cast<double>(histogram[i]) / static_cast<double>(sample_count);
    }
    return out;
}

RecurrenceStats first_return_distribution(const CellSequence& cells, int target_cell, ReturnConvention convention) {
    return kth_return_distribution(cells, target_cell, 1, convention, false);
}

RecurrenceStats kth_return_distribution(const CellSequence& cells, int target_cell, int k,
                                        ReturnConvention convention, bool disjoint) {
    if (k < 1) throw InvalidInput("k must be at least 1");
    const auto visits = cell_visits(cells, target_cell, convention);
    if (visits.size() < static_cast<std::size_t>(k) + 1) {
        throw InsufficientData("cell " + std::to_string(target_cell) + " has " + std::to_string(visits.size()) +
                               " visits; need at least " + std::to_string(k + 1));
    }
    return histogram_of(kth_gaps(visits, k, disjoint), k);
}

double top_bin_mass(const RecurrenceStats& stats, int bins) {
    if (bins < 1) throw InvalidInput("bins must be at least 1");
    if (stats.sample_count == 0) throw InsufficientData("no returns recorded");
    std::vector<std::uint64_t> counts = stats.histogram;
    const auto keep = std::min(counts.size(), static_cast<std::size_t>(bins));
    std::partial_sort(counts.begin(), counts.begin() + static_cast<std::ptrdiff_t>(keep), counts.end(),
                      std::greater<>());
    std::uint64_t top = 0;
    for (std::size_t i = 0; i < keep; ++i) top += counts[i];
    return static_cast<double>(top) / static_cast<double>(stats.sample_count);
}

ExponentialFit exponential_tail_fit(const RecurrenceStats& stats, int bin_width, std::uint64_t min_count) {
    if (bin_width < 1) throw InvalidInput("bin width must be at least 1");
    const auto w = static_cast<std::size_t>(bin_width);
    std::vector<std::uint64_t> grouped((stats.histogram.size() + w - 1) / w, 0);
    for (std::size_t tau = 0; tau < stats.histogram.size(); ++tau) grouped[tau / w] += stats.histogram[tau];

    const auto peak = static_cast<std::size_t>(std::max_element(grouped.begin(), grouped.end()) - grouped.begin());
    std::size_t end = peak;
    while (end < grouped.size() && grouped[end] >= min_count) ++end;

    ExponentialFit out;
    out.bin_width = bin_width;
    out.bins = static_cast<int>(end - peak);
    if (out.bins < 3) throw InsufficientData("fewer than three populated bins past the peak");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t b = peak; b < end; ++b) {
        const double x = (static_cast<double>(b) + 0.5) * static_cast<double>(w);
        const double y = std::log(static_cast<double>(grouped[b]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double m = out.bins;
    const double vx = sxx - sx * sx / m;
    const double vy = syy - sy * sy / m;
    const double cxy = sxy - sx * sy / m;
    out.rate = -cxy / vx;
    out.r_squared = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
    return out;
}

ChiSquareResult successive_returns_test(const CellSequence& cells, int target_cell, int k,
                                        ReturnConvention convention, double min_expected) {
    if (k < 2) throw InvalidInput("successive-returns test needs k >= 2");
    if (!(min_expected > 0.0)) throw InvalidInput("min_expected must be positive");
    const RecurrenceStats phi1 = first_return_distribution(cells, target_cell, convention);
    const RecurrenceStats phik = kth_return_distribution(cells, target_cell, k, convention, true);

    const std::vector<double> model = convolve_power(phi1.normalized(), k);
    const double samples = static_cast<double>(phik.sample_count);

    std::vector<double> observed;
    std::vector<double> expected;
    double obs_acc = 0.0;
    double exp_acc = 0.0;
    for (std::size_t tau = 0; tau < model.size(); ++tau) {
        obs_acc += tau < phik.histogram.size() ? static_cast<double>(phik.histogram[tau]) : 0.0;
        exp_acc += samples * model[tau];
        if (exp_acc >= min_expected) {
            observed.push_back(obs_acc);
            expected.push_back(exp_acc);
            obs_acc = exp_acc = 0.0;
        }
    }
    if (!expected.empty()) {
        observed.back() += obs_acc;
        expected.back() += exp_acc;
    }
    if (expected.size() < 2) {
        throw InsufficientData("too few returns for a chi-square test at k = " + std::to_string(k));
    }

    ChiSquareResult out;
    out.samples = phik.sample_count;
    out.bins = static_cast<int>(expected.size());
    out.dof = out.bins - 1;
    for (std::size_t b = 0; b < expected.size(); ++b) {
        const double d = observed[b] - expected[b];
        out.statistic += d * d / expected[b];
    }
    const boost::math::chi_squared dist(out.dof);
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
    return out;
}

std::vector<Interval> nested_cells(double center, double widest, int count, double ratio) {
    if (!(widest > 0.0) || count < 1 || !(ratio > 0.0 && ratio < 1.0)) {
        throw InvalidInput("nested_cells needs widest > 0, count >= 1, 0 < ratio < 1");
    }
    std::vector<Interval> out;
    double w = widest;
    for (int i = 0; i < count; ++i, w *= ratio) out.push_back({center - w / 2.0, center + w / 2.0});
    return out;
}

KacReport mean_recurrence_vs_measure(std::span<const double> values, std::span<const Interval> cells,
                                     ReturnConvention convention, std::uint64_t min_returns) {
    if (cells.size() < 4) throw InvalidInput("Kac check needs at least four cells");
    KacReport out;
    const auto n = values.size();
    for (const Interval& cell : cells) {
        const auto inside = [&](std::size_t i) {
            const double v = values[i];
            return cell.lo == cell.hi ? v == cell.lo : (v >= cell.lo && v < cell.hi);
        };
        std::uint64_t hits = 0;
        for (std::size_t i = 0; i < n; ++i) hits += inside(i) ? 1 : 0;
        const auto visits = visit_times(n, inside, convention);

        KacPoint p;
        p.cell = cell;
        p.measure = n ? static_cast<double>(hits) / static_cast<double>(n) : 0.0;
        p.inverse_measure = p.measure > 0.0 ? 1.0 / p.measure : 0.0;
        p.returns = visits.size() > 1 ? visits.size() - 1 : 0;
        if (p.returns > 0) {
            p.mean_return = static_cast<double>(visits.back() - visits.front()) / static_cast<double>(p.returns);
        }
        p.dropped = p.returns < min_returns;
        out.points.push_back(p);
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (const auto& p : out.points) {
        if (p.dropped) continue;
        ++out.used;
        sx += p.inverse_measure;
        sy += p.mean_return;
        sxx += p.inverse_measure * p.inverse_measure;
        sxy += p.inverse_measure * p.mean_return;
        syy += p.mean_return * p.mean_return;
    }
    if (out.used < 2) throw InsufficientData("fewer than two cells have enough returns for a fit");
    const double m = out.used;
    const double vx = sxx - sx * sx / m;
    const double vy = syy - sy * sy / m;
    const double cxy = sxy - sx * sy / m;
    if (vx <= 0.0) throw InsufficientData("all retained cells have the same measure");
    out.slope = cxy / vx;
    out.intercept = (sy - out.slope * sx) / m;
    out.r_squared = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
    return out;
}

std::vector<std::pair<double, double>> return_map(std::span<const double> values, int lag) {
    if (lag < 1) throw InvalidInput("return map lag must be at least 1");
    std::vector<std::pair<double, double>> out;
    const auto l = static_cast<std::size_t>(lag);
    if (values.size() <= l) return out;
    out.reserve(values.size() - l);
    for (std::size_t i = 0; i + l < values.size(); ++i) out.emplace_back(values[i], values[i + l]);
    return out;
}

}  // namespace vatom
