#include "vatom/ergodicity.hpp"

#include "vatom/errors.hpp"
#include "vatom/kdtree.hpp"
#include "vatom/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

namespace vatom {

namespace {

constexpr std::size_t reference_block = 4096;

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

LineFit fit_line(std::span<const double> curve, int lo, int hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = hi - lo + 1;
    for (int k = lo; k <= hi; ++k) {
        const double y = curve[static_cast<std::size_t>(k)];
        sx += k;
        sy += y;
        sxx += static_cast<double>(k) * k;
        sxy += k * y;
    }
    const double vx = sxx - sx * sx / m;
    LineFit f;
    f.slope = vx > 0.0 ? (sxy - sx * sy / m) / vx : 0.0;
    f.intercept = (sy - f.slope * sx) / m;
    return f;
}

}  // namespace

std::pair<int, int> auto_fit_range(std::span<const double> curve) {
    const int last = static_cast<int>(curve.size()) - 1;
    if (last < 1) throw InsufficientData("divergence curve needs at least two points");
    const auto [lo_it, hi_it] = std::minmax_element(curve.begin(), curve.end());
    const double floor = 0.02 * (*hi_it - *lo_it) / last;

    std::pair<int, int> best{0, last};
    int best_len = 0;
    for (int a = 0; a < last; ++a) {
        for (int b = last; b - a + 1 >= 4 && b - a > best_len; --b) {
            const double s = fit_line(curve, a, b).slope;
            if (!(s > floor)) continue;
            bool steady = true;
            for (int k = a; k < b && steady; ++k) {
                const double local = curve[static_cast<std::size_t>(k) + 1] - curve[static_cast<std::size_t>(k)];
                steady = std::abs(local - s) <= 0.2 * s;
            }
            if (steady) {
                best = {a, b};
                best_len = b - a;
                break;
            }
        }
    }
    return best;
}

LyapunovReport rosenstein_mle(std::span<const double> values, const LyapunovOptions& options) {
    if (options.dim < 1 || options.delay < 1 || options.k_max < 1) {
        throw InvalidInput("rosenstein_mle needs dim, delay and k_max >= 1");
    }
    if (!(options.dt > 0.0)) throw InvalidInput("dt must be positive");

    LyapunovReport report;
    report.theiler = options.theiler >= 0 ? options.theiler
                                          : static_cast<int>(std::ceil(dominant_period(values)));

    const std::size_t dim = static_cast<std::size_t>(options.dim);
    const std::size_t tau = static_cast<std::size_t>(options.delay);
    const std::size_t kmax = static_cast<std::size_t>(options.k_max);
    const std::size_t span = (dim - 1) * tau;
    if (values.size() <= span + kmax + 2 * static_cast<std::size_t>(report.theiler) + 2) {
        throw InsufficientData("series too short for the requested embedding and k_max");
    }
    const std::size_t vectors = values.size() - span;
    const std::size_t refs = vectors - kmax;

    std::vector<double> points(vectors * dim);
    for (std::size_t i = 0; i < vectors; ++i) {
        for (std::size_t a = 0; a < dim; ++a) points[i * dim + a] = values[i + a * tau];
    }
    std::vector<std::size_t> ids(refs);
    for (std::size_t i = 0; i < refs; ++i) ids[i] = i;
    const KdTree tree(points.data(), vectors, dim, std::move(ids));

    const auto distance2 = [&](std::size_t i, std::size_t j) {
        double d2 = 0.0;
        for (std::size_t a = 0; a < dim; ++a) {
            const double diff = points[i * dim + a] - points[j * dim + a];
            d2 += diff * diff;
        }
        return d2;
    };

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double coincident2 = 1e-18 * var / static_cast<double>(values.size());

    // Fixed reference blocks with in-order sums keep the curve independent of the thread count.
    const std::size_t blocks = (refs + reference_block - 1) / reference_block;
    std::vector<std::vector<double>> block_sum(blocks, std::vector<double>(kmax + 1, 0.0));
    std::vector<std::vector<std::size_t>> block_count(blocks, std::vector<std::size_t>(kmax + 1, 0));
    std::vector<std::size_t> block_pairs(blocks, 0);
    const std::size_t window = static_cast<std::size_t>(report.theiler);

    parallel_for(blocks, options.threads, [&](std::size_t b) {
        const std::size_t begin = b * reference_block;
        const std::size_t end = std::min(refs, begin + reference_block);
        for (std::size_t i = begin; i < end; ++i) {
            // Exact repeats of a periodic signal would only measure rounding noise.
            const auto hit = tree.nearest(&points[i * dim], [&](std::size_t j) {
                return (i > j ? i - j : j - i) > window && distance2(i, j) > coincident2;
            });
            if (!hit.found()) continue;
            ++block_pairs[b];
            for (std::size_t k = 0; k <= kmax; ++k) {
                const double d = std::sqrt(distance2(i + k, hit.id + k));
                if (d > 0.0) {
                    block_sum[b][k] += std::log(d);
                    ++block_count[b][k];
                }
            }
        }
    });

    std::vector<double> sum(kmax + 1, 0.0);
    std::vector<std::size_t> count(kmax + 1, 0);
    for (std::size_t b = 0; b < blocks; ++b) {
        report.pairs += block_pairs[b];
        for (std::size_t k = 0; k <= kmax; ++k) {
            sum[k] += block_sum[b][k];
            count[k] += block_count[b][k];
        }
    }
    if (report.pairs == 0) throw InsufficientData("no admissible neighbours outside the Theiler window");
    report.divergence_curve.resize(kmax + 1);
    for (std::size_t k = 0; k <= kmax; ++k) {
        if (count[k] == 0) throw InsufficientData("all neighbour pairs coincide at step " + std::to_string(k));
        report.divergence_curve[k] = sum[k] / static_cast<double>(count[k]);
    }

    if (options.fit_range) {
        const auto [lo, hi] = *options.fit_range;
        if (lo < 0 || hi > options.k_max || hi - lo < 1) throw InvalidInput("fit range outside the curve");
        report.fit_lo = lo;
        report.fit_hi = hi;
    } else {
        std::tie(report.fit_lo, report.fit_hi) = auto_fit_range(report.divergence_curve);
    }
    const LineFit fit = fit_line(report.divergence_curve, report.fit_lo, report.fit_hi);
    report.slope = fit.slope;
    report.intercept = fit.intercept;
    report.slope_per_time = fit.slope / options.dt;
    return report;
}

}  // namespace vatom
