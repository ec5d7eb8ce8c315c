#include "vatom/ergodicity.hpp"

#include "vatom/errors.hpp"
#include "vatom/kdtree.hpp"
#include "vatom/parallel.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

namespace vatom {

namespace {

std::size_t fft_size(std::size_t n) {
    std::size_t size = 1;
    while (size < n) size <<= 1;
    return size;
}

std::vector<double> centred(std::span<const double> values) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    std::vector<double> out(values.begin(), values.end());
    for (double& v : out) v -= mean;
    return out;
}

}  // namespace

std::vector<double> autocorrelation(std::span<const double> values, int max_lag) {
    if (values.size() < 2) throw InsufficientData("autocorrelation needs at least two samples");
    if (max_lag < 0) throw InvalidInput("max_lag must be non-negative");
    const std::size_t lags = std::min<std::size_t>(static_cast<std::size_t>(max_lag), values.size() - 1) + 1;

    std::vector<double> x = centred(values);
    x.resize(fft_size(2 * values.size()), 0.0);
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spectrum;
    fft.fwd(spectrum, x);
    for (auto& z : spectrum) z = std::norm(z);
    std::vector<double> acov;
    fft.inv(acov, spectrum);

    std::vector<double> out(lags, 0.0);
    if (acov[0] <= 0.0) return out;
    for (std::size_t k = 0; k < lags; ++k) out[k] = acov[k] / acov[0];
    return out;
}

int default_delay(std::span<const double> values, int max_lag) {
    const auto r = autocorrelation(values, max_lag);
    for (std::size_t k = 1; k < r.size(); ++k) {
        if (r[k] <= 0.0) return static_cast<int>(k);
    }
    for (std::size_t k = 1; k + 1 < r.size(); ++k) {
        if (r[k] < r[k - 1] && r[k] <= r[k + 1]) return static_cast<int>(k);
    }
    return 1;
}

double dominant_period(std::span<const double> values) {
    if (values.size() < 4) throw InsufficientData("dominant_period needs at least four samples");
    std::vector<double> x = centred(values);
    const std::size_t size = fft_size(values.size());
    x.resize(size, 0.0);
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spectrum;
    fft.fwd(spectrum, x);
    std::size_t best = 1;
    double power = -1.0;
    for (std::size_t k = 1; k <= size / 2; ++k) {
        const double p = std::norm(spectrum[k]);
        if (p > power) {
            power = p;
            best = k;
        }
    }
    return static_cast<double>(size) / static_cast<double>(best);
}

EmbeddingReport fnn_embedding_dimension(std::span<const double> values, const FnnOptions& options) {
    if (options.d_max < 1) throw InvalidInput("d_max must be at least 1");
    if (!(options.r_tol > 0.0) || !(options.a_tol > 0.0)) throw InvalidInput("FNN tolerances must be positive");
    if (options.theiler < 0) throw InvalidInput("theiler window must be non-negative");

    EmbeddingReport report;
    report.delay = options.delay > 0 ? options.delay : default_delay(values);
    report.r_tol = options.r_tol;
    report.a_tol = options.a_tol;
    report.theiler = options.theiler;
    report.threshold = options.threshold;

    const std::size_t n = values.size();
    const std::size_t tau = static_cast<std::size_t>(report.delay);
    const std::size_t span_needed = static_cast<std::size_t>(options.d_max) * tau;
    if (n <= span_needed + 2 * static_cast<std::size_t>(options.theiler) + 10) {
        throw InsufficientData("series of " + std::to_string(n) + " samples is too short for d_max = " +
                               std::to_string(options.d_max) + " at delay " + std::to_string(report.delay));
    }

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double attractor_size = std::sqrt(var / static_cast<double>(n));
    if (attractor_size == 0.0) throw InsufficientData("FNN of a constant series");
    const double coincident2 = 1e-18 * attractor_size * attractor_size;

    for (int d = 1; d <= options.d_max; ++d) {
        const std::size_t dim = static_cast<std::size_t>(d);
        const std::size_t rows = n - dim * tau;
        std::vector<double> points(rows * dim);
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t a = 0; a < dim; ++a) points[i * dim + a] = values[i + a * tau];
        }
        std::vector<std::size_t> ids(rows);
        for (std::size_t i = 0; i < rows; ++i) ids[i] = i;
        const KdTree tree(points.data(), rows, dim, std::move(ids));

        const std::size_t refs =
            options.max_references > 0 ? std::min(rows, options.max_references) : rows;
        std::vector<signed char> verdict(refs, -1);  // -1 skipped, 0 true neighbour, 1 false
        parallel_for(refs, options.threads, [&](std::size_t r) {
            const std::size_t i = refs == rows ? r : r * rows / refs;
            // Coincident points say nothing about unfolding, so they are not neighbours.
            const auto hit = tree.nearest(&points[i * dim], [&](std::size_t j) {
                const std::size_t gap = i > j ? i - j : j - i;
                if (gap <= static_cast<std::size_t>(options.theiler)) return false;
                double d2 = 0.0;
                for (std::size_t a = 0; a < dim; ++a) {
                    const double diff = points[i * dim + a] - points[j * dim + a];
                    d2 += diff * diff;
                }
                return d2 > coincident2;
            });
            if (!hit.found()) return;
            const double rd = std::sqrt(hit.dist2);
            const double extra = std::abs(values[i + dim * tau] - values[hit.id + dim * tau]);
            const bool is_false = extra / rd > options.r_tol ||
                                  std::sqrt(hit.dist2 + extra * extra) / attractor_size > options.a_tol;
            verdict[r] = is_false ? 1 : 0;
        });

        std::size_t counted = 0;
        std::size_t false_count = 0;
        for (signed char v : verdict) {
            if (v < 0) continue;
            ++counted;
            false_count += static_cast<std::size_t>(v);
        }
        const double fraction = counted ? static_cast<double>(false_count) / static_cast<double>(counted) : 1.0;
        report.fnn_fraction.push_back(fraction);
        if (report.d_min == 0 && fraction < options.threshold) report.d_min = d;
    }
    report.saturated = report.d_min == 0;
    return report;
}

}  // namespace vatom
