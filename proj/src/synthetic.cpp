#include "vatom/synthetic.hpp"

#include "vatom/errors.hpp"

#include <cmath>
#include <numbers>

namespace vatom {

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

std::vector<double> logistic_map(std::size_t n, double x0, double r, std::size_t discard) {
    if (!(x0 > 0.0 && x0 < 1.0)) throw InvalidInput("logistic map seed must lie in (0, 1)");
    double x = x0;
    for (std::size_t i = 0; i < discard; ++i) x = r * x * (1.0 - x);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = x;
        x = r * x * (1.0 - x);
    }
    return out;
}

std::vector<double> sinusoid(std::size_t n, double period, double amplitude, double phase) {
    if (!(period > 0.0)) throw InvalidInput("sinusoid period must be positive");
    std::vector<double> out(n);
    const double w = 2.0 * std::numbers::pi / period;
    for (std::size_t i = 0; i < n; ++i) out[i] = amplitude * std::sin(w * static_cast<double>(i) + phase);
    return out;
}

std::vector<double> noisy_sinusoid(std::size_t n, double period, double snr, std::uint64_t seed) {
    if (!(snr > 0.0)) throw InvalidInput("snr must be positive");
    std::vector<double> out = sinusoid(n, period);
    const double sigma = std::sqrt(0.5 / snr);
    Rng rng(seed);
    for (double& v : out) v += sigma * rng.normal();
    return out;
}

std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (double& v : out) v = rng.normal();
    return out;
}

std::vector<double> uniform_noise(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (double& v : out) v = rng.uniform();
    return out;
}

}  // namespace vatom
