#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace vatom {

/// Seeded generator whose streams are identical on every platform: the engine is
/// fully specified by the standard and the distributions are done by hand.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Standard normal by Box-Muller.
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Test signals for calibrating the time-series tools.
std::vector<double> logistic_map(std::size_t n, double x0 = 0.3, double r = 4.0, std::size_t discard = 1000);
std::vector<double> sinusoid(std::size_t n, double period, double amplitude = 1.0, double phase = 0.0);
/// Sinusoid plus white Gaussian noise at the given signal-to-noise power ratio.
std::vector<double> noisy_sinusoid(std::size_t n, double period, double snr, std::uint64_t seed);
std::vector<double> white_noise(std::size_t n, std::uint64_t seed);
std::vector<double> uniform_noise(std::size_t n, std::uint64_t seed);

}  // namespace vatom
