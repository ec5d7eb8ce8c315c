#include "vatom/trig_sum.hpp"

#include "vatom/parallel.hpp"

#include <array>
#include <cmath>

namespace vatom {

void TrigSum::add_cosine(double omega, double weight) {
    if (weight == 0.0) return;
    if (omega == 0.0) {
        constant_ += weight;
        return;
    }
    omega_.push_back(omega);
    weight_.push_back(weight);
}

double TrigSum::evaluate(double t) const {
    double sum = constant_;
    for (std::size_t k = 0; k < omega_.size(); ++k) sum += weight_[k] * std::cos(omega_[k] * t);
    return sum;
}

std::vector<double> TrigSum::evaluate_grid(double t0, double dt, std::size_t count, int threads) const {
    std::vector<double> out(count, constant_);
    if (count == 0 || omega_.empty()) return out;

    // Pad the term list to a multiple of four so the inner loop keeps four
    // independent partial sums with a fixed association order.
    const std::size_t n_terms = (omega_.size() + 3) / 4 * 4;
    std::vector<double> step_re(n_terms, 1.0), step_im(n_terms, 0.0), weight(n_terms, 0.0);
    for (std::size_t k = 0; k < omega_.size(); ++k) {
        step_re[k] = std::cos(omega_[k] * dt);
        step_im[k] = std::sin(omega_[k] * dt);
        weight[k] = weight_[k];
    }

    const std::size_t n_blocks = (count + block_size - 1) / block_size;
    parallel_for(n_blocks, threads, [&](std::size_t block) {
        const std::size_t begin = block * block_size;
        const std::size_t end = std::min(count, begin + block_size);
        const double t_start = t0 + static_cast<double>(begin) * dt;

        std::vector<double> z_re(n_terms, 0.0), z_im(n_terms, 0.0);
        for (std::size_t k = 0; k < omega_.size(); ++k) {
            z_re[k] = std::cos(omega_[k] * t_start);
            z_im[k] = std::sin(omega_[k] * t_start);
        }

        for (std::size_t i = begin; i < end; ++i) {
            std::array<double, 4> acc{0.0, 0.0, 0.0, 0.0};
            for (std::size_t k = 0; k < n_terms; k += 4) {
                for (std::size_t lane = 0; lane < 4; ++lane) {
                    const std::size_t j = k + lane;
                    acc[lane] += weight[j] * z_re[j];
                    const double re = z_re[j] * step_re[j] - z_im[j] * step_im[j];
                    const double im = z_re[j] * step_im[j] + z_im[j] * step_re[j];
                    z_re[j] = re;
                    z_im[j] = im;
                }
            }
            out[i] += (acc[0] + acc[1]) + (acc[2] + acc[3]);
        }
    });
    return out;
}

}  // namespace vatom
