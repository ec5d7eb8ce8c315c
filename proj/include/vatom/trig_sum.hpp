#pragma once

#include <cstddef>
#include <vector>

namespace vatom {

/// f(t) = c + sum_k w_k cos(omega_k t).
///
/// Every observable that only needs sector populations reduces to this form,
/// which is what makes 10^6-10^7 point series cheap: grid evaluation advances
/// each cosine by a complex rotation and re-seeds it exactly at the start of
/// every fixed-size block. Block boundaries do not depend on the thread count,
/// so results are bit-identical for any number of workers.
class TrigSum {
public:
    static constexpr std::size_t block_size = 1024;

    void add_constant(double c) { constant_ += c; }
    void add_cosine(double omega, double weight);

    double constant() const noexcept { return constant_; }
    std::size_t terms() const noexcept { return omega_.size(); }

    double evaluate(double t) const;
    std::vector<double> evaluate_grid(double t0, double dt, std::size_t count, int threads = 0) const;

private:
    double constant_ = 0.0;
    std::vector<double> omega_;
    std::vector<double> weight_;
};

}  // namespace vatom
