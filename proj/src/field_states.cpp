#include "vatom/field_states.hpp"

#include "vatom/errors.hpp"

#include <cmath>
#include <string>

namespace vatom {

namespace {

// Neumaier-compensated accumulator; tail masses are formed as 1 - sum and need the low bits.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

void require_finite(cplx alpha) {
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
        throw InvalidInput("field amplitude alpha must be finite");
    }
}

// log|q_k| for the m-PACS photon distribution, k >= m, built by the ratio
// |q_{k+1}/q_k| = |alpha| sqrt(k+1) / (k+1-m).
class PacsLogMagnitudes {
public:
    PacsLogMagnitudes(double abs_alpha, int m) : m_(m) {
        const double x = abs_alpha * abs_alpha;
        log_mag_ = -0.5 * x - 0.5 * std::log(laguerre(m, -x));
        log_abs_alpha_ = std::log(abs_alpha);
        k_ = m;
    }

    int index() const noexcept { return k_; }
    double value() const noexcept { return log_mag_; }

    void advance() {
        log_mag_ += log_abs_alpha_ + 0.5 * std::log(static_cast<double>(k_ + 1)) -
                    std::log(static_cast<double>(k_ + 1 - m_));
        ++k_;
    }

private:
    int m_;
    double log_mag_;
    double log_abs_alpha_;
    int k_;
};

}  // namespace

FieldState::FieldState(std::vector<cplx> amplitudes, double tail_mass)
    : amplitudes_(std::move(amplitudes)), tail_mass_(tail_mass) {
    if (amplitudes_.empty()) {
        throw InvalidInput("field state needs at least one amplitude");
    }
    if (!(tail_mass_ >= 0.0) || tail_mass_ > 1.0) {
        throw InvalidInput("tail mass must lie in [0, 1]");
    }
}

cplx FieldState::amplitude(int n) const noexcept {
    if (n < 0 || n > cutoff()) return {0.0, 0.0};
    return amplitudes_[static_cast<std::size_t>(n)];
}

double FieldState::probability(int n) const noexcept { return std::norm(amplitude(n)); }

double FieldState::retained_norm() const {
    CompensatedSum sum;
    for (const cplx& a : amplitudes_) sum.add(std::norm(a));
    return sum.value();
}

double laguerre(int m, double x) {
    if (m < 0) throw InvalidInput("Laguerre order must be non-negative");
    double prev = 1.0;
    if (m == 0) return prev;
    double cur = 1.0 - x;
    for (int k = 1; k < m; ++k) {
        const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

FieldState coherent_coefficients(cplx alpha, int cutoff) { return pacs_coefficients(alpha, 0, cutoff); }

FieldState pacs_coefficients(cplx alpha, int m, int cutoff) {
    require_finite(alpha);
    if (m < 0) throw InvalidInput("photon-addition order m must be non-negative");
    if (cutoff < m) {
        throw InvalidInput("cutoff " + std::to_string(cutoff) + " below photon-addition order " +
                           std::to_string(m));
    }

    std::vector<cplx> q(static_cast<std::size_t>(cutoff) + 1, cplx{0.0, 0.0});
    const double r = std::abs(alpha);
    if (r == 0.0) {
        q[static_cast<std::size_t>(m)] = 1.0;
        return FieldState(std::move(q), 0.0);
    }

    const double phase = std::arg(alpha);
    PacsLogMagnitudes log_mag(r, m);
    CompensatedSum norm;
    for (int k = m; k <= cutoff; ++k) {
        const double mag = std::exp(log_mag.value());
        q[static_cast<std::size_t>(k)] = std::polar(mag, (k - m) * phase);
        norm.add(mag * mag);
        log_mag.advance();
    }
    const double tail = std::max(0.0, 1.0 - norm.value());
    return FieldState(std::move(q), tail);
}

int auto_cutoff(cplx alpha, int m, double tail_tol) {
    require_finite(alpha);
    if (m < 0) throw InvalidInput("photon-addition order m must be non-negative");
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw InvalidInput("tail tolerance must lie in (0, 1)");

    const double r = std::abs(alpha);
    if (r == 0.0) return m;

    PacsLogMagnitudes log_mag(r, m);
    CompensatedSum norm;
    for (int k = m; k <= max_auto_cutoff; ++k) {
        const double mag = std::exp(log_mag.value());
        norm.add(mag * mag);
        if (1.0 - norm.value() < tail_tol) return k;
        log_mag.advance();
    }
    throw ResourceError("auto_cutoff: tail tolerance not reached below cutoff " +
                        std::to_string(max_auto_cutoff));
}

cplx overlap(const FieldState& a, const FieldState& b) {
    const int top = std::min(a.cutoff(), b.cutoff());
    cplx sum{0.0, 0.0};
    for (int n = 0; n <= top; ++n) sum += std::conj(a.amplitude(n)) * b.amplitude(n);
    return sum;
}

}  // namespace vatom
