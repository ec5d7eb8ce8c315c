#include "vatom/ode_oracle.hpp"

#include "vatom/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace vatom {

namespace {

using Mat3 = Eigen::Matrix3cd;
using Vec3 = Eigen::Vector3cd;

// H minus a multiple of the identity. The removed phase exp(-i shift t) is
// restored on output, so the integrator only resolves the spread of the
// diagonal rather than its absolute size.
struct RotatingFrame {
    double shift = 0.0;
    Eigen::Matrix3d h;
    double spread = 0.0;
};

RotatingFrame make_frame(const SectorHamiltonian& h) {
    RotatingFrame f;
    const double lo = std::min({h.diag_a, h.diag_b, h.diag_c});
    const double hi = std::max({h.diag_a, h.diag_b, h.diag_c});
    f.shift = 0.5 * (lo + hi);
    f.h << h.diag_a - f.shift, 0.0, h.f1,
           0.0, h.diag_b - f.shift, h.f2,
           h.f1, h.f2, h.diag_c - f.shift;
    for (int r = 0; r < 3; ++r) f.spread = std::max(f.spread, f.h.row(r).cwiseAbs().sum());
    return f;
}

// For the linear system y' = -i H y one RK4 step is y -> (I + D) y with
// D = X + X^2/2 + X^3/6 + X^4/24, X = -i H step.
Mat3 rk4_increment(const Eigen::Matrix3d& h, double step) {
    const Mat3 x = std::complex<double>(0.0, -step) * h.cast<std::complex<double>>();
    const Mat3 x2 = x * x;
    const Mat3 x3 = x2 * x;
    const Mat3 x4 = x3 * x;
    return x + x2 / 2.0 + x3 / 6.0 + x4 / 24.0;
}

// (I + D)^k - I by binary powering. Carrying the increment instead of the full
// matrix keeps rounding relative to |D| rather than to 1, so long runs of tiny
// steps do not pile up O(k * eps) error.
Mat3 power_increment(Mat3 d, long k) {
    Mat3 result = Mat3::Zero();
    while (k > 0) {
        if (k & 1) result = (result + d + result * d).eval();
        d = (2.0 * d + d * d).eval();
        k >>= 1;
    }
    return result;
}

SectorAmplitudes to_amplitudes(const Vec3& y, double phase) {
    const std::complex<double> g = std::polar(1.0, phase);
    return {y(0) * g, y(1) * g, y(2) * g};
}

}  // namespace

AmplitudeTrajectory rk4_trajectory(const SectorHamiltonian& h, double step, long steps_per_sample, int samples) {
    if (!(step > 0.0) || steps_per_sample < 1 || samples < 0) {
        throw InvalidInput("rk4_trajectory: need step > 0, steps_per_sample >= 1, samples >= 0");
    }
    const RotatingFrame frame = make_frame(h);
    const Mat3 stride = power_increment(rk4_increment(frame.h, step), steps_per_sample);
    const double interval = step * static_cast<double>(steps_per_sample);

    AmplitudeTrajectory out;
    out.step = step;
    out.times.reserve(static_cast<std::size_t>(samples) + 1);
    out.values.reserve(static_cast<std::size_t>(samples) + 1);

    Vec3 y(1.0, 0.0, 0.0);
    out.times.push_back(0.0);
    out.values.push_back(to_amplitudes(y, 0.0));
    for (int s = 1; s <= samples; ++s) {
        y += stride * y;
        const double t = interval * s;
        out.times.push_back(t);
        out.values.push_back(to_amplitudes(y, -frame.shift * t));
        out.max_norm_drift = std::max(out.max_norm_drift, std::abs(y.squaredNorm() - 1.0));
    }
    return out;
}

AmplitudeTrajectory integrate_sector(const SectorHamiltonian& h, const IntegratorConfig& config) {
    if (!(config.t_end >= 0.0) || !std::isfinite(config.t_end)) {
        throw InvalidInput("integrator t_end must be finite and non-negative");
    }
    if (config.step <= 0.0 && !(config.phase_per_step > 0.0)) {
        throw InvalidInput("integrator needs a positive step or phase_per_step");
    }
    if (config.t_end == 0.0) {
        AmplitudeTrajectory out;
        out.times = {0.0};
        out.values = {SectorAmplitudes{1.0, 0.0, 0.0}};
        return out;
    }

    const RotatingFrame frame = make_frame(h);
    double step = config.step;
    if (step <= 0.0) {
        step = frame.spread > 0.0 ? config.phase_per_step / frame.spread : config.t_end;
    }
    const double requested = config.sample_interval > 0.0 ? config.sample_interval : config.t_end;
    const int samples = static_cast<int>(std::max<long long>(1, std::llround(config.t_end / requested)));
    const double interval = config.t_end / samples;
    const long per_sample = std::max<long>(1, static_cast<long>(std::ceil(interval / step)));
    step = interval / static_cast<double>(per_sample);

    const AmplitudeTrajectory coarse = rk4_trajectory(h, step, per_sample, samples);
    AmplitudeTrajectory fine = rk4_trajectory(h, step / 2.0, 2 * per_sample, samples);

    double diff = 0.0;
    for (std::size_t i = 0; i < fine.values.size(); ++i) {
        const auto& a = coarse.values[i];
        const auto& b = fine.values[i];
        diff = std::max({diff, std::abs(a.A - b.A), std::abs(a.B - b.B), std::abs(a.C - b.C)});
    }
    fine.error_estimate = diff * 16.0 / 15.0;

    if (fine.max_norm_drift > config.max_norm_drift) {
        throw StepSizeError("norm drift " + std::to_string(fine.max_norm_drift) + " exceeds bound; reduce the step");
    }
    if (config.tolerance > 0.0 && fine.error_estimate > config.tolerance) {
        throw StepSizeError("step-halving error estimate " + std::to_string(fine.error_estimate) +
                            " exceeds tolerance; reduce the step");
    }
    return fine;
}

AmplitudeTrajectory integrate_bipartite_sector(const BipartiteSector& sector, const IntegratorConfig& config) {
    return integrate_sector(sector.hamiltonian(), config);
}

AmplitudeTrajectory integrate_tripartite_sector(const TripartiteSector& sector, const IntegratorConfig& config) {
    return integrate_sector(sector.hamiltonian(), config);
}

SectorAmplitudes propagate_sector(const SectorHamiltonian& h, double t) {
    if (t < 0.0) throw InvalidInput("propagate_sector: negative time");
    IntegratorConfig config;
    config.t_end = t;
    config.sample_interval = t;
    return integrate_sector(h, config).values.back();
}

FieldState kerr_evolution(const FieldState& state, double chi, double t) {
    std::vector<cplx> q(state.amplitudes().begin(), state.amplitudes().end());
    for (std::size_t n = 0; n < q.size(); ++n) {
        const double nn = static_cast<double>(n) * (static_cast<double>(n) - 1.0);
        q[n] *= std::polar(1.0, -chi * t * nn);
    }
    return FieldState(std::move(q), state.tail_mass());
}

double fidelity(const FieldState& a, const FieldState& b) {
    const double na = a.retained_norm();
    const double nb = b.retained_norm();
    if (na == 0.0 || nb == 0.0) throw InvalidInput("fidelity of an empty state");
    return std::norm(overlap(a, b)) / (na * nb);
}

}  // namespace vatom
