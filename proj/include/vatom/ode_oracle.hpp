#pragma once

#include "vatom/bipartite.hpp"
#include "vatom/eigenmodes.hpp"
#include "vatom/field_states.hpp"
#include "vatom/tripartite.hpp"

#include <vector>

namespace vatom {

/// Fixed-step classical fourth-order Runge-Kutta settings.
///
/// `step` <= 0 picks step = phase_per_step / (spectral bound of the sector).
/// Samples are reported every `sample_interval` (<= 0: only t = 0 and t_end);
/// the step is shrunk slightly so that samples fall on step boundaries.
struct IntegratorConfig {
    double step = 0.0;
    double t_end = 0.0;
    double sample_interval = 0.0;
    double phase_per_step = 1e-3;
    /// Bound on the step-halving error estimate; <= 0 disables the check.
    double tolerance = 1e-9;
    double max_norm_drift = 1e-9;
};

struct AmplitudeTrajectory {
    std::vector<double> times;
    std::vector<SectorAmplitudes> values;
    double step = 0.0;
    /// Richardson estimate |y_h - y_{h/2}| * 16/15, maximised over samples.
    double error_estimate = 0.0;
    double max_norm_drift = 0.0;
};

/// Plain RK4 run with step `step`, sampled every `steps_per_sample` steps for
/// `samples` intervals. No accuracy checks; used for convergence studies.
AmplitudeTrajectory rk4_trajectory(const SectorHamiltonian& h, double step, long steps_per_sample, int samples);

/// Checked integration from (1, 0, 0): runs at h and h/2, returns the h/2 run.
/// Throws StepSizeError when the norm drifts or the error estimate exceeds the tolerance.
AmplitudeTrajectory integrate_sector(const SectorHamiltonian& h, const IntegratorConfig& config);

AmplitudeTrajectory integrate_bipartite_sector(const BipartiteSector& sector, const IntegratorConfig& config);
AmplitudeTrajectory integrate_tripartite_sector(const TripartiteSector& sector, const IntegratorConfig& config);

/// Amplitudes at a single time; the fallback for sectors with degenerate roots.
SectorAmplitudes propagate_sector(const SectorHamiltonian& h, double t);

/// Pure Kerr evolution q_n -> exp(-i chi n(n-1) t) q_n.
FieldState kerr_evolution(const FieldState& state, double chi, double t);

/// |<a|b>|^2 / (<a|a><b|b>) over the retained Fock range.
double fidelity(const FieldState& a, const FieldState& b);

}  // namespace vatom
