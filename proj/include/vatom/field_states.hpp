#pragma once

#include <complex>
#include <span>
#include <vector>

namespace vatom {

using cplx = std::complex<double>;

/// Default truncation tolerance for the probability mass dropped by a Fock cutoff.
inline constexpr double default_tail_tol = 1e-10;

/// Largest cutoff auto_cutoff will consider.
inline constexpr int max_auto_cutoff = 10000;

/// Truncated Fock-basis field state: amplitudes q_0..q_cutoff plus the probability
/// mass lost to the truncation. Immutable once built.
class FieldState {
public:
    FieldState(std::vector<cplx> amplitudes, double tail_mass);

    int cutoff() const noexcept { return static_cast<int>(amplitudes_.size()) - 1; }
    double tail_mass() const noexcept { return tail_mass_; }
    std::span<const cplx> amplitudes() const noexcept { return amplitudes_; }

    /// q_n, zero outside [0, cutoff].
    cplx amplitude(int n) const noexcept;
    /// |q_n|^2, zero outside [0, cutoff].
    double probability(int n) const noexcept;
    /// Sum of |q_n|^2 over the retained amplitudes.
    double retained_norm() const;

private:
    std::vector<cplx> amplitudes_;
    double tail_mass_;
};

/// Coherent state |alpha> truncated at `cutoff`.
FieldState coherent_coefficients(cplx alpha, int cutoff);

/// m-photon-added coherent state (a^dagger)^m |alpha>, normalised, truncated at `cutoff`.
/// Requires cutoff >= m. For m = 0 this is the coherent state.
FieldState pacs_coefficients(cplx alpha, int m, int cutoff);

/// Smallest cutoff whose truncated state leaves less than `tail_tol` probability behind.
/// Throws ResourceError past max_auto_cutoff.
int auto_cutoff(cplx alpha, int m, double tail_tol = default_tail_tol);

/// Laguerre polynomial L_m(x) by upward recurrence.
double laguerre(int m, double x);

/// <a|b> over the common Fock range.
cplx overlap(const FieldState& a, const FieldState& b);

}  // namespace vatom
