#pragma once

#include "vatom/trig_sum.hpp"

#include <array>
#include <complex>

namespace vatom {

using Roots3 = std::array<double, 3>;

/// Relative gap below which two characteristic roots count as degenerate.
inline constexpr double degeneracy_threshold = 1e-8;
/// How far outside [-1, 1] the arccos argument may drift before it is an error.
inline constexpr double arccos_clamp_tol = 1e-9;

/// Real roots of mu^3 + x1 mu^2 + x2 mu + x3 = 0 by the trigonometric formula,
/// ascending. A vanishing x1^2 - 3 x2 yields the triple root -x1/3.
/// Throws NumericDomainError when the cubic does not have three real roots.
Roots3 solve_cubic_trig(double x1, double x2, double x3);

/// A few guarded Newton steps on each root; never increases a residual.
Roots3 refine_cubic_roots(double x1, double x2, double x3, Roots3 roots);

/// b_j = f1 f2 / ((mu_j - mu_k)(mu_j - mu_l)), in the order of `mu`.
/// Throws InvalidInput for f2 == 0 and DegenerateModes for nearly coincident roots.
std::array<double, 3> mode_weights(double f1, double f2, const Roots3& mu);

/// Roots alpha_1 < alpha_2 of alpha^2 + y1 alpha + y2 = 0 with the weights that
/// give A(0) = 1, C(0) = 0 for the two-amplitude sector whose A-diagonal is v11.
struct QuadraticModes {
    std::array<double, 2> alpha;
    std::array<double, 2> c;
};

/// Throws DecoupledSector when the roots coincide and NumericDomainError when
/// they are complex.
QuadraticModes solve_quadratic(double y1, double y2, double v11);

/// Roots and weights of one three-amplitude sector.
struct CubicModes {
    Roots3 mu{};
    std::array<double, 3> b{};
    bool degenerate = false;
};

// ---------------------------------------------------------------------------
// Sector dynamics shared by the one- and two-mode models.
//
// Within a sector the amplitudes (A, B, C) obey i d/dt y = H y with
//
//         | a   0   f1 |
//     H = | 0   b   f2 |
//         | f1  f2  c  |
//
// and y(0) = (1, 0, 0). f2 == 0 leaves a two-level A <-> C problem, f1 == 0 a
// pure phase on A.
// ---------------------------------------------------------------------------

struct SectorHamiltonian {
    double diag_a = 0.0;
    double diag_b = 0.0;
    double diag_c = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
};

enum class SectorKind { three_level, two_level, decoupled, numeric };

const char* to_string(SectorKind kind) noexcept;

struct SectorAmplitudes {
    std::complex<double> A;
    std::complex<double> B;
    std::complex<double> C;

    double norm() const { return std::norm(A) + std::norm(B) + std::norm(C); }
};

/// Closed-form sector solution
///
///     X(t) = exp(-i shift t) * sum_j x_j exp(i nu_j t),   X in {A, B, C},
///
/// with characteristic frequencies mu_j = nu_j - shift. Working relative to
/// `shift` = diag_a keeps the root finding well conditioned when the Kerr
/// phases dwarf the couplings. `numeric` sectors carry no modes and must be
/// evolved by direct integration.
struct ModalExpansion {
    SectorKind kind = SectorKind::decoupled;
    double shift = 0.0;
    int count = 0;
    std::array<double, 3> nu{};
    std::array<double, 3> a{};
    std::array<double, 3> b{};
    std::array<double, 3> c{};

    double mu(int j) const { return nu[static_cast<std::size_t>(j)] - shift; }
};

/// Solves the sector's characteristic equation. Degenerate cubic roots come back
/// as SectorKind::numeric instead of throwing.
ModalExpansion expand_sector(const SectorHamiltonian& h);

/// Amplitudes at time t; `numeric` expansions are rejected (use the ODE oracle).
SectorAmplitudes evaluate(const ModalExpansion& modes, double t);

/// Adds wA |A(t)|^2 + wB |B(t)|^2 + wC |C(t)|^2 to `out` as cosines of the mode
/// frequency differences.
void add_populations(const ModalExpansion& modes, double wA, double wB, double wC, TrigSum& out);

}  // namespace vatom
