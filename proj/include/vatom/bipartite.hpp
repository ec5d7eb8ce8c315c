#pragma once

#include "vatom/density.hpp"
#include "vatom/eigenmodes.hpp"
#include "vatom/field_states.hpp"
#include "vatom/trig_sum.hpp"

#include <array>
#include <vector>

namespace vatom {

/// V-type atom coupled to one Kerr mode. Rates are inverse times; hbar = 1.
/// Detunings and carrier frequencies are carried for completeness; the
/// closed-form evolution needs both detunings to be zero, and the carriers drop
/// out of the interaction picture.
struct BipartiteParams {
    double chi = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double detuning1 = 0.0;
    double detuning2 = 0.0;
    std::array<double, 3> level_frequencies{};
    double field_frequency = 0.0;

    /// Throws InvalidInput on negative or non-finite rates, or nonzero detuning.
    void validate() const;
};

/// Photon-number sector n: basis |1;n>, |2;n>, |3;n+1>.
struct BipartiteSector {
    int n = 0;
    double V1 = 0.0;  ///< chi n (n-1)
    double V2 = 0.0;  ///< chi n (n+1)
    double f1 = 0.0;  ///< lambda1 sqrt(n+1)
    double f2 = 0.0;  ///< lambda2 sqrt(n+1)
    Roots3 cubic{};   ///< (x1, x2, x3) of the characteristic cubic in mu
    ModalExpansion modes;

    SectorHamiltonian hamiltonian() const { return {V1, V1, V2, f1, f2}; }
    bool decoupled() const { return modes.kind == SectorKind::decoupled; }
    bool numeric_fallback() const { return modes.kind == SectorKind::numeric; }
};

BipartiteSector build_sector(int n, const BipartiteParams& params);

/// (A_n, B_n, C_{n+1}) at time t. Degenerate sectors are integrated numerically.
SectorAmplitudes sector_amplitudes(const BipartiteSector& sector, double t);

/// Per-sector amplitudes at one instant; entry n holds (A_n, B_n, C_{n+1}).
struct BipartiteAmplitudes {
    double t = 0.0;
    std::vector<SectorAmplitudes> sectors;
};

/// 3x3 atomic state, basis order |1>, |2>, |3>.
ReducedDensityMatrix atom_reduced_density(const FieldState& field0, const BipartiteAmplitudes& amps);

/// Field state on photon numbers 0..cutoff+1.
ReducedDensityMatrix field_reduced_density(const FieldState& field0, const BipartiteAmplitudes& amps);

/// Atom starting in |1>, field in `field0`; all sectors up to the field cutoff
/// are solved once at construction.
class BipartiteModel {
public:
    BipartiteModel(const BipartiteParams& params, FieldState field0);

    const BipartiteParams& params() const noexcept { return params_; }
    const FieldState& field() const noexcept { return field0_; }
    const std::vector<BipartiteSector>& sectors() const noexcept { return sectors_; }
    bool has_numeric_sectors() const noexcept { return numeric_sectors_ > 0; }

    BipartiteAmplitudes amplitudes(double t) const;

    /// <a^dagger a>(t) from the sector populations, without building rho_F.
    double mean_photon_number(double t) const;

    /// Populations of |1> and |2> (diagonal of rho_A).
    std::array<double, 2> excited_populations(double t) const;

    /// <a^dagger a>(t) as a constant plus cosines; false (and `out` untouched)
    /// when some sector needs numeric integration.
    bool mean_photon_expansion(TrigSum& out) const;

private:
    BipartiteParams params_;
    FieldState field0_;
    std::vector<BipartiteSector> sectors_;
    int numeric_sectors_ = 0;
};

}  // namespace vatom
