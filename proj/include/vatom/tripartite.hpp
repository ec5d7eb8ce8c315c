#pragma once

#include "vatom/density.hpp"
#include "vatom/eigenmodes.hpp"
#include "vatom/field_states.hpp"
#include "vatom/trig_sum.hpp"

#include <array>
#include <vector>

namespace vatom {

/// V-type atom with mode F1 driving |3> <-> |1> and mode F2 driving |3> <-> |2>.
struct TripartiteParams {
    double chi1 = 0.0;
    double chi2 = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double detuning1 = 0.0;
    double detuning2 = 0.0;
    std::array<double, 3> level_frequencies{};
    double field1_frequency = 0.0;
    double field2_frequency = 0.0;

    void validate() const;
};

/// Sector (n, m): basis |1;n;m>, |2;n+1;m-1>, |3;n+1;m>. For m = 0 the middle
/// state does not exist and B stays identically zero.
struct TripartiteSector {
    int n = 0;
    int m = 0;
    double V11 = 0.0;  ///< chi1 n (n-1)
    double V12 = 0.0;  ///< chi1 n (n+1)
    double V21 = 0.0;  ///< chi2 (m-1)(m-2)
    double V22 = 0.0;  ///< chi2 m (m-1)
    double f1 = 0.0;   ///< lambda1 sqrt(n+1)
    double f2 = 0.0;   ///< lambda2 sqrt(m)
    /// (x1, x2, x3) of the cubic for m >= 1; (y1, y2, 0) of the quadratic for m = 0.
    Roots3 characteristic{};
    ModalExpansion modes;

    SectorHamiltonian hamiltonian() const;
    bool numeric_fallback() const { return modes.kind == SectorKind::numeric; }
};

TripartiteSector build_sector_2mode(int n, int m, const TripartiteParams& params);

SectorAmplitudes sector_amplitudes_2mode(const TripartiteSector& sector, double t);

/// Amplitudes on the (n, m) grid, row-major in n: index n * (cutoff2 + 1) + m.
struct TripartiteAmplitudes {
    double t = 0.0;
    int cutoff1 = 0;
    int cutoff2 = 0;
    std::vector<SectorAmplitudes> sectors;

    const SectorAmplitudes& at(int n, int m) const {
        return sectors[static_cast<std::size_t>(n) * static_cast<std::size_t>(cutoff2 + 1) +
                       static_cast<std::size_t>(m)];
    }
};

/// State of F1 on photon numbers 0..cutoff1+1.
ReducedDensityMatrix field1_reduced_density(const FieldState& field1_0, const FieldState& field2_0,
                                            const TripartiteAmplitudes& amps);

/// State of the atom together with F2, built directly from the full wavefunction.
/// Basis index j * (cutoff2 + 1) + l for atomic level j+1 and F2 photon number l.
ReducedDensityMatrix atom_field2_reduced_density(const FieldState& field1_0, const FieldState& field2_0,
                                                 const TripartiteAmplitudes& amps);

class TripartiteModel {
public:
    TripartiteModel(const TripartiteParams& params, FieldState field1, FieldState field2);

    const TripartiteParams& params() const noexcept { return params_; }
    const FieldState& field1() const noexcept { return field1_; }
    const FieldState& field2() const noexcept { return field2_; }
    const std::vector<TripartiteSector>& sectors() const noexcept { return sectors_; }
    const TripartiteSector& sector(int n, int m) const;
    bool has_numeric_sectors() const noexcept { return numeric_sectors_ > 0; }

    TripartiteAmplitudes amplitudes(double t, int threads = 1) const;

    /// <a1^dagger a1>(t) from the diagonal only.
    double mean_photon_number(double t) const;

    /// Same observable as a cosine sum; false when a sector needs numeric integration.
    bool mean_photon_expansion(TrigSum& out) const;

private:
    TripartiteParams params_;
    FieldState field1_;
    FieldState field2_;
    std::vector<TripartiteSector> sectors_;
    int numeric_sectors_ = 0;
};

}  // namespace vatom
