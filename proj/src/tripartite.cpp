#include "vatom/tripartite.hpp"

#include "vatom/errors.hpp"
#include "vatom/ode_oracle.hpp"
#include "vatom/parallel.hpp"

#include <cmath>
#include <string>

namespace vatom {

namespace {

void require_rate(double value, const char* name) {
    if (!std::isfinite(value) || value < 0.0) {
        throw InvalidInput(std::string(name) + " must be finite and non-negative");
    }
}

void require_grid(const FieldState& f1, const FieldState& f2, const TripartiteAmplitudes& amps) {
    const auto expected = static_cast<std::size_t>(f1.cutoff() + 1) * static_cast<std::size_t>(f2.cutoff() + 1);
    if (amps.cutoff1 != f1.cutoff() || amps.cutoff2 != f2.cutoff() || amps.sectors.size() != expected) {
        throw InvalidInput("amplitude grid does not match the field cutoffs");
    }
}

}  // namespace

void TripartiteParams::validate() const {
    require_rate(chi1, "chi1");
    require_rate(chi2, "chi2");
    require_rate(lambda1, "lambda1");
    require_rate(lambda2, "lambda2");
    if (detuning1 != 0.0 || detuning2 != 0.0) {
        throw InvalidInput("the closed-form solver requires zero detunings");
    }
}

SectorHamiltonian TripartiteSector::hamiltonian() const {
    return {V11 + V22, V12 + V21, V12 + V22, f1, f2};
}

TripartiteSector build_sector_2mode(int n, int m, const TripartiteParams& params) {
    if (n < 0 || m < 0) throw InvalidInput("sector indices must be non-negative");
    const double nd = n;
    const double md = m;
    TripartiteSector s;
    s.n = n;
    s.m = m;
    s.V11 = params.chi1 * nd * (nd - 1.0);
    s.V12 = params.chi1 * nd * (nd + 1.0);
    s.V21 = params.chi2 * (md - 1.0) * (md - 2.0);
    s.V22 = params.chi2 * md * (md - 1.0);
    s.f1 = params.lambda1 * std::sqrt(nd + 1.0);
    s.f2 = params.lambda2 * std::sqrt(md);

    if (m == 0) {
        // Only |1;n;0> <-> |3;n+1;0>; V21 refers to a state that does not exist.
        s.V21 = 0.0;
        s.characteristic = {s.V11 + s.V12, s.V11 * s.V12 - s.f1 * s.f1, 0.0};
    } else {
        const double a = s.V11 + s.V22;
        const double b = s.V12 + s.V21;
        const double c = s.V12 + s.V22;
        const double f11 = s.f1 * s.f1;
        const double f22 = s.f2 * s.f2;
        s.characteristic = {a + b + c, a * b + b * c + c * a - f11 - f22, a * b * c - f11 * b - f22 * a};
    }
    s.modes = expand_sector(s.hamiltonian());
    return s;
}

SectorAmplitudes sector_amplitudes_2mode(const TripartiteSector& sector, double t) {
    if (sector.numeric_fallback()) return propagate_sector(sector.hamiltonian(), t);
    return evaluate(sector.modes, t);
}

ReducedDensityMatrix field1_reduced_density(const FieldState& field1_0, const FieldState& field2_0,
                                            const TripartiteAmplitudes& amps) {
    require_grid(field1_0, field2_0, amps);
    const int c1 = field1_0.cutoff();
    const int c2 = field2_0.cutoff();
    const Eigen::Index dim = c1 + 2;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);

    // Atom in |1>: F1 holds n photons.
    for (int n = 0; n <= c1; ++n) {
        for (int np = n; np <= c1; ++np) {
            cplx acc{};
            for (int l = 0; l <= c2; ++l) {
                acc += field2_0.probability(l) * amps.at(n, l).A * std::conj(amps.at(np, l).A);
            }
            rho(n, np) += field1_0.amplitude(n) * std::conj(field1_0.amplitude(np)) * acc;
        }
    }
    // Atom in |2> or |3>: F1 holds n photons from sector n-1.
    for (int n = 1; n <= c1 + 1; ++n) {
        for (int np = n; np <= c1 + 1; ++np) {
            cplx acc{};
            for (int l = 0; l < c2; ++l) {
                acc += field2_0.probability(l + 1) * amps.at(n - 1, l + 1).B * std::conj(amps.at(np - 1, l + 1).B);
            }
            for (int l = 0; l <= c2; ++l) {
                acc += field2_0.probability(l) * amps.at(n - 1, l).C * std::conj(amps.at(np - 1, l).C);
            }
            rho(n, np) += field1_0.amplitude(n - 1) * std::conj(field1_0.amplitude(np - 1)) * acc;
        }
    }
    for (Eigen::Index i = 0; i < dim; ++i) {
        rho(i, i) = rho(i, i).real();
        for (Eigen::Index j = i + 1; j < dim; ++j) rho(j, i) = std::conj(rho(i, j));
    }
    return {rho, field1_0.tail_mass() + field2_0.tail_mass()};
}

ReducedDensityMatrix atom_field2_reduced_density(const FieldState& field1_0, const FieldState& field2_0,
                                                 const TripartiteAmplitudes& amps) {
    require_grid(field1_0, field2_0, amps);
    const int c1 = field1_0.cutoff();
    const int c2 = field2_0.cutoff();
    const Eigen::Index cols = c2 + 1;

    // psi(F1 photons, level * (c2 + 1) + F2 photons)
    Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(c1 + 2, 3 * cols);
    for (int n = 0; n <= c1; ++n) {
        for (int m = 0; m <= c2; ++m) {
            const cplx w = field1_0.amplitude(n) * field2_0.amplitude(m);
            const auto& s = amps.at(n, m);
            psi(n, m) += w * s.A;
            if (m >= 1) psi(n + 1, cols + m - 1) += w * s.B;
            psi(n + 1, 2 * cols + m) += w * s.C;
        }
    }
    return {psi.transpose() * psi.conjugate(), field1_0.tail_mass() + field2_0.tail_mass()};
}

TripartiteModel::TripartiteModel(const TripartiteParams& params, FieldState field1, FieldState field2)
    : params_(params), field1_(std::move(field1)), field2_(std::move(field2)) {
    params_.validate();
    const int c1 = field1_.cutoff();
    const int c2 = field2_.cutoff();
    sectors_.reserve(static_cast<std::size_t>(c1 + 1) * static_cast<std::size_t>(c2 + 1));
    for (int n = 0; n <= c1; ++n) {
        for (int m = 0; m <= c2; ++m) {
            sectors_.push_back(build_sector_2mode(n, m, params_));
            if (sectors_.back().numeric_fallback()) ++numeric_sectors_;
        }
    }
}

const TripartiteSector& TripartiteModel::sector(int n, int m) const {
    if (n < 0 || n > field1_.cutoff() || m < 0 || m > field2_.cutoff()) {
        throw InvalidInput("sector index outside the field cutoffs");
    }
    return sectors_[static_cast<std::size_t>(n) * static_cast<std::size_t>(field2_.cutoff() + 1) +
                    static_cast<std::size_t>(m)];
}

TripartiteAmplitudes TripartiteModel::amplitudes(double t, int threads) const {
    TripartiteAmplitudes out;
    out.t = t;
    out.cutoff1 = field1_.cutoff();
    out.cutoff2 = field2_.cutoff();
    out.sectors.resize(sectors_.size());
    parallel_for(sectors_.size(), threads,
                 [&](std::size_t i) { out.sectors[i] = sector_amplitudes_2mode(sectors_[i], t); });
    return out;
}

double TripartiteModel::mean_photon_number(double t) const {
    double total = 0.0;
    for (const auto& s : sectors_) {
        const double p = field1_.probability(s.n) * field2_.probability(s.m);
        if (p == 0.0) continue;
        const SectorAmplitudes a = sector_amplitudes_2mode(s, t);
        total += p * (s.n * std::norm(a.A) + (s.n + 1) * (std::norm(a.B) + std::norm(a.C)));
    }
    return total;
}

bool TripartiteModel::mean_photon_expansion(TrigSum& out) const {
    if (has_numeric_sectors()) return false;
    for (const auto& s : sectors_) {
        const double p = field1_.probability(s.n) * field2_.probability(s.m);
        if (p == 0.0) continue;
        add_populations(s.modes, p * s.n, p * (s.n + 1), p * (s.n + 1), out);
    }
    return true;
}

}  // namespace vatom
