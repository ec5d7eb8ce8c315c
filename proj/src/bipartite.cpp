#include "vatom/bipartite.hpp"

#include "vatom/errors.hpp"
#include "vatom/ode_oracle.hpp"

#include <cmath>
#include <string>

namespace vatom {

namespace {

void require_rate(double value, const char* name) {
    if (!std::isfinite(value) || value < 0.0) {
        throw InvalidInput(std::string(name) + " must be finite and non-negative");
    }
}

void require_amplitudes(const FieldState& field0, const BipartiteAmplitudes& amps) {
    if (amps.sectors.size() != static_cast<std::size_t>(field0.cutoff()) + 1) {
        throw InvalidInput("amplitude set does not match the field cutoff");
    }
}

}  // namespace

void BipartiteParams::validate() const {
    require_rate(chi, "chi");
    require_rate(lambda1, "lambda1");
    require_rate(lambda2, "lambda2");
    if (detuning1 != 0.0 || detuning2 != 0.0) {
        throw InvalidInput("the closed-form solver requires zero detunings");
    }
}

BipartiteSector build_sector(int n, const BipartiteParams& params) {
    if (n < 0) throw InvalidInput("sector index must be non-negative");
    const double nd = n;
    BipartiteSector s;
    s.n = n;
    s.V1 = params.chi * nd * (nd - 1.0);
    s.V2 = params.chi * nd * (nd + 1.0);
    s.f1 = params.lambda1 * std::sqrt(nd + 1.0);
    s.f2 = params.lambda2 * std::sqrt(nd + 1.0);
    const double ff = s.f1 * s.f1 + s.f2 * s.f2;
    s.cubic = {2.0 * s.V1 + s.V2, s.V1 * (2.0 * s.V2 + s.V1) - ff, s.V1 * (s.V1 * s.V2 - ff)};
    s.modes = expand_sector(s.hamiltonian());
    return s;
}

SectorAmplitudes sector_amplitudes(const BipartiteSector& sector, double t) {
    if (sector.numeric_fallback()) return propagate_sector(sector.hamiltonian(), t);
    return evaluate(sector.modes, t);
}

ReducedDensityMatrix atom_reduced_density(const FieldState& field0, const BipartiteAmplitudes& amps) {
    require_amplitudes(field0, amps);
    const int cutoff = field0.cutoff();
    Eigen::Matrix3cd rho = Eigen::Matrix3cd::Zero();
    for (int n = 0; n <= cutoff; ++n) {
        const auto& s = amps.sectors[static_cast<std::size_t>(n)];
        const double p = field0.probability(n);
        rho(0, 0) += p * std::norm(s.A);
        rho(1, 1) += p * std::norm(s.B);
        rho(2, 2) += p * std::norm(s.C);
        rho(0, 1) += p * s.A * std::conj(s.B);
    }
    // Level 3 carries one photon more than levels 1 and 2 in the same sector.
    for (int n = 0; n < cutoff; ++n) {
        const auto& up = amps.sectors[static_cast<std::size_t>(n) + 1];
        const auto& lo = amps.sectors[static_cast<std::size_t>(n)];
        const cplx w = field0.amplitude(n + 1) * std::conj(field0.amplitude(n));
        rho(0, 2) += w * up.A * std::conj(lo.C);
        rho(1, 2) += w * up.B * std::conj(lo.C);
    }
    rho(1, 0) = std::conj(rho(0, 1));
    rho(2, 0) = std::conj(rho(0, 2));
    rho(2, 1) = std::conj(rho(1, 2));
    return {rho, field0.tail_mass()};
}

ReducedDensityMatrix field_reduced_density(const FieldState& field0, const BipartiteAmplitudes& amps) {
    require_amplitudes(field0, amps);
    const int cutoff = field0.cutoff();
    const Eigen::Index dim = cutoff + 2;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, 3);
    for (int n = 0; n <= cutoff; ++n) {
        const auto& s = amps.sectors[static_cast<std::size_t>(n)];
        const cplx q = field0.amplitude(n);
        u(n, 0) = q * s.A;
        u(n, 1) = q * s.B;
        u(n + 1, 2) = q * s.C;
    }
    return {u * u.adjoint(), field0.tail_mass()};
}

BipartiteModel::BipartiteModel(const BipartiteParams& params, FieldState field0)
    : params_(params), field0_(std::move(field0)) {
    params_.validate();
    sectors_.reserve(static_cast<std::size_t>(field0_.cutoff()) + 1);
    for (int n = 0; n <= field0_.cutoff(); ++n) {
        sectors_.push_back(build_sector(n, params_));
        if (sectors_.back().numeric_fallback()) ++numeric_sectors_;
    }
}

BipartiteAmplitudes BipartiteModel::amplitudes(double t) const {
    BipartiteAmplitudes out;
    out.t = t;
    out.sectors.reserve(sectors_.size());
    for (const auto& s : sectors_) out.sectors.push_back(sector_amplitudes(s, t));
    return out;
}

double BipartiteModel::mean_photon_number(double t) const {
    double total = 0.0;
    for (const auto& s : sectors_) {
        const double p = field0_.probability(s.n);
        if (p == 0.0) continue;
        const SectorAmplitudes a = sector_amplitudes(s, t);
        total += p * (s.n * (std::norm(a.A) + std::norm(a.B)) + (s.n + 1) * std::norm(a.C));
    }
    return total;
}

std::array<double, 2> BipartiteModel::excited_populations(double t) const {
    std::array<double, 2> out{};
    for (const auto& s : sectors_) {
        const double p = field0_.probability(s.n);
        if (p == 0.0) continue;
        const SectorAmplitudes a = sector_amplitudes(s, t);
        out[0] += p * std::norm(a.A);
        out[1] += p * std::norm(a.B);
    }
    return out;
}

bool BipartiteModel::mean_photon_expansion(TrigSum& out) const {
    if (has_numeric_sectors()) return false;
    for (const auto& s : sectors_) {
        const double p = field0_.probability(s.n);
        if (p == 0.0) continue;
        add_populations(s.modes, p * s.n, p * s.n, p * (s.n + 1), out);
    }
    return true;
}

}  // namespace vatom
