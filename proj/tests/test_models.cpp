#include "oracle.hpp"

#include "vatom/bipartite.hpp"
#include "vatom/errors.hpp"
#include "vatom/observables.hpp"
#include "vatom/ode_oracle.hpp"
#include "vatom/tripartite.hpp"

#include <doctest.h>

#include <cmath>

using namespace vatom;

namespace {

BipartiteParams bip(double chi, double l1, double l2) {
    BipartiteParams p;
    p.chi = chi;
    p.lambda1 = l1;
    p.lambda2 = l2;
    return p;
}

TripartiteParams tri(double chi1, double chi2, double l1, double l2) {
    TripartiteParams p;
    p.chi1 = chi1;
    p.chi2 = chi2;
    p.lambda1 = l1;
    p.lambda2 = l2;
    return p;
}

double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("bipartite sector examples") {
    auto s = build_sector(0, bip(3.0, 0.8, 0.8));
    CHECK(s.V1 == 0.0);
    CHECK(s.V2 == 0.0);
    CHECK(s.f1 == doctest::Approx(0.8));
    CHECK(s.cubic[0] == doctest::Approx(0.0));
    CHECK(s.cubic[1] == doctest::Approx(-2 * 0.64));
    CHECK(s.cubic[2] == doctest::Approx(0.0));
    const double r = 0.8 * std::sqrt(2.0);
    CHECK(s.modes.mu(0) == doctest::Approx(-r));
    CHECK(std::abs(s.modes.mu(1)) < 1e-12);
    CHECK(s.modes.mu(2) == doctest::Approx(r));

    s = build_sector(2, bip(5.0, 1.0, 1.0));
    CHECK(s.V1 == 10.0);
    CHECK(s.V2 == 30.0);
    CHECK(s.f1 == doctest::Approx(std::sqrt(3.0)));
    CHECK(s.f2 == doctest::Approx(std::sqrt(3.0)));

    CHECK(build_sector(4, bip(5.0, 0.0, 0.0)).decoupled());
}

TEST_CASE("bipartite characteristic coefficients match the sector matrix") {
    for (int n : {0, 1, 3, 9, 30}) {
        const auto s = build_sector(n, bip(5.0, 1.0, 0.6));
        const auto h = s.hamiltonian();
        const double a = h.diag_a, b = h.diag_b, c = h.diag_c;
        // det(mu + H) expanded: x3 = abc - f1^2 b - f2^2 a
        CHECK(s.cubic[0] == doctest::Approx(a + b + c));
        CHECK(s.cubic[1] == doctest::Approx(a * b + b * c + c * a - h.f1 * h.f1 - h.f2 * h.f2));
        CHECK(s.cubic[2] == doctest::Approx(a * b * c - h.f1 * h.f1 * b - h.f2 * h.f2 * a));
    }
}

TEST_CASE("bipartite Rabi closed form at chi = 0") {
    const double lambda = 1.3;
    for (int n : {0, 1, 5, 20}) {
        const auto s = build_sector(n, bip(0.0, lambda, lambda));
        const double w = std::sqrt(2.0) * lambda * std::sqrt(n + 1.0);
        for (double t : {0.0, 0.4, 2.0, 17.0, 99.0}) {
            const auto y = sector_amplitudes(s, t);
            CHECK(std::abs(y.A - (1.0 + std::cos(w * t)) / 2.0) < 1e-10);
            CHECK(std::abs(y.B - (std::cos(w * t) - 1.0) / 2.0) < 1e-10);
            CHECK(std::abs(std::abs(y.C) - std::abs(std::sin(w * t)) / std::sqrt(2.0)) < 1e-10);
        }
    }
}

TEST_CASE("bipartite sectors match the RK4 integrator") {
    IntegratorConfig cfg;
    cfg.t_end = 20.0;
    cfg.sample_interval = 5.0;
    for (int n : {0, 1, 7, 30}) {
        const auto s = build_sector(n, bip(5.0, 1.0, 1.0));
        const auto traj = integrate_bipartite_sector(s, cfg);
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            const auto y = sector_amplitudes(s, traj.times[i]);
            CHECK(std::abs(y.A - traj.values[i].A) < 1e-8);
            CHECK(std::abs(y.B - traj.values[i].B) < 1e-8);
            CHECK(std::abs(y.C - traj.values[i].C) < 1e-8);
        }
        CHECK(traj.max_norm_drift < 1e-9);
    }
}

TEST_CASE("bipartite reduced states match the full-space oracle") {
    const FieldState q = coherent_coefficients(1.0, auto_cutoff(1.0, 0, 1e-14));
    const BipartiteModel model(bip(5.0, 1.0, 1.0), q);
    const oracle::Bipartite full(5.0, 1.0, 1.0, q.cutoff() + 1);
    for (double t : {0.0, 1.0, 7.5}) {
        const auto psi = oracle::evolve(full.h, full.initial(q), t);
        const auto amps = model.amplitudes(t);
        CHECK(max_abs_diff(atom_reduced_density(q, amps).entries, full.rho_atom(psi)) < 1e-8);
        CHECK(max_abs_diff(field_reduced_density(q, amps).entries, full.rho_field(psi)) < 1e-8);
    }
}

TEST_CASE("bipartite initial and decoupled reduced states") {
    const FieldState q = coherent_coefficients(cplx(0.6, 0.8), 20);
    const BipartiteModel model(bip(5.0, 1.0, 1.0), q);
    const auto rho_a = atom_reduced_density(q, model.amplitudes(0.0)).entries;
    CHECK(std::abs(rho_a(0, 0) - 1.0) < 1e-12);
    CHECK(rho_a.cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-12));
    const auto rho_f = field_reduced_density(q, model.amplitudes(0.0)).entries;
    for (int n = 0; n <= q.cutoff(); ++n)
        for (int m = 0; m <= q.cutoff(); ++m)
            CHECK(std::abs(rho_f(n, m) - q.amplitude(n) * std::conj(q.amplitude(m))) < 1e-14);

    const BipartiteModel free(bip(5.0, 0.0, 0.0), q);
    for (double t : {0.3, 50.0}) {
        const auto amps = free.amplitudes(t);
        CHECK(std::abs(atom_reduced_density(q, amps).entries(0, 0) - 1.0) < 1e-12);
        const auto f = field_reduced_density(q, amps).entries;
        for (int n = 0; n <= q.cutoff(); ++n) CHECK(std::abs(f(n, n).real() - q.probability(n)) < 1e-14);
    }
}

TEST_CASE("property: bipartite normalisation, Schmidt symmetry, positivity, rank") {
    for (auto [a2, m] : {std::pair{1.0, 0}, std::pair{1.0, 10}, std::pair{10.0, 0}}) {
        const FieldState q = pacs_coefficients(std::sqrt(a2), m, auto_cutoff(std::sqrt(a2), m));
        const BipartiteModel model(bip(5.0, 1.0, 1.0), q);
        for (int i = 0; i < 25; ++i) {
            const double t = 0.731 * i * i;
            const auto amps = model.amplitudes(t);
            double norm = 0.0;
            for (int n = 0; n <= q.cutoff(); ++n) norm += q.probability(n) * amps.sectors[static_cast<std::size_t>(n)].norm();
            CHECK(std::abs(norm - (1.0 - q.tail_mass())) < 1e-10);

            const auto ra = atom_reduced_density(q, amps);
            const auto rf = field_reduced_density(q, amps);
            CHECK(std::abs(svne(ra) - svne(rf)) < 1e-8);
            CHECK(svne(ra) <= std::log2(3.0) + 1e-12);

            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(ra.entries), ef(rf.entries);
            CHECK(ea.eigenvalues().minCoeff() >= -1e-10);
            CHECK(ef.eigenvalues().minCoeff() >= -1e-10);
            CHECK((ef.eigenvalues().array() > 1e-10).count() <= 3);

            // excitation number: <a^dagger a> + P1 + P2 is conserved
            const auto p = model.excited_populations(t);
            CHECK(model.mean_photon_number(t) + p[0] + p[1] ==
                  doctest::Approx(model.mean_photon_number(0.0) + 1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("bipartite parameter validation") {
    BipartiteParams p = bip(5.0, 1.0, 1.0);
    p.detuning1 = 0.1;
    CHECK_THROWS_AS(p.validate(), InvalidInput);
    CHECK_THROWS_AS(bip(-1.0, 1.0, 1.0).validate(), InvalidInput);
    CHECK_THROWS_AS(bip(NAN, 1.0, 1.0).validate(), InvalidInput);
}

TEST_CASE("tripartite sector examples") {
    auto s = build_sector_2mode(0, 0, tri(4.0, 4.0, 0.9, 0.5));
    CHECK(s.V11 == 0.0);
    CHECK(s.V12 == 0.0);
    CHECK(s.modes.count == 2);
    CHECK(s.modes.mu(0) == doctest::Approx(-0.9));
    CHECK(s.modes.mu(1) == doctest::Approx(0.9));

    s = build_sector_2mode(0, 1, tri(3.0, 3.0, 1.0, 1.0));
    CHECK(s.V21 == 0.0);
    CHECK(s.V22 == 0.0);
    CHECK(s.f2 == doctest::Approx(1.0));
    const auto b = build_sector(0, bip(3.0, 1.0, 1.0));
    for (int j = 0; j < 3; ++j) CHECK(s.characteristic[static_cast<std::size_t>(j)] == doctest::Approx(b.cubic[static_cast<std::size_t>(j)]));

    s = build_sector_2mode(1, 2, tri(5.0, 5.0, 1.0, 1.0));
    CHECK(s.V11 == 0.0);
    CHECK(s.V12 == 10.0);
    CHECK(s.V21 == 0.0);
    CHECK(s.V22 == 10.0);
    CHECK(s.f1 == doctest::Approx(std::sqrt(2.0)));
    CHECK(s.f2 == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("tripartite m = 0 Rabi closed form at chi1 = 0") {
    for (int n : {0, 2, 11}) {
        const auto s = build_sector_2mode(n, 0, tri(0.0, 5.0, 0.7, 1.0));
        const double w = 0.7 * std::sqrt(n + 1.0);
        for (double t : {0.0, 1.1, 30.0}) {
            const auto y = sector_amplitudes_2mode(s, t);
            CHECK(std::abs(y.A - std::cos(w * t)) < 1e-10);
            CHECK(std::abs(std::abs(y.C) - std::abs(std::sin(w * t))) < 1e-10);
            CHECK(y.B == cplx(0.0));
        }
    }
}

TEST_CASE("tripartite sectors match the RK4 integrator") {
    IntegratorConfig cfg;
    cfg.t_end = 10.0;
    cfg.sample_interval = 2.5;
    for (auto [n, m] : {std::pair{0, 0}, std::pair{3, 0}, std::pair{0, 1}, std::pair{5, 7}, std::pair{20, 20}}) {
        const auto s = build_sector_2mode(n, m, tri(5.0, 5.0, 1.0, 1.0));
        const auto traj = integrate_tripartite_sector(s, cfg);
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            const auto y = sector_amplitudes_2mode(s, traj.times[i]);
            CHECK(std::abs(y.A - traj.values[i].A) < 1e-8);
            CHECK(std::abs(y.B - traj.values[i].B) < 1e-8);
            CHECK(std::abs(y.C - traj.values[i].C) < 1e-8);
        }
    }
}

TEST_CASE("tripartite F1 state matches the full-space oracle") {
    const FieldState q = coherent_coefficients(1.0, 9);
    const FieldState r = coherent_coefficients(1.0, 9);
    const TripartiteModel model(tri(5.0, 5.0, 1.0, 1.0), q, r);
    const oracle::Tripartite full(5.0, 5.0, 1.0, 1.0, q.cutoff() + 1, r.cutoff() + 1);
    for (double t : {0.0, 1.0, 4.0}) {
        const auto psi = oracle::evolve(full.h, full.initial(q, r), t);
        const auto mine = field1_reduced_density(q, r, model.amplitudes(t)).entries;
        CHECK(max_abs_diff(mine, full.rho_field1(psi)) < 1e-8);
    }
}

TEST_CASE("property: tripartite normalisation, Schmidt symmetry, conservation") {
    const FieldState q = coherent_coefficients(1.0, auto_cutoff(1.0, 0));
    const FieldState r = coherent_coefficients(cplx(0.0, 1.2), auto_cutoff(1.2, 0));
    const TripartiteModel model(tri(5.0, 3.0, 1.0, 0.8), q, r);
    for (int i = 0; i < 12; ++i) {
        const double t = 1.37 * i * i;
        const auto amps = model.amplitudes(t, 2);
        double norm = 0.0;
        for (int n = 0; n <= q.cutoff(); ++n)
            for (int m = 0; m <= r.cutoff(); ++m) norm += q.probability(n) * r.probability(m) * amps.at(n, m).norm();
        CHECK(std::abs(norm - (1.0 - q.tail_mass() - r.tail_mass() + q.tail_mass() * r.tail_mass())) < 1e-10);
        for (int n = 0; n <= q.cutoff(); ++n) CHECK(amps.at(n, 0).B == cplx(0.0));

        const auto f1 = field1_reduced_density(q, r, amps);
        const auto rest = atom_field2_reduced_density(q, r, amps);
        CHECK(std::abs(svne(f1) - svne(rest)) < 1e-8);
        CHECK(f1.trace() == doctest::Approx(rest.trace()).epsilon(1e-12));
    }
    // decoupled: F1 diagonal frozen
    const TripartiteModel free(tri(5.0, 5.0, 0.0, 0.0), q, r);
    const auto f = field1_reduced_density(q, r, free.amplitudes(3.3)).entries;
    for (int n = 0; n <= q.cutoff(); ++n) CHECK(std::abs(f(n, n).real() - q.probability(n) * r.retained_norm()) < 1e-14);
}

TEST_CASE("tripartite mean photon number: diagonal, expansion and initial value") {
    const FieldState q = coherent_coefficients(std::sqrt(2.0), auto_cutoff(std::sqrt(2.0), 0, 1e-14));
    const FieldState r = coherent_coefficients(1.0, auto_cutoff(1.0, 0, 1e-14));
    const TripartiteModel model(tri(5.0, 5.0, 1.0, 1.0), q, r);
    TrigSum sum;
    REQUIRE(model.mean_photon_expansion(sum));
    CHECK(model.mean_photon_number(0.0) == doctest::Approx(2.0).epsilon(1e-10));
    for (double t : {0.0, 0.9, 42.0}) {
        const double direct = mean_photon_number(field1_reduced_density(q, r, model.amplitudes(t)));
        CHECK(model.mean_photon_number(t) == doctest::Approx(direct).epsilon(1e-12));
        CHECK(sum.evaluate(t) == doctest::Approx(direct).epsilon(1e-11));
    }
}

TEST_CASE("RK4 converges at fourth order") {
    const SectorHamiltonian hs[] = {{0.0, 0.0, 0.0, 1.0, 1.0}, {10.0, 10.0, 30.0, 1.7, 1.7}, {2.0, -3.0, 1.0, 0.4, 2.2}};
    for (const auto& h : hs) {
        const ModalExpansion m = expand_sector(h);
        const double t_end = 4.0;
        double prev = 0.0;
        for (int k = 0; k < 3; ++k) {
            const long steps = 200L << k;
            const auto traj = rk4_trajectory(h, t_end / static_cast<double>(steps), steps, 1);
            const auto exact = evaluate(m, t_end);
            const auto& y = traj.values.back();
            const double err = std::abs(y.A - exact.A) + std::abs(y.B - exact.B) + std::abs(y.C - exact.C);
            if (k > 0) CHECK(prev / err == doctest::Approx(16.0).epsilon(0.1));
            prev = err;
        }
    }
}

TEST_CASE("integrator step-size guard") {
    IntegratorConfig cfg;
    cfg.t_end = 5.0;
    cfg.step = 0.5;  // far too coarse for this sector
    CHECK_THROWS_AS(integrate_sector({0.0, 0.0, 0.0, 3.0, 3.0}, cfg), StepSizeError);
}

TEST_CASE("Kerr revivals and the cat state") {
    const double chi = 0.7;
    const FieldState cs = coherent_coefficients(2.0, auto_cutoff(2.0, 0, 1e-15));
    CHECK(fidelity(kerr_evolution(cs, chi, 0.0), cs) == doctest::Approx(1.0).epsilon(1e-15));
    for (int k = 1; k <= 3; ++k) {
        CHECK(std::abs(fidelity(kerr_evolution(cs, chi, k * M_PI / chi), cs) - 1.0) < 1e-12);
    }
    // At t = pi/(2 chi) the phase exp(-i pi n(n-1)/2) gives (e^{-i pi/4}|i alpha> + e^{i pi/4}|-i alpha>)/sqrt 2
    // up to a global phase; check through overlaps with |+-i alpha>.
    const FieldState half = kerr_evolution(cs, chi, M_PI / (2 * chi));
    const FieldState plus = coherent_coefficients(cplx(0.0, 2.0), cs.cutoff());
    const FieldState minus = coherent_coefficients(cplx(0.0, -2.0), cs.cutoff());
    cplx direct{};
    for (int n = 0; n <= cs.cutoff(); ++n) direct += std::conj(cs.amplitude(n)) * half.amplitude(n);
    CHECK(fidelity(half, cs) == doctest::Approx(std::norm(direct)).epsilon(1e-12));
    const double p_plus = std::norm(overlap(plus, half));
    const double p_minus = std::norm(overlap(minus, half));
    const double cross = std::exp(-8.0);  // |<i alpha|-i alpha>|^2
    CHECK(p_plus == doctest::Approx(0.5).epsilon(1e-6 + cross));
    CHECK(p_minus == doctest::Approx(0.5).epsilon(1e-6 + cross));
}
