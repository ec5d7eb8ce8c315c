#include "vatom/eigenmodes.hpp"

#include "vatom/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vatom {

Roots3 solve_cubic_trig(double x1, double x2, double x3) {
    if (!std::isfinite(x1) || !std::isfinite(x2) || !std::isfinite(x3)) {
        throw InvalidInput("cubic coefficients must be finite");
    }
    const double p = x1 * x1 - 3.0 * x2;
    const double p_scale = std::max({1.0, x1 * x1, std::abs(x2)});
    if (std::abs(p) <= 1e-14 * p_scale) {
        const double r = -x1 / 3.0;
        return {r, r, r};
    }
    if (p < 0.0) {
        throw NumericDomainError("cubic has complex roots (x1^2 - 3 x2 < 0)");
    }

    const double sqrt_p = std::sqrt(p);
    double z = (9.0 * x1 * x2 - 2.0 * x1 * x1 * x1 - 27.0 * x3) / (2.0 * p * sqrt_p);
    if (std::abs(z) > 1.0 + arccos_clamp_tol) {
        throw NumericDomainError("arccos argument outside [-1, 1]: cubic has complex roots");
    }
    z = std::clamp(z, -1.0, 1.0);

    const double theta = std::acos(z) / 3.0;
    Roots3 mu{};
    for (int j = 0; j < 3; ++j) {
        mu[static_cast<std::size_t>(j)] =
            -x1 / 3.0 + (2.0 / 3.0) * sqrt_p * std::cos(theta + 2.0 * j * std::numbers::pi / 3.0);
    }
    std::sort(mu.begin(), mu.end());
    return mu;
}

Roots3 refine_cubic_roots(double x1, double x2, double x3, Roots3 roots) {
    const auto poly = [&](double m) { return ((m + x1) * m + x2) * m + x3; };
    for (double& r : roots) {
        double residual = std::abs(poly(r));
        for (int iter = 0; iter < 4 && residual > 0.0; ++iter) {
            const double slope = (3.0 * r + 2.0 * x1) * r + x2;
            if (slope == 0.0) break;
            const double candidate = r - poly(r) / slope;
            const double cand_residual = std::abs(poly(candidate));
            if (!(cand_residual < residual)) break;
            r = candidate;
            residual = cand_residual;
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::array<double, 3> mode_weights(double f1, double f2, const Roots3& mu) {
    if (f2 == 0.0) {
        throw InvalidInput("mode_weights: f2 == 0, sector must be evolved on the decoupled path");
    }
    const double scale = std::max({std::abs(mu[0]), std::abs(mu[1]), std::abs(mu[2])});
    const double min_gap =
        std::min({std::abs(mu[0] - mu[1]), std::abs(mu[0] - mu[2]), std::abs(mu[1] - mu[2])});
    if (scale == 0.0 || min_gap < degeneracy_threshold * scale) {
        throw DegenerateModes("characteristic roots are degenerate; use the ODE fallback");
    }

    std::array<double, 3> b{};
    for (std::size_t j = 0; j < 3; ++j) {
        const std::size_t k = (j + 1) % 3;
        const std::size_t l = (j + 2) % 3;
        b[j] = f1 * f2 / ((mu[j] - mu[k]) * (mu[j] - mu[l]));
    }
    return b;
}

QuadraticModes solve_quadratic(double y1, double y2, double v11) {
    double disc = y1 * y1 - 4.0 * y2;
    if (disc < 0.0) {
        if (disc < -1e-12 * std::max(1.0, y1 * y1)) {
            throw NumericDomainError("quadratic has complex roots");
        }
        disc = 0.0;
    }
    const double sq = std::sqrt(disc);
    if (sq == 0.0) {
        throw DecoupledSector("quadratic roots coincide: decoupled sector, pure phase evolution");
    }
    // Cancellation-free pair of roots.
    const double q = -0.5 * (y1 + std::copysign(sq, y1));
    double a1 = q;
    double a2 = y2 / q;
    if (a1 > a2) std::swap(a1, a2);

    QuadraticModes out;
    out.alpha = {a1, a2};
    out.c = {(v11 + a2) / (a2 - a1), (v11 + a1) / (a1 - a2)};
    return out;
}

const char* to_string(SectorKind kind) noexcept {
    switch (kind) {
        case SectorKind::three_level: return "three_level";
        case SectorKind::two_level: return "two_level";
        case SectorKind::decoupled: return "decoupled";
        case SectorKind::numeric: return "numeric";
    }
    return "unknown";
}

ModalExpansion expand_sector(const SectorHamiltonian& h) {
    ModalExpansion out;
    out.shift = h.diag_a;

    if (h.f1 == 0.0) {
        // Nothing drives A out of its initial state; B and C stay empty.
        out.kind = SectorKind::decoupled;
        out.count = 1;
        out.nu[0] = 0.0;
        out.a[0] = 1.0;
        return out;
    }

    const double db = h.diag_b - h.diag_a;
    const double dc = h.diag_c - h.diag_a;

    if (h.f2 == 0.0) {
        const QuadraticModes q = solve_quadratic(dc, -h.f1 * h.f1, 0.0);
        out.kind = SectorKind::two_level;
        out.count = 2;
        for (std::size_t j = 0; j < 2; ++j) {
            out.nu[j] = q.alpha[j];
            out.a[j] = q.c[j];
            out.c[j] = -q.c[j] * q.alpha[j] / h.f1;
        }
        return out;
    }

    // Characteristic cubic in nu = mu + diag_a.
    const double p1 = db + dc;
    const double p2 = db * dc - h.f1 * h.f1 - h.f2 * h.f2;
    const double p3 = -h.f1 * h.f1 * db;
    const Roots3 nu = refine_cubic_roots(p1, p2, p3, solve_cubic_trig(p1, p2, p3));

    std::array<double, 3> weights{};
    try {
        weights = mode_weights(h.f1, h.f2, nu);
    } catch (const DegenerateModes&) {
        out.kind = SectorKind::numeric;
        out.count = 0;
        return out;
    }

    out.kind = SectorKind::three_level;
    out.count = 3;
    for (std::size_t j = 0; j < 3; ++j) {
        out.nu[j] = nu[j];
        out.b[j] = weights[j];
        out.a[j] = weights[j] * ((nu[j] + dc) * (nu[j] + db) - h.f2 * h.f2) / (h.f1 * h.f2);
        out.c[j] = -weights[j] * (nu[j] + db) / h.f2;
    }
    return out;
}

SectorAmplitudes evaluate(const ModalExpansion& modes, double t) {
    if (modes.kind == SectorKind::numeric) {
        throw InvalidInput("numeric sector has no closed-form modes");
    }
    std::complex<double> A{}, B{}, C{};
    for (std::size_t j = 0; j < static_cast<std::size_t>(modes.count); ++j) {
        const std::complex<double> e = std::polar(1.0, modes.nu[j] * t);
        A += modes.a[j] * e;
        B += modes.b[j] * e;
        C += modes.c[j] * e;
    }
    const std::complex<double> global = std::polar(1.0, -modes.shift * t);
    return {A * global, B * global, C * global};
}

void add_populations(const ModalExpansion& modes, double wA, double wB, double wC, TrigSum& out) {
    if (modes.kind == SectorKind::numeric) {
        throw InvalidInput("numeric sector has no closed-form modes");
    }
    const auto n = static_cast<std::size_t>(modes.count);
    for (std::size_t j = 0; j < n; ++j) {
        out.add_constant(wA * modes.a[j] * modes.a[j] + wB * modes.b[j] * modes.b[j] +
                         wC * modes.c[j] * modes.c[j]);
        for (std::size_t k = j + 1; k < n; ++k) {
            const double w = 2.0 * (wA * modes.a[j] * modes.a[k] + wB * modes.b[j] * modes.b[k] +
                                    wC * modes.c[j] * modes.c[k]);
            out.add_cosine(modes.nu[j] - modes.nu[k], w);
        }
    }
}

}  // namespace vatom
