#include "vatom/observables.hpp"

#include "vatom/errors.hpp"
#include "vatom/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>
#include <vector>

namespace vatom {

namespace {

std::vector<double> photon_distribution(const BipartiteModel& model, const BipartiteAmplitudes& amps) {
    const FieldState& q = model.field();
    std::vector<double> p(static_cast<std::size_t>(q.cutoff()) + 2, 0.0);
    for (int n = 0; n <= q.cutoff(); ++n) {
        const auto& s = amps.sectors[static_cast<std::size_t>(n)];
        const double w = q.probability(n);
        p[static_cast<std::size_t>(n)] += w * (std::norm(s.A) + std::norm(s.B));
        p[static_cast<std::size_t>(n) + 1] += w * std::norm(s.C);
    }
    return p;
}

std::vector<double> photon_distribution(const TripartiteModel& model, const TripartiteAmplitudes& amps) {
    const FieldState& q = model.field1();
    const FieldState& r = model.field2();
    std::vector<double> p(static_cast<std::size_t>(q.cutoff()) + 2, 0.0);
    for (int n = 0; n <= q.cutoff(); ++n) {
        double stay = 0.0;
        double emit = 0.0;
        for (int m = 0; m <= r.cutoff(); ++m) {
            const auto& s = amps.at(n, m);
            const double w = r.probability(m);
            stay += w * std::norm(s.A);
            emit += w * (std::norm(s.B) + std::norm(s.C));
        }
        p[static_cast<std::size_t>(n)] += q.probability(n) * stay;
        p[static_cast<std::size_t>(n) + 1] += q.probability(n) * emit;
    }
    return p;
}

double mean_from_distribution(std::span<const double> p) {
    double mean = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) mean += static_cast<double>(n) * p[n];
    return mean;
}

std::size_t effective_count(const TimeGrid& grid, const SeriesOptions& options, bool& partial) {
    partial = false;
    if (options.max_points == 0 || grid.count <= options.max_points) return grid.count;
    if (!options.allow_partial) {
        throw ResourceError("series of " + std::to_string(grid.count) + " points exceeds the ceiling of " +
                            std::to_string(options.max_points));
    }
    partial = true;
    return options.max_points;
}

template <class Fn>
std::vector<double> pointwise(std::size_t count, const TimeGrid& grid, int threads, Fn&& fn) {
    std::vector<double> out(count);
    parallel_for(count, threads, [&](std::size_t i) { out[i] = fn(grid.time(i)); });
    return out;
}

std::string describe(const BipartiteModel& m) {
    std::ostringstream os;
    os.precision(17);
    os << "bipartite chi=" << m.params().chi << " lambda1=" << m.params().lambda1
       << " lambda2=" << m.params().lambda2 << " cutoff=" << m.field().cutoff();
    return os.str();
}

std::string describe(const TripartiteModel& m) {
    std::ostringstream os;
    os.precision(17);
    os << "tripartite chi1=" << m.params().chi1 << " chi2=" << m.params().chi2
       << " lambda1=" << m.params().lambda1 << " lambda2=" << m.params().lambda2
       << " cutoff1=" << m.field1().cutoff() << " cutoff2=" << m.field2().cutoff();
    return os.str();
}

}  // namespace

double svne(const ReducedDensityMatrix& rho) {
    if (rho.dimension() == 0) throw InvalidInput("empty density matrix");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho.entries, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericDomainError("eigen-decomposition failed");
    double s = 0.0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const double p = solver.eigenvalues()(i);
        if (p < -positivity_tol) {
            throw PositivityViolation("density matrix eigenvalue " + std::to_string(p) + " is negative");
        }
        if (p > entropy_zero) s -= p * std::log2(p);
    }
    return s;
}

double mandel_q_from_distribution(std::span<const double> p) {
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) {
        const double nd = static_cast<double>(n);
        m1 += nd * p[n];
        m2 += nd * nd * p[n];
    }
    if (m1 < 1e-12) throw UndefinedQuantity("Mandel Q is undefined for the vacuum");
    return (m2 - m1 * m1) / m1 - 1.0;
}

double mandel_q(const ReducedDensityMatrix& rho_field) {
    const Eigen::VectorXd p = rho_field.entries.diagonal().real();
    return mandel_q_from_distribution(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
}

double mean_photon_number(const ReducedDensityMatrix& rho_field) {
    const Eigen::VectorXd p = rho_field.entries.diagonal().real();
    return mean_from_distribution(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
}

void TimeGrid::validate() const {
    if (!std::isfinite(t0) || !std::isfinite(dt) || !(dt > 0.0)) {
        throw InvalidInput("time grid needs finite t0 and dt > 0");
    }
}

const char* to_string(Observable which) noexcept {
    switch (which) {
        case Observable::svne: return "svne";
        case Observable::mandel_q: return "mandel_q";
        case Observable::mean_photon: return "mean_photon";
    }
    return "unknown";
}

Observable parse_observable(const std::string& name) {
    if (name == "svne") return Observable::svne;
    if (name == "mandel_q") return Observable::mandel_q;
    if (name == "mean_photon") return Observable::mean_photon;
    throw InvalidInput("unknown observable '" + name + "'");
}

ObservableSeries series(const BipartiteModel& model, const TimeGrid& grid, Observable which,
                        const SeriesOptions& options) {
    grid.validate();
    ObservableSeries out;
    const std::size_t count = effective_count(grid, options, out.partial);
    out.dt = grid.dt;
    out.t0 = grid.t0;
    out.label = to_string(which);
    out.origin = describe(model);

    switch (which) {
        case Observable::svne:
            out.values = pointwise(count, grid, options.threads, [&](double t) {
                return svne(atom_reduced_density(model.field(), model.amplitudes(t)));
            });
            break;
        case Observable::mandel_q:
            out.values = pointwise(count, grid, options.threads, [&](double t) {
                return mandel_q_from_distribution(photon_distribution(model, model.amplitudes(t)));
            });
            break;
        case Observable::mean_photon: {
            TrigSum sum;
            if (model.mean_photon_expansion(sum)) {
                out.values = sum.evaluate_grid(grid.t0, grid.dt, count, options.threads);
            } else {
                out.values = pointwise(count, grid, options.threads,
                                       [&](double t) { return model.mean_photon_number(t); });
            }
            break;
        }
    }
    return out;
}

ObservableSeries series(const TripartiteModel& model, const TimeGrid& grid, Observable which,
                        const SeriesOptions& options) {
    grid.validate();
    ObservableSeries out;
    const std::size_t count = effective_count(grid, options, out.partial);
    out.dt = grid.dt;
    out.t0 = grid.t0;
    out.label = to_string(which);
    out.origin = describe(model);

    switch (which) {
        case Observable::svne:
            out.values = pointwise(count, grid, options.threads, [&](double t) {
                return svne(field1_reduced_density(model.field1(), model.field2(), model.amplitudes(t, 1)));
            });
            break;
        case Observable::mandel_q:
            out.values = pointwise(count, grid, options.threads, [&](double t) {
                return mandel_q_from_distribution(photon_distribution(model, model.amplitudes(t, 1)));
            });
            break;
        case Observable::mean_photon: {
            TrigSum sum;
            if (model.mean_photon_expansion(sum)) {
                out.values = sum.evaluate_grid(grid.t0, grid.dt, count, options.threads);
            } else {
                out.values = pointwise(count, grid, options.threads,
                                       [&](double t) { return model.mean_photon_number(t); });
            }
            break;
        }
    }
    return out;
}

}  // namespace vatom
