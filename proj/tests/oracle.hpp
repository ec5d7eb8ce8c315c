#pragma once

// Reference calculations that share no code with the library: dense
// Hamiltonians on the truncated product space, evolved by exact
// diagonalisation.

#include "vatom/field_states.hpp"

#include <Eigen/Dense>

#include <complex>

namespace oracle {

using cplx = std::complex<double>;

inline Eigen::VectorXcd evolve(const Eigen::MatrixXd& h, const Eigen::VectorXcd& psi0, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const Eigen::MatrixXd& u = es.eigenvectors();
    Eigen::VectorXcd coeff = u.transpose().cast<cplx>() * psi0;
    for (Eigen::Index k = 0; k < coeff.size(); ++k) coeff(k) *= std::exp(cplx(0.0, -es.eigenvalues()(k) * t));
    return u.cast<cplx>() * coeff;
}

/// 3x3 sector matrix | a 0 f1 ; 0 b f2 ; f1 f2 c |.
inline Eigen::Vector3cd sector(double a, double b, double c, double f1, double f2, double t) {
    Eigen::MatrixXd h(3, 3);
    h << a, 0, f1, 0, b, f2, f1, f2, c;
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(3);
    psi0(0) = 1.0;
    return evolve(h, psi0, t);
}

/// Atom (levels 1, 2, 3 -> index 0, 1, 2) times one mode with photons 0..nmax.
/// Index = level * (nmax + 1) + n.
struct Bipartite {
    int nmax;
    Eigen::MatrixXd h;

    Bipartite(double chi, double l1, double l2, int nmax_) : nmax(nmax_) {
        const int d = nmax + 1;
        h = Eigen::MatrixXd::Zero(3 * d, 3 * d);
        for (int lvl = 0; lvl < 3; ++lvl) {
            for (int n = 0; n <= nmax; ++n) h(lvl * d + n, lvl * d + n) = chi * n * (n - 1.0);
        }
        for (int n = 0; n < nmax; ++n) {
            const double s = std::sqrt(n + 1.0);
            // a^dagger |3><1| + h.c. and a^dagger |3><2| + h.c.
            h(2 * d + n + 1, 0 * d + n) = h(0 * d + n, 2 * d + n + 1) = l1 * s;
            h(2 * d + n + 1, 1 * d + n) = h(1 * d + n, 2 * d + n + 1) = l2 * s;
        }
    }

    Eigen::VectorXcd initial(const vatom::FieldState& q) const {
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(h.rows());
        for (int n = 0; n <= q.cutoff() && n <= nmax; ++n) psi(n) = q.amplitude(n);
        return psi;
    }

    Eigen::Matrix3cd rho_atom(const Eigen::VectorXcd& psi) const {
        const int d = nmax + 1;
        Eigen::Matrix3cd r = Eigen::Matrix3cd::Zero();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int n = 0; n < d; ++n) r(i, j) += psi(i * d + n) * std::conj(psi(j * d + n));
        return r;
    }

    Eigen::MatrixXcd rho_field(const Eigen::VectorXcd& psi) const {
        const int d = nmax + 1;
        Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(d, d);
        for (int n = 0; n < d; ++n)
            for (int np = 0; np < d; ++np)
                for (int i = 0; i < 3; ++i) r(n, np) += psi(i * d + n) * std::conj(psi(i * d + np));
        return r;
    }
};

/// Atom times two modes. Index = (level * d1 + n) * d2 + m.
struct Tripartite {
    int n1, n2;
    Eigen::MatrixXd h;

    Tripartite(double chi1, double chi2, double l1, double l2, int nmax1, int nmax2) : n1(nmax1), n2(nmax2) {
        const int d1 = n1 + 1, d2 = n2 + 1;
        const int dim = 3 * d1 * d2;
        h = Eigen::MatrixXd::Zero(dim, dim);
        auto idx = [&](int lvl, int n, int m) { return (lvl * d1 + n) * d2 + m; };
        for (int lvl = 0; lvl < 3; ++lvl)
            for (int n = 0; n < d1; ++n)
                for (int m = 0; m < d2; ++m) h(idx(lvl, n, m), idx(lvl, n, m)) = chi1 * n * (n - 1.0) + chi2 * m * (m - 1.0);
        for (int n = 0; n < d1; ++n) {
            for (int m = 0; m < d2; ++m) {
                if (n + 1 < d1) {  // a1^dagger |3><1|
                    h(idx(2, n + 1, m), idx(0, n, m)) = h(idx(0, n, m), idx(2, n + 1, m)) = l1 * std::sqrt(n + 1.0);
                }
                if (m + 1 < d2) {  // a2^dagger |3><2|
                    h(idx(2, n, m + 1), idx(1, n, m)) = h(idx(1, n, m), idx(2, n, m + 1)) = l2 * std::sqrt(m + 1.0);
                }
            }
        }
    }

    Eigen::VectorXcd initial(const vatom::FieldState& q, const vatom::FieldState& r) const {
        const int d2 = n2 + 1;
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(h.rows());
        for (int n = 0; n <= q.cutoff() && n <= n1; ++n)
            for (int m = 0; m <= r.cutoff() && m <= n2; ++m) psi(n * d2 + m) = q.amplitude(n) * r.amplitude(m);
        return psi;
    }

    Eigen::MatrixXcd rho_field1(const Eigen::VectorXcd& psi) const {
        const int d1 = n1 + 1, d2 = n2 + 1;
        Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(d1, d1);
        for (int n = 0; n < d1; ++n)
            for (int np = 0; np < d1; ++np)
                for (int lvl = 0; lvl < 3; ++lvl)
                    for (int m = 0; m < d2; ++m)
                        r(n, np) += psi((lvl * d1 + n) * d2 + m) * std::conj(psi((lvl * d1 + np) * d2 + m));
        return r;
    }
};

}  // namespace oracle
