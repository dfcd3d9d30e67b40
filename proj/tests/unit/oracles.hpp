#pragma once

// Reference values computed without touching the library's own numerics.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

/// Eigenvalues of the 1D Dirichlet three-point Laplacian with n interior nodes on (0, L).
inline std::vector<double> dirichlet_laplacian_1d(int n, double L) {
    const double h = L / (n + 1);
    std::vector<double> out;
    for (int k = 1; k <= n; ++k) {
        const double s = std::sin(k * std::numbers::pi / (2.0 * (n + 1)));
        out.push_back(4.0 / (h * h) * s * s);
    }
    return out;
}

/// Eigenvalues of the 1D periodic three-point Laplacian with n nodes on a ring of length L.
inline std::vector<double> periodic_laplacian_1d(int n, double L) {
    const double h = L / n;
    std::vector<double> out;
    for (int k = 0; k < n; ++k) {
        const double s = std::sin(k * std::numbers::pi / n);
        out.push_back(4.0 / (h * h) * s * s);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Symbol of a11 D1 + a22 D2 + mixed central terms on a periodic 2D grid.
inline std::vector<double> periodic_constant_elliptic_2d(int n, double L, double a11, double a12, double a22) {
    const double h = L / n;
    std::vector<double> out;
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            const double tk = 2.0 * std::numbers::pi * k / n, tl = 2.0 * std::numbers::pi * l / n;
            const double sk = std::sin(0.5 * tk), sl = std::sin(0.5 * tl);
            out.push_back((4.0 * a11 * sk * sk + 4.0 * a22 * sl * sl + 2.0 * a12 * std::sin(tk) * std::sin(tl)) /
                          (h * h));
        }
    std::sort(out.begin(), out.end());
    return out;
}

/// int_0^x (1 - e^{-t})/t dt by its alternating power series.
inline double ein(double x) {
    // Extended precision: the alternating terms reach e^x / x before they decay.
    long double term = x, sum = 0.0L;
    for (int k = 1; k < 400; ++k) {
        sum += term / k;
        term *= -static_cast<long double>(x) / (k + 1);
        if (std::abs(term) < 1e-24L) break;
    }
    return static_cast<double>(sum);
}

/// psi(s) = s exp(-int_0^s (1 - e^{-mu t})/t dt) = s exp(-Ein(mu s)).
inline double carleman_psi(double mu, double s) { return s * std::exp(-ein(mu * s)); }

/// sqrt(2/pi) * int_{|p| > pi K} e^{-p^2/2} dp.
inline double gaussian_aliasing_bound(double K) { return 2.0 * std::erfc(std::numbers::pi * K / std::sqrt(2.0)); }

/// Smallest Rayleigh quotient c^T M c / c^T c over `draws` random directions.
inline double sampled_min_rayleigh(const Eigen::MatrixXd& m, int draws, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    double best = INFINITY;
    for (int t = 0; t < draws; ++t) {
        Eigen::VectorXd c(m.rows());
        for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = nd(rng);
        best = std::min(best, c.dot(m * c) / c.squaredNorm());
    }
    return best;
}

/// All eigenvalues of a dense symmetric matrix from Eigen's own solver (not LAPACK).
inline std::vector<double> dense_eigenvalues(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

}  // namespace oracle
