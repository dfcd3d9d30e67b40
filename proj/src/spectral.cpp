#include "ucplab/spectral.hpp"

#include "ucplab/error.hpp"

#include <Eigen/SparseCholesky>
#include <lapacke.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

namespace ucplab {

EnergyWindow EnergyWindow::below(double energy) {
    if (!std::isfinite(energy)) throw InvalidArgument("energy threshold must be finite");
    return EnergyWindow(true, -std::numeric_limits<double>::infinity(), energy);
}

EnergyWindow EnergyWindow::interval(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw InvalidArgument("window ends must be finite");
    if (a > b) throw InvalidArgument("energy interval needs a <= b");
    return EnergyWindow(false, a, b);
}

bool EnergyWindow::contains(double energy, double tolerance) const noexcept {
    return energy <= upper_ + tolerance && (half_line_ || energy >= lower_ - tolerance);
}

bool EnergyWindow::is_subset_of(const EnergyWindow& other) const noexcept {
    if (upper_ > other.upper_) return false;
    if (other.half_line_) return true;
    return !half_line_ && lower_ >= other.lower_;
}

SpectralBasis::SpectralBasis(Grid grid, EnergyWindow window, std::vector<double> energies, Eigen::MatrixXd modes)
    : grid_(grid), window_(window), energies_(std::move(energies)), modes_(std::move(modes)) {
    if (modes_.cols() != static_cast<Eigen::Index>(energies_.size()) ||
        (modes_.cols() > 0 && modes_.rows() != static_cast<Eigen::Index>(grid_.size()))) {
        throw DimensionError("spectral basis: modes matrix does not match grid and energy list");
    }
    if (modes_.cols() == 0) modes_.resize(static_cast<Eigen::Index>(grid_.size()), 0);
}

ScalarField SpectralBasis::mode(std::size_t k) const {
    if (k >= size()) throw InvalidArgument("mode index out of range");
    const auto col = modes_.col(static_cast<Eigen::Index>(k));
    return ScalarField(grid_, std::vector<double>(col.data(), col.data() + col.size()));
}

namespace detail {

namespace {

SparseMatrix shifted(const SparseMatrix& a, double shift) {
    SparseMatrix id(a.rows(), a.cols());
    id.setIdentity();
    SparseMatrix s = a - shift * id;
    s.makeCompressed();
    return s;
}

using Factor = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<std::ptrdiff_t>>;

// Factorises A - shift*I, nudging the shift off exact eigenvalues (zero pivots).
double factorise(Factor& f, const SparseMatrix& a, double shift, double scale) {
    double s = shift;
    for (int attempt = 0; attempt < 8; ++attempt) {
        f.compute(shifted(a, s));
        if (f.info() == Eigen::Success && f.vectorD().cwiseAbs().minCoeff() > 1e-14 * scale) return s;
        s += (attempt + 1) * 1e-9 * scale;
    }
    throw ConvergenceError("LDL^T factorisation of the shifted operator failed", 0.0);
}

// (lower spectral bound, max absolute row sum)
std::pair<double, double> gershgorin(const SparseMatrix& a) {
    Eigen::VectorXd center = Eigen::VectorXd::Zero(a.rows());
    Eigen::VectorXd radius = Eigen::VectorXd::Zero(a.rows());
    for (std::ptrdiff_t c = 0; c < a.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(a, c); it; ++it) {
            if (it.row() == it.col()) center[it.row()] = it.value();
            else radius[it.row()] += std::abs(it.value());
        }
    }
    return {(center - radius).minCoeff(), (center.cwiseAbs() + radius).maxCoeff()};
}

}  // namespace

std::size_t count_below(const SparseMatrix& a, double shift) {
    double scale = 1.0;
    for (std::ptrdiff_t c = 0; c < a.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(a, c); it; ++it) scale = std::max(scale, std::abs(it.value()));
    Factor f;
    f.compute(shifted(a, shift));
    if (f.info() != Eigen::Success) throw ConvergenceError("inertia count: factorisation failed", 0.0);
    const auto& d = f.vectorD();
    std::size_t negative = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (d[i] < 0.0) ++negative;
    }
    return negative;
}

namespace {

// Some optimised BLAS builds return wrong eigenvectors on CPUs they misdetect; once a LAPACK
// result fails the residual check, the process stays on Eigen.
std::atomic<bool> lapack_trusted{true};

bool residuals_ok(const SparseMatrix& a, const WindowEigenpairs& p) {
    const double cap = 1e-9 * std::max(gershgorin(a).second, 1.0);
    for (std::size_t c = 0; c < p.values.size(); ++c) {
        const Eigen::VectorXd x = p.vectors.col(static_cast<Eigen::Index>(c));
        if (!(std::abs(x.norm() - 1.0) <= 1e-8) || !((a * x - p.values[c] * x).norm() <= cap)) return false;
    }
    return true;
}

WindowEigenpairs lapack_window(const SparseMatrix& a, double lo, double hi, bool tridiagonal) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    WindowEigenpairs out;
    std::vector<double> w(static_cast<std::size_t>(n));
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
    Eigen::MatrixXd z(n, n);
    lapack_int found = 0;
    lapack_int info = 0;
    if (tridiagonal) {
        std::vector<double> diag(static_cast<std::size_t>(n));
        std::vector<double> off(static_cast<std::size_t>(n), 0.0);
        for (lapack_int i = 0; i < n; ++i) {
            diag[i] = a.coeff(i, i);
            if (i + 1 < n) off[i] = a.coeff(i + 1, i);
        }
        info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'V', n, diag.data(), off.data(), lo, hi, 0, 0, 0.0, &found,
                              w.data(), z.data(), n, support.data());
    } else {
        Eigen::MatrixXd dense = Eigen::MatrixXd(a);
        info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'V', 'L', n, dense.data(), n, lo, hi, 0, 0, 0.0, &found,
                              w.data(), z.data(), n, support.data());
    }
    if (info != 0) throw ConvergenceError("LAPACK eigensolver failed, info=" + std::to_string(info), 0.0);
    out.values.assign(w.begin(), w.begin() + found);
    out.vectors = z.leftCols(found);
    return out;
}

WindowEigenpairs eigen_window(const SparseMatrix& a, double lo, double hi) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(a)};
    if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", 0.0);
    WindowEigenpairs out;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double e = es.eigenvalues()[i];
        if (e > lo && e <= hi) keep.push_back(i);
    }
    out.vectors.resize(a.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        out.values.push_back(es.eigenvalues()[keep[c]]);
        out.vectors.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]);
    }
    return out;
}

}  // namespace

WindowEigenpairs dense_window(const SparseMatrix& a, double lo, double hi, bool tridiagonal) {
    if (lapack_trusted.load()) {
        auto out = lapack_window(a, lo, hi, tridiagonal);
        if (residuals_ok(a, out)) return out;
        lapack_trusted.store(false);
    }
    return eigen_window(a, lo, hi);
}

bool dense_lapack_trusted() { return lapack_trusted.load(); }

WindowEigenpairs lanczos_window(const SparseMatrix& a, double lo, double hi, std::uint64_t seed) {
    const Eigen::Index n = a.rows();
    const auto [floor, norm_estimate] = gershgorin(a);
    const double scale = std::max(norm_estimate, 1.0);
    const std::size_t above_lo = std::isfinite(lo) ? count_below(a, lo) : 0;
    const std::size_t expected = count_below(a, hi) - above_lo;
    WindowEigenpairs out;
    out.vectors.resize(n, 0);
    if (expected == 0) return out;

    const double lo_eff = std::isfinite(lo) ? std::max(lo, floor) : floor;
    Factor factor;
    const double sigma = factorise(factor, a, 0.5 * (lo_eff + hi), scale);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd locked(n, 0);
    auto in_window = [&](double lambda) { return lambda >= lo && lambda <= hi; };
    auto orthogonalise = [&](Eigen::VectorXd& v, const Eigen::MatrixXd& basis, Eigen::Index cols) {
        for (int pass = 0; pass < 2; ++pass) {
            if (cols == 0) break;
            v -= basis.leftCols(cols) * (basis.leftCols(cols).transpose() * v);
        }
    };

    double worst = 0.0;
    constexpr int kMaxRounds = 60;
    for (int round = 0; round < kMaxRounds; ++round) {
        std::size_t have = 0;
        if (locked.cols() > 0) {
            for (Eigen::Index c = 0; c < locked.cols(); ++c) {
                const double rq = locked.col(c).dot(a * locked.col(c));
                if (in_window(rq)) ++have;
            }
        }
        if (have >= expected) break;
        const std::size_t need = expected - have;
        const Eigen::Index room = n - locked.cols();
        if (room <= 0) break;
        const Eigen::Index p = std::min<Eigen::Index>(room, std::max<Eigen::Index>(40, 2 * need + 20));

        Eigen::MatrixXd v(n, p);
        std::vector<double> alpha;
        std::vector<double> beta;
        Eigen::VectorXd q(n);
        for (Eigen::Index i = 0; i < n; ++i) q[i] = gauss(rng);
        orthogonalise(q, locked, locked.cols());
        q.normalize();
        Eigen::Index steps = 0;
        for (Eigen::Index i = 0; i < p; ++i) {
            v.col(i) = q;
            steps = i + 1;
            Eigen::VectorXd w = factor.solve(q);
            orthogonalise(w, locked, locked.cols());
            const double al = q.dot(w);
            alpha.push_back(al);
            orthogonalise(w, v, i + 1);
            const double be = w.norm();
            if (i + 1 == p || be < 1e-12 * std::abs(al) + 1e-300) break;
            beta.push_back(be);
            q = w / be;
        }

        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(steps, steps);
        for (Eigen::Index i = 0; i < steps; ++i) {
            t(i, i) = alpha[i];
            if (i + 1 < steps) t(i, i + 1) = t(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(t);
        for (Eigen::Index j = steps - 1; j >= 0; --j) {
            const double theta = ritz.eigenvalues()[j];
            if (std::abs(theta) < 1e-300) continue;
            if (!in_window(sigma + 1.0 / theta)) continue;
            Eigen::VectorXd x = v.leftCols(steps) * ritz.eigenvectors().col(j);
            orthogonalise(x, locked, locked.cols());
            const double len = x.norm();
            if (len < 0.5) continue;
            x /= len;
            const Eigen::VectorXd ax = a * x;
            const double rq = x.dot(ax);
            const double res = (ax - rq * x).norm();
            if (res <= 1e-10 * scale && in_window(rq)) {
                locked.conservativeResize(Eigen::NoChange, locked.cols() + 1);
                locked.col(locked.cols() - 1) = x;
            } else {
                worst = std::max(worst, res);
            }
        }
    }

    // Rayleigh-Ritz on the locked subspace.
    if (locked.cols() > 0) {
        Eigen::MatrixXd g = locked.transpose() * (a * locked);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rr(0.5 * (g + g.transpose()));
        Eigen::MatrixXd x = locked * rr.eigenvectors();
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const double lambda = rr.eigenvalues()[j];
            if (!in_window(lambda)) continue;
            out.values.push_back(lambda);
            out.vectors.conservativeResize(Eigen::NoChange, out.vectors.cols() + 1);
            out.vectors.col(out.vectors.cols() - 1) = x.col(j);
        }
    }
    if (out.values.size() != expected) {
        throw ConvergenceError("Lanczos found " + std::to_string(out.values.size()) + " of " +
                                   std::to_string(expected) + " eigenpairs in the window; worst residual " +
                                   std::to_string(worst),
                               worst);
    }
    return out;
}

}  // namespace detail

SpectralBasis spectrum_below(const DiscreteOperator& op, const EnergyWindow& window, const SpectralOptions& options) {
    const double tol = options.edge_tolerance;
    const double lo = window.is_half_line() ? op.spectrum_lower_bound() - 1.0 : window.lower() - tol;
    const double hi = window.upper() + tol;
    const Grid& grid = op.grid();

    detail::WindowEigenpairs pairs;
    if (hi >= lo) {
        const bool dense = !options.force_iterative && grid.size() <= options.dense_limit;
        pairs = dense ? detail::dense_window(op.matrix(), lo, hi, op.is_tridiagonal())
                      : detail::lanczos_window(op.matrix(), window.is_half_line() ? -INFINITY : lo, hi, options.seed);
    }

    std::vector<std::size_t> order(pairs.values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return pairs.values[i] < pairs.values[j]; });

    const double unweight = 1.0 / std::sqrt(grid.cell_volume());
    const double residual_cap = 1e-8 * std::max(op.norm_estimate(), 1.0);
    std::vector<double> energies;
    Eigen::MatrixXd modes(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(order.size()));
    for (std::size_t c = 0; c < order.size(); ++c) {
        const Eigen::VectorXd x = pairs.vectors.col(static_cast<Eigen::Index>(order[c]));
        const double lambda = pairs.values[order[c]];
        const double res = (op.matrix() * x - lambda * x).norm();
        if (res > residual_cap) {
            throw ConvergenceError("eigenpair residual " + std::to_string(res) + " exceeds tolerance", res);
        }
        energies.push_back(lambda);
        modes.col(static_cast<Eigen::Index>(c)) = x * unweight;
    }
    return SpectralBasis(grid, window, std::move(energies), std::move(modes));
}

std::vector<double> expand(const SpectralBasis& basis, const ScalarField& psi) {
    require_same_grid(basis.grid(), psi.grid(), "expand");
    Eigen::Map<const Eigen::VectorXd> x(psi.values().data(), static_cast<Eigen::Index>(psi.size()));
    const Eigen::VectorXd alpha = basis.modes().transpose() * x * basis.grid().cell_volume();
    return std::vector<double>(alpha.data(), alpha.data() + alpha.size());
}

ScalarField synthesize(const SpectralBasis& basis, std::span<const double> coefficients) {
    if (coefficients.size() != basis.size()) throw DimensionError("one coefficient per eigenpair is required");
    Eigen::Map<const Eigen::VectorXd> c(coefficients.data(), static_cast<Eigen::Index>(coefficients.size()));
    Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.grid().size()));
    if (!basis.empty()) y = basis.modes() * c;
    return ScalarField(basis.grid(), std::vector<double>(y.data(), y.data() + y.size()));
}

ScalarField project(const SpectralBasis& basis, const ScalarField& psi) {
    const auto alpha = expand(basis, psi);
    return synthesize(basis, alpha);
}

ScalarField random_in_range(const SpectralBasis& basis, std::uint64_t seed) {
    if (basis.empty()) throw InvalidArgument("cannot draw from the range of an empty spectral basis");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::vector<double> c(basis.size());
    double len = 0.0;
    do {
        len = 0.0;
        for (double& x : c) {
            x = gauss(rng);
            len += x * x;
        }
    } while (len == 0.0);
    len = std::sqrt(len);
    for (double& x : c) x /= len;
    return synthesize(basis, c);
}

void write_basis_csv(std::ostream& out, const SpectralBasis& basis) {
    out << "energy";
    for (std::size_t k = 0; k < basis.grid().size(); ++k) out << ",n" << k;
    out << '\n' << std::setprecision(17);
    for (std::size_t c = 0; c < basis.size(); ++c) {
        out << basis.energy(c);
        const auto col = basis.modes().col(static_cast<Eigen::Index>(c));
        for (Eigen::Index k = 0; k < col.size(); ++k) out << ',' << col[k];
        out << '\n';
    }
}

}  // namespace ucplab
