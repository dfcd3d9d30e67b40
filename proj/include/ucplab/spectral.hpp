#pragma once

#include "ucplab/grid.hpp"
#include "ucplab/operator.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

namespace ucplab {

/// Closed energy window: the half line (-inf, E] or an interval [a, b].
class EnergyWindow {
public:
    static EnergyWindow below(double energy);
    static EnergyWindow interval(double a, double b);

    bool is_half_line() const noexcept { return half_line_; }
    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }
    /// Membership with the endpoint tie tolerance.
    bool contains(double energy, double tolerance = 1e-10) const noexcept;
    bool is_subset_of(const EnergyWindow& other) const noexcept;

private:
    EnergyWindow(bool half_line, double lower, double upper)
        : half_line_(half_line), lower_(lower), upper_(upper) {}

    bool half_line_;
    double lower_;
    double upper_;
};

/// Eigenpairs of a discrete operator inside an energy window.
///
/// Modes are the columns of an N x m matrix, normalised in the h^d-weighted L2 norm and
/// sorted by ascending energy. Degenerate eigenspaces carry an arbitrary orthonormal basis.
class SpectralBasis {
public:
    SpectralBasis(Grid grid, EnergyWindow window, std::vector<double> energies, Eigen::MatrixXd modes);

    const Grid& grid() const noexcept { return grid_; }
    const EnergyWindow& window() const noexcept { return window_; }
    std::size_t size() const noexcept { return energies_.size(); }
    bool empty() const noexcept { return energies_.empty(); }
    double energy(std::size_t k) const { return energies_.at(k); }
    std::span<const double> energies() const noexcept { return energies_; }
    const Eigen::MatrixXd& modes() const noexcept { return modes_; }
    ScalarField mode(std::size_t k) const;

private:
    Grid grid_;
    EnergyWindow window_;
    std::vector<double> energies_;
    Eigen::MatrixXd modes_;
};

struct SpectralOptions {
    /// Dense LAPACK solve up to this many unknowns, shift-invert Lanczos above.
    std::size_t dense_limit = 2000;
    /// Eigenvalues this close to a window endpoint are included.
    double edge_tolerance = 1e-10;
    bool force_iterative = false;
    std::uint64_t seed = 0x1a2c05;
};

SpectralBasis spectrum_below(const DiscreteOperator& op, const EnergyWindow& window,
                             const SpectralOptions& options = {});

/// alpha_k = <psi_k, psi> with cell weight h^d.
std::vector<double> expand(const SpectralBasis& basis, const ScalarField& psi);

/// sum_k alpha_k psi_k.
ScalarField synthesize(const SpectralBasis& basis, std::span<const double> coefficients);

/// Orthogonal projection of psi onto span(basis).
ScalarField project(const SpectralBasis& basis, const ScalarField& psi);

/// Unit-norm element of span(basis) with standard-normal coefficients from `seed`.
ScalarField random_in_range(const SpectralBasis& basis, std::uint64_t seed);

/// Columns: `energy` then one column per node (`n<flat index>`), one row per eigenpair.
void write_basis_csv(std::ostream& out, const SpectralBasis& basis);

namespace detail {

/// Number of eigenvalues strictly below `shift`, by Sylvester inertia of an LDL^T
/// factorisation of A - shift*I.
std::size_t count_below(const SparseMatrix& a, double shift);

struct WindowEigenpairs {
    std::vector<double> values;
    Eigen::MatrixXd vectors;  // Euclidean-orthonormal columns
};

/// Every eigenpair of symmetric A with lo <= lambda <= hi, by shift-invert Lanczos with
/// full reorthogonalisation and locking; completeness is certified by inertia counts.
WindowEigenpairs lanczos_window(const SparseMatrix& a, double lo, double hi, std::uint64_t seed);

/// Dense route: LAPACK dsyevr (or dstevr for tridiagonal matrices) over (lo, hi].
WindowEigenpairs dense_window(const SparseMatrix& a, double lo, double hi, bool tridiagonal);

/// False once a LAPACK result has failed its residual check and the dense route switched to Eigen.
bool dense_lapack_trusted();

}  // namespace detail

}  // namespace ucplab
