#pragma once

#include "ucplab/grid.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <functional>
#include <optional>

namespace ucplab {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, std::ptrdiff_t>;

/// Symmetric d x d coefficient matrix a^{ij} sampled at every grid node, plus the
/// exact matrix at the origin and its inverse a_{ij}(0).
class CoefficientField {
public:
    using MatrixFunction = std::function<Eigen::MatrixXd(const Point&)>;

    /// `entries` holds d*d values per node, node-major and row-major within a node.
    CoefficientField(Grid grid, std::vector<double> entries, Eigen::MatrixXd at_origin);

    static CoefficientField identity(const Grid& grid);
    static CoefficientField sample(const Grid& grid, const MatrixFunction& a);

    const Grid& grid() const noexcept { return grid_; }
    int dim() const noexcept { return grid_.dim(); }

    double operator()(std::size_t node, int i, int j) const noexcept {
        return entries_[(node * dim() + i) * dim() + j];
    }
    Eigen::MatrixXd at(std::size_t node) const;
    const Eigen::MatrixXd& at_origin() const noexcept { return at_origin_; }
    const Eigen::MatrixXd& inverse_at_origin() const noexcept { return inverse_at_origin_; }

    /// Largest |a^{ij} - a^{ji}| over all nodes.
    double asymmetry() const;
    bool has_off_diagonal() const;

private:
    Grid grid_;
    std::vector<double> entries_;
    Eigen::MatrixXd at_origin_;
    Eigen::MatrixXd inverse_at_origin_;
};

/// Parameters of the structural assumption A(r, theta1, theta2).
struct EllipticityParams {
    double r;
    double theta1;
    double theta2;
};

enum class OperatorKind { Schrodinger, Elliptic };

/// Sparse symmetric discretisation of -div(a grad) + V.
///
/// The principal part (-Laplacian or the flux-form elliptic term) is stored separately
/// from the diagonal potential so hypothesis checks can evaluate Lu and Vu independently.
class DiscreteOperator {
public:
    DiscreteOperator(Grid grid, OperatorKind kind, SparseMatrix principal, ScalarField potential);

    const Grid& grid() const noexcept { return grid_; }
    OperatorKind kind() const noexcept { return kind_; }
    const SparseMatrix& matrix() const noexcept { return matrix_; }
    const SparseMatrix& principal() const noexcept { return principal_; }
    const ScalarField& potential() const noexcept { return potential_; }
    std::size_t size() const noexcept { return grid_.size(); }

    ScalarField apply(const ScalarField& u) const;
    ScalarField apply_principal(const ScalarField& u) const;

    /// Max absolute row sum; an upper bound on the spectral norm.
    double norm_estimate() const noexcept { return norm_estimate_; }
    /// Gershgorin lower bound on the spectrum.
    double spectrum_lower_bound() const noexcept { return lower_bound_; }
    /// True when every nonzero sits on the diagonal or the first off-diagonals.
    bool is_tridiagonal() const noexcept { return tridiagonal_; }

private:
    Grid grid_;
    OperatorKind kind_;
    SparseMatrix principal_;
    ScalarField potential_;
    SparseMatrix matrix_;
    double norm_estimate_ = 0.0;
    double lower_bound_ = 0.0;
    bool tridiagonal_ = false;
};

/// H = -Laplacian + V with the (2d+1)-point stencil.
DiscreteOperator build_schrodinger(const Domain& domain, int n, const ScalarField& potential);

/// L = -sum_ij d_i(a^{ij} d_j) + V. Diagonal terms use midpoint-averaged fluxes, mixed
/// terms use C_i^T diag(a^{ij}) C_j with central differences C, so the matrix is symmetric.
DiscreteOperator build_elliptic(const Domain& domain, int n, const CoefficientField& a,
                                const ScalarField& potential);

struct AssumptionReport {
    bool holds = false;
    bool symmetric = false;
    /// Smallest theta for which theta^{-1} <= eig(a(x)) <= theta at every checked node.
    double worst_ellipticity = 0.0;
    /// Largest observed sum_ij |a^{ij}(x) - a^{ij}(y)| / |x - y|.
    double worst_lipschitz = 0.0;
    std::size_t nodes_checked = 0;
    std::size_t pairs_checked = 0;
};

struct AssumptionCheckOptions {
    /// All node pairs are compared when at most this many nodes lie in B(r).
    std::size_t exhaustive_limit = 10'000;
    std::size_t random_pairs = 100'000;
    std::uint64_t seed = 0x5eed;
};

AssumptionReport check_assumption_a(const CoefficientField& a, const EllipticityParams& params,
                                    const AssumptionCheckOptions& options = {});

struct InequalityReport {
    bool holds = false;
    /// max over nodes of (|P psi| - |V psi|), clipped at zero; P is the principal part.
    double max_violation = 0.0;
    double tolerance = 0.0;
    std::size_t nodes_checked = 0;
};

struct InequalityOptions {
    /// Slack is slack_factor * h^2 * ||psi||_inf.
    double slack_factor = 10.0;
    /// Restrict the check to nodes where this returns true.
    std::function<bool(const Point&)> region;
};

/// Pointwise check of |P psi| <= |V psi| with P the operator's principal part.
InequalityReport check_differential_inequality(const DiscreteOperator& op, const ScalarField& psi,
                                               const ScalarField& potential,
                                               const InequalityOptions& options = {});

}  // namespace ucplab
