#include "ucplab/operator.hpp"

#include "ucplab/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace ucplab {

namespace {

using Triplet = Eigen::Triplet<double, std::ptrdiff_t>;

// Neighbour of `node` one step along `axis` (+1 or -1); nullopt when it falls on an
// eliminated Dirichlet boundary node.
std::optional<std::size_t> neighbour(const Grid& grid, std::size_t node, int axis, int step) {
    MultiIndex idx = grid.multi_index(node);
    const int n = grid.points_per_axis();
    int k = idx[axis] + step;
    if (k < 0 || k >= n) {
        if (grid.domain().boundary() == Boundary::Dirichlet) return std::nullopt;
        k = (k + n) % n;
    }
    idx[axis] = k;
    return grid.flat_index(idx);
}

SparseMatrix from_triplets(std::size_t n, const std::vector<Triplet>& triplets) {
    SparseMatrix m(static_cast<std::ptrdiff_t>(n), static_cast<std::ptrdiff_t>(n));
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.prune(0.0);
    m.makeCompressed();
    return m;
}

SparseMatrix negative_laplacian(const Grid& grid) {
    const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    std::vector<Triplet> t;
    t.reserve(grid.size() * (2 * grid.dim() + 1));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        t.emplace_back(k, k, 2.0 * grid.dim() * inv_h2);
        for (int a = 0; a < grid.dim(); ++a) {
            for (int step : {-1, 1}) {
                if (auto nb = neighbour(grid, k, a, step)) t.emplace_back(k, *nb, -inv_h2);
            }
        }
    }
    return from_triplets(grid.size(), t);
}

// Central difference (u[k+e] - u[k-e]) / 2h along one axis.
SparseMatrix central_difference(const Grid& grid, int axis) {
    const double c = 0.5 / grid.spacing();
    std::vector<Triplet> t;
    t.reserve(grid.size() * 2);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (auto nb = neighbour(grid, k, axis, 1)) t.emplace_back(k, *nb, c);
        if (auto nb = neighbour(grid, k, axis, -1)) t.emplace_back(k, *nb, -c);
    }
    return from_triplets(grid.size(), t);
}

SparseMatrix flux_form(const CoefficientField& a) {
    const Grid& grid = a.grid();
    const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    const bool dirichlet = grid.domain().boundary() == Boundary::Dirichlet;
    std::vector<Triplet> t;
    t.reserve(grid.size() * (2 * grid.dim() + 1));
    // Diagonal summed in coefficient units and scaled once, so a = I matches the Laplacian bit for bit.
    std::vector<double> diag(grid.size(), 0.0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const MultiIndex idx = grid.multi_index(k);
        for (int ax = 0; ax < grid.dim(); ++ax) {
            const double akk = a(k, ax, ax);
            // Edge towards +e_ax; Dirichlet ghost edges use the node's own coefficient.
            if (auto nb = neighbour(grid, k, ax, 1)) {
                const double c = 0.5 * (akk + a(*nb, ax, ax));
                diag[k] += c;
                diag[*nb] += c;
                t.emplace_back(k, *nb, -c * inv_h2);
                t.emplace_back(*nb, k, -c * inv_h2);
            } else {
                diag[k] += akk;
            }
            if (dirichlet && idx[ax] == 0) diag[k] += akk;
        }
    }
    for (std::size_t k = 0; k < grid.size(); ++k) t.emplace_back(k, k, diag[k] * inv_h2);
    SparseMatrix m = from_triplets(grid.size(), t);
    if (!a.has_off_diagonal()) return m;

    std::vector<SparseMatrix> diffs;
    for (int ax = 0; ax < grid.dim(); ++ax) diffs.push_back(central_difference(grid, ax));
    for (int i = 0; i < grid.dim(); ++i) {
        for (int j = 0; j < grid.dim(); ++j) {
            if (i == j) continue;
            Eigen::VectorXd aij(grid.size());
            for (std::size_t k = 0; k < grid.size(); ++k) aij[k] = a(k, i, j);
            if (aij.cwiseAbs().maxCoeff() == 0.0) continue;
            SparseMatrix cross = diffs[i].transpose() * aij.asDiagonal() * diffs[j];
            m += cross;
        }
    }
    m.prune(0.0);
    m.makeCompressed();
    return m;
}

void require_potential(const Grid& grid, const ScalarField& potential) {
    if (!(potential.grid() == grid)) {
        throw DimensionError("potential is sampled on a different grid than (domain, n)");
    }
}

std::pair<double, double> eigen_range(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

}  // namespace

CoefficientField::CoefficientField(Grid grid, std::vector<double> entries, Eigen::MatrixXd at_origin)
    : grid_(grid), entries_(std::move(entries)), at_origin_(std::move(at_origin)) {
    const auto d = static_cast<std::size_t>(grid_.dim());
    if (entries_.size() != grid_.size() * d * d) {
        throw DimensionError("coefficient field needs d*d entries per node");
    }
    if (at_origin_.rows() != grid_.dim() || at_origin_.cols() != grid_.dim()) {
        throw DimensionError("origin coefficient matrix must be d x d");
    }
    for (double v : entries_) {
        if (!std::isfinite(v)) throw InvalidArgument("coefficient values must be finite");
    }
    inverse_at_origin_ = at_origin_.inverse();
    const double defect =
        (inverse_at_origin_ * at_origin_ - Eigen::MatrixXd::Identity(grid_.dim(), grid_.dim()))
            .cwiseAbs()
            .maxCoeff();
    if (!(defect <= 1e-10)) throw InvalidArgument("coefficient matrix at the origin is singular");
}

CoefficientField CoefficientField::identity(const Grid& grid) {
    return sample(grid, [d = grid.dim()](const Point&) { return Eigen::MatrixXd::Identity(d, d); });
}

CoefficientField CoefficientField::sample(const Grid& grid, const MatrixFunction& a) {
    const int d = grid.dim();
    std::vector<double> entries;
    entries.reserve(grid.size() * d * d);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Eigen::MatrixXd m = a(grid.node(k));
        if (m.rows() != d || m.cols() != d) throw DimensionError("coefficient function must return d x d");
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) entries.push_back(m(i, j));
    }
    return CoefficientField(grid, std::move(entries), a(Point{0.0, 0.0, 0.0}));
}

Eigen::MatrixXd CoefficientField::at(std::size_t node) const {
    const int d = dim();
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = (*this)(node, i, j);
    return m;
}

double CoefficientField::asymmetry() const {
    double worst = 0.0;
    for (std::size_t k = 0; k < grid_.size(); ++k)
        for (int i = 0; i < dim(); ++i)
            for (int j = i + 1; j < dim(); ++j) worst = std::max(worst, std::abs((*this)(k, i, j) - (*this)(k, j, i)));
    return worst;
}

bool CoefficientField::has_off_diagonal() const {
    for (std::size_t k = 0; k < grid_.size(); ++k)
        for (int i = 0; i < dim(); ++i)
            for (int j = 0; j < dim(); ++j)
                if (i != j && (*this)(k, i, j) != 0.0) return true;
    return false;
}

DiscreteOperator::DiscreteOperator(Grid grid, OperatorKind kind, SparseMatrix principal, ScalarField potential)
    : grid_(grid), kind_(kind), principal_(std::move(principal)), potential_(std::move(potential)) {
    require_potential(grid_, potential_);
    SparseMatrix diag(principal_.rows(), principal_.cols());
    diag.reserve(Eigen::VectorXi::Constant(diag.cols(), 1));
    for (std::size_t k = 0; k < grid_.size(); ++k) diag.insert(k, k) = potential_[k];
    matrix_ = principal_ + diag;
    matrix_.prune(0.0);
    matrix_.makeCompressed();

    double worst_row = 0.0;
    double lower = std::numeric_limits<double>::infinity();
    Eigen::VectorXd off(matrix_.rows());
    Eigen::VectorXd center(matrix_.rows());
    off.setZero();
    center.setZero();
    tridiagonal_ = true;
    for (std::ptrdiff_t c = 0; c < matrix_.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(matrix_, c); it; ++it) {
            if (it.row() == it.col()) {
                center[it.row()] = it.value();
            } else {
                off[it.row()] += std::abs(it.value());
                if (std::abs(it.row() - it.col()) > 1) tridiagonal_ = false;
            }
        }
    }
    for (std::ptrdiff_t r = 0; r < matrix_.rows(); ++r) {
        worst_row = std::max(worst_row, std::abs(center[r]) + off[r]);
        lower = std::min(lower, center[r] - off[r]);
    }
    norm_estimate_ = worst_row;
    lower_bound_ = lower;
}

ScalarField DiscreteOperator::apply(const ScalarField& u) const {
    require_same_grid(grid_, u.grid(), "operator apply");
    Eigen::Map<const Eigen::VectorXd> x(u.values().data(), u.size());
    Eigen::VectorXd y = matrix_ * x;
    return ScalarField(grid_, std::vector<double>(y.data(), y.data() + y.size()));
}

ScalarField DiscreteOperator::apply_principal(const ScalarField& u) const {
    require_same_grid(grid_, u.grid(), "operator apply");
    Eigen::Map<const Eigen::VectorXd> x(u.values().data(), u.size());
    Eigen::VectorXd y = principal_ * x;
    return ScalarField(grid_, std::vector<double>(y.data(), y.data() + y.size()));
}

DiscreteOperator build_schrodinger(const Domain& domain, int n, const ScalarField& potential) {
    Grid grid(domain, n);
    require_potential(grid, potential);
    return DiscreteOperator(grid, OperatorKind::Schrodinger, negative_laplacian(grid), potential);
}

DiscreteOperator build_elliptic(const Domain& domain, int n, const CoefficientField& a,
                                const ScalarField& potential) {
    Grid grid(domain, n);
    require_potential(grid, potential);
    if (!(a.grid() == grid)) throw DimensionError("coefficient field is sampled on a different grid");
    if (a.asymmetry() > 1e-12) throw InvalidArgument("coefficient matrix a^{ij} is not symmetric");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!(eigen_range(a.at(k)).first > 0.0)) {
            throw InvalidArgument("coefficient matrix is not elliptic at node " + std::to_string(k));
        }
    }
    return DiscreteOperator(grid, OperatorKind::Elliptic, flux_form(a), potential);
}

AssumptionReport check_assumption_a(const CoefficientField& a, const EllipticityParams& params,
                                    const AssumptionCheckOptions& options) {
    if (!(params.r > 0.0) || !(params.theta1 > 0.0) || !(params.theta2 >= 0.0)) {
        throw InvalidArgument("A(r, theta1, theta2) needs r, theta1 > 0 and theta2 >= 0");
    }
    const Grid& grid = a.grid();
    if (params.r > grid.domain().half_length() + 1e-12) {
        throw CoverageError("ball B(0, r) exceeds the gridded cube");
    }
    const int d = grid.dim();
    AssumptionReport report;
    report.symmetric = a.asymmetry() <= 1e-12;

    std::vector<std::size_t> nodes;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (norm(grid.node(k), d) < params.r) nodes.push_back(k);
    }
    report.nodes_checked = nodes.size();
    for (std::size_t k : nodes) {
        const Eigen::MatrixXd m = a.at(k);
        const auto [lo, hi] = eigen_range(0.5 * (m + m.transpose()));
        const double need = lo > 0.0 ? std::max(hi, 1.0 / lo) : std::numeric_limits<double>::infinity();
        report.worst_ellipticity = std::max(report.worst_ellipticity, need);
    }

    auto pair_modulus = [&](std::size_t x, std::size_t y) {
        double s = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) s += std::abs(a(x, i, j) - a(y, i, j));
        return s / distance(grid.node(x), grid.node(y), d);
    };
    if (nodes.size() >= 2) {
        if (nodes.size() <= options.exhaustive_limit) {
            for (std::size_t p = 0; p < nodes.size(); ++p)
                for (std::size_t q = p + 1; q < nodes.size(); ++q)
                    report.worst_lipschitz = std::max(report.worst_lipschitz, pair_modulus(nodes[p], nodes[q]));
            report.pairs_checked = nodes.size() * (nodes.size() - 1) / 2;
        } else {
            std::mt19937_64 rng(options.seed);
            std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
            for (std::size_t s = 0; s < options.random_pairs; ++s) {
                const std::size_t p = pick(rng);
                std::size_t q = pick(rng);
                if (p == q) q = (q + 1) % nodes.size();
                report.worst_lipschitz = std::max(report.worst_lipschitz, pair_modulus(nodes[p], nodes[q]));
            }
            report.pairs_checked = options.random_pairs;
        }
    }
    constexpr double slack = 1e-12;
    report.holds = report.symmetric && report.worst_ellipticity <= params.theta1 * (1.0 + slack) &&
                   report.worst_lipschitz <= params.theta2 * (1.0 + slack) + slack;
    return report;
}

InequalityReport check_differential_inequality(const DiscreteOperator& op, const ScalarField& psi,
                                               const ScalarField& potential,
                                               const InequalityOptions& options) {
    require_same_grid(op.grid(), psi.grid(), "differential inequality");
    require_same_grid(op.grid(), potential.grid(), "differential inequality");
    const ScalarField lpsi = op.apply_principal(psi);
    const Grid& grid = op.grid();
    InequalityReport report;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (options.region && !options.region(grid.node(k))) continue;
        ++report.nodes_checked;
        const double excess = std::abs(lpsi[k]) - std::abs(potential[k] * psi[k]);
        report.max_violation = std::max(report.max_violation, excess);
    }
    const double h = grid.spacing();
    report.tolerance = options.slack_factor * h * h * psi.sup_norm();
    report.holds = report.max_violation <= report.tolerance;
    return report;
}

}  // namespace ucplab
