#include "ucplab/extension.hpp"

#include "ucplab/error.hpp"
#include "ucplab/operator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace ucplab {

namespace {
constexpr double kLinearBranch = 1e-12;
constexpr double kGrowthLimit = 50.0;
}  // namespace

double s_case(double energy, double y) {
    if (std::abs(energy) < kLinearBranch) return y;
    const double r = std::sqrt(std::abs(energy));
    return energy > 0.0 ? std::sinh(r * y) / r : std::sin(r * y) / r;
}

ScalarField ExtensionField::slice(std::size_t m) const {
    if (m >= y.size()) throw InvalidArgument("extension slice index out of range");
    const auto col = values.col(static_cast<Eigen::Index>(m));
    return ScalarField(grid, std::vector<double>(col.data(), col.data() + col.size()));
}

ExtensionField build_extension(const SpectralBasis& basis, const ScalarField& psi, double Y, int ny) {
    if (basis.empty()) throw InvalidArgument("extension needs a nonempty spectral basis");
    if (!(Y > 0.0)) throw InvalidArgument("extension half-height Y must be > 0");
    if (ny < 0) throw InvalidArgument("ny must be >= 0");
    const Grid& grid = basis.grid();
    if (ny == 0) ny = std::max(2, static_cast<int>(std::lround(Y / grid.spacing())));

    std::vector<double> alphas = expand(basis, psi);
    const std::size_t m = basis.size();
    const auto cols = static_cast<Eigen::Index>(2 * ny + 1);
    const double hy = Y / ny;
    std::vector<double> ys(static_cast<std::size_t>(cols));
    for (Eigen::Index c = 0; c < cols; ++c) ys[static_cast<std::size_t>(c)] = (static_cast<double>(c) - ny) * hy;

    Eigen::MatrixXd s(static_cast<Eigen::Index>(m), cols);
    for (std::size_t k = 0; k < m; ++k)
        for (Eigen::Index c = 0; c < cols; ++c)
            s(static_cast<Eigen::Index>(k), c) = alphas[k] * s_case(basis.energy(k), ys[static_cast<std::size_t>(c)]);

    std::vector<std::string> warnings;
    const auto energies = basis.energies();
    const double emax = *std::max_element(energies.begin(), energies.end());
    if (emax * Y * Y > kGrowthLimit) {
        std::ostringstream w;
        w << "E*Y^2 = " << emax * Y * Y << " exceeds " << kGrowthLimit << "; sinh growth dominates the extension";
        warnings.push_back(w.str());
    }

    return ExtensionField{
        .grid = grid,
        .energies = std::vector<double>(energies.begin(), energies.end()),
        .alphas = alphas,
        .y = std::move(ys),
        .hy = hy,
        .values = basis.modes() * s,
        .boundary_target = synthesize(basis, alphas),
        .warnings = std::move(warnings),
    };
}

ExtensionResidual residual(const ExtensionField& ext, const ScalarField& potential) {
    require_same_grid(ext.grid, potential.grid(), "extension residual");
    const Grid& grid = ext.grid;
    const DiscreteOperator lap = build_schrodinger(grid.domain(), grid.points_per_axis(), ScalarField::zeros(grid));
    const Eigen::MatrixXd& f = ext.values;
    const Eigen::Index cols = f.cols();
    if (cols < 3) throw InvalidArgument("extension needs at least three y nodes");

    Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) v[static_cast<Eigen::Index>(i)] = potential[i];

    const Eigen::MatrixXd inner = f.middleCols(1, cols - 2);
    Eigen::MatrixXd r = -(lap.principal() * inner);
    r += (f.leftCols(cols - 2) - 2.0 * inner + f.rightCols(cols - 2)) / (ext.hy * ext.hy);
    r -= v.asDiagonal() * inner;
    const double fn = inner.norm();
    if (!(fn > 0.0)) throw InvalidArgument("extension residual is undefined for F = 0");

    const auto z = static_cast<Eigen::Index>(ext.zero_slice());
    const Eigen::VectorXd dy = (-3.0 * f.col(z) + 4.0 * f.col(z + 1) - f.col(z + 2)) / (2.0 * ext.hy);
    Eigen::VectorXd target(dy.size());
    for (Eigen::Index i = 0; i < target.size(); ++i) target[i] = ext.boundary_target[static_cast<std::size_t>(i)];
    const double tn = target.norm();
    const double boundary = tn > 0.0 ? (dy - target).norm() / tn : dy.norm();
    return {r.norm() / fn, boundary};
}

void write_extension_csv(std::ostream& out, const ExtensionField& ext, const std::vector<std::size_t>& slices) {
    const int d = ext.grid.dim();
    out << "m";
    for (int a = 0; a < d; ++a) out << ",i" << a;
    out << ",y,F\n";
    out.precision(17);
    std::vector<std::size_t> chosen = slices;
    if (chosen.empty())
        for (std::size_t m = 0; m < ext.y.size(); ++m) chosen.push_back(m);
    for (std::size_t m : chosen) {
        if (m >= ext.y.size()) throw InvalidArgument("extension slice index out of range");
        for (std::size_t i = 0; i < ext.grid.size(); ++i) {
            const MultiIndex idx = ext.grid.multi_index(i);
            out << m;
            for (int a = 0; a < d; ++a) out << ',' << idx[a];
            out << ',' << ext.y[m] << ',' << ext.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m))
                << '\n';
        }
    }
}

}  // namespace ucplab
