#include "ucplab/observability.hpp"

#include "ucplab/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace ucplab {

namespace {

constexpr double kInequalityTol = 1e-10;

double two_thirds_power(double x) {
    const double c = std::cbrt(x);
    return c * c;
}

}  // namespace

double ratio(const ScalarField& psi, const IndicatorField& weight) {
    const double whole = integrate(psi);
    if (!(whole > 0.0)) throw InvalidArgument("observability ratio is undefined for the zero field");
    return std::clamp(integrate(psi, weight) / whole, 0.0, 1.0);
}

double ratio(const ScalarField& psi, const BallArrangement& arrangement, int subsamples) {
    return ratio(psi, indicator(arrangement, psi.grid(), subsamples));
}

double uncertainty_constant(const SpectralBasis& basis, const IndicatorField& weight) {
    if (basis.empty()) throw InvalidArgument("uncertainty constant of an empty spectral subspace is vacuous");
    require_same_grid(basis.grid(), weight.grid(), "uncertainty constant");
    Eigen::VectorXd w(static_cast<Eigen::Index>(weight.weights().size()));
    for (Eigen::Index k = 0; k < w.size(); ++k) w[k] = weight[static_cast<std::size_t>(k)] * basis.grid().cell_volume();
    const Eigen::MatrixXd& modes = basis.modes();
    Eigen::MatrixXd m = modes.transpose() * w.asDiagonal() * modes;
    m = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    // M is a compression of 0 <= W <= 1, so only round-off can push it outside [0, 1].
    return std::clamp(es.eigenvalues().minCoeff(), 0.0, 1.0);
}

double uncertainty_constant(const SpectralBasis& basis, const BallArrangement& arrangement, int subsamples) {
    return uncertainty_constant(basis, indicator(arrangement, basis.grid(), subsamples));
}

double sfuc_bound(double delta, const BoundParams& params) {
    if (!(delta > 0.0 && delta < 0.5)) throw InvalidArgument("delta must be in (0, 1/2)");
    if (!(params.E >= 0.0)) throw DomainError("sfuc bound requires E >= 0");
    if (!(params.N > 0.0)) throw InvalidArgument("exponent constant N must be > 0");
    if (!(params.K >= 0.0)) throw InvalidArgument("potential bound K must be >= 0");
    return std::pow(delta, params.N * (1.0 + two_thirds_power(params.K) + std::sqrt(params.E)));
}

KleinBound klein_gamma(double delta, const BoundParams& params) {
    if (!(delta > 0.0 && delta <= 0.5)) throw InvalidArgument("delta must be in (0, 1/2]");
    if (!(params.M_d > 0.0)) throw InvalidArgument("constant M_d must be > 0");
    if (!(params.K >= 0.0)) throw InvalidArgument("potential bound K must be >= 0");
    const double exponent = params.M_d * (1.0 + two_thirds_power(2.0 * params.K + params.E));
    const double gamma = 0.5 * std::pow(delta, exponent);
    return {gamma, gamma * gamma};
}

ChainReport chain_check(const DiscreteOperator& op, const BallArrangement& arrangement, double a, double b,
                        const SpectralOptions& options) {
    ChainReport report;
    const SpectralBasis local = spectrum_below(op, EnergyWindow::interval(a, b), options);
    const SpectralBasis half = spectrum_below(op, EnergyWindow::below(b), options);
    if (local.empty() || half.empty()) {
        report.skipped = true;
        report.notice = local.empty() ? "window [a, b] holds no spectrum" : "window (-inf, b] holds no spectrum";
        return report;
    }
    const IndicatorField w = indicator(arrangement, op.grid());
    report.c_interval = uncertainty_constant(local, w);
    report.c_halfline = uncertainty_constant(half, w);
    report.holds = report.c_interval >= report.c_halfline - kInequalityTol;
    return report;
}

ExponentFit fit_exponent(std::span<const ScaleSample> samples) {
    ExponentFit fit;
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& s : samples) {
        if (!(s.constant > 0.0) || !(s.delta > 0.0)) {
            ++fit.rejected;
            continue;
        }
        xs.push_back(std::log(s.delta));
        ys.push_back(std::log(s.constant));
    }
    fit.used = xs.size();
    if (fit.used < 4) throw InvalidArgument("exponent fit needs at least 4 positive samples");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw InvalidArgument("exponent fit needs at least two distinct delta values");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

QucObservation empirical_quc(const DiscreteOperator& op, const ScalarField& psi, const QUCGeometry& geo,
                             const ScalarField& potential, int subsamples) {
    const Grid& grid = op.grid();
    require_same_grid(grid, psi.grid(), "empirical qUC");
    const int d = grid.dim();
    const double half = grid.domain().half_length();
    Box cube{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
    for (int a = 0; a < d; ++a) {
        cube.lo[a] = -half;
        cube.hi[a] = half;
    }
    if (!is_subset(geo.G, cube, d)) throw CoverageError("region G is not covered by the grid");

    QucObservation obs;
    const double on_theta = integrate(psi, indicator(geo.theta, grid, subsamples));
    if (!(on_theta > 0.0)) throw InvalidArgument("integral over Theta vanishes; qUC ratio undefined");
    const double on_ball = integrate(psi, indicator(Ball{geo.x, geo.delta}, grid, subsamples));
    const double on_g = integrate(psi, indicator(geo.G, grid, subsamples));
    obs.ratio_delta_theta = on_ball / on_theta;
    obs.beta_observed = on_g / on_theta;
    obs.hypotheses = check_quc_hypotheses(geo, quc::Schrodinger{}, d);

    InequalityOptions opt;
    opt.region = [&](const Point& p) { return contains(geo.G, p, d); };
    obs.inequality = check_differential_inequality(op, psi, potential, opt);
    if (!obs.inequality.holds) {
        obs.hypotheses.holds = false;
        obs.hypotheses.failed_clauses.push_back("|P psi| <= |V psi| on G");
        obs.hypotheses.clauses.push_back(
            {"|P psi| <= |V psi| on G", false, obs.inequality.max_violation, obs.inequality.tolerance});
    } else {
        obs.hypotheses.clauses.push_back(
            {"|P psi| <= |V psi| on G", true, obs.inequality.max_violation, obs.inequality.tolerance});
    }
    return obs;
}

}  // namespace ucplab
