#include "ucplab/carleman.hpp"

#include "ucplab/error.hpp"
#include "ucplab/quadrature.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

namespace ucplab {

namespace {

constexpr double kSeriesCut = 1e-3;
constexpr double kQuadTol = 1e-13;
constexpr int kTablePanels = 256;
constexpr double kBoundSlack = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Ein(z) = sum_{k>=1} (-1)^{k+1} z^k / (k k!)
double ein_series(double z) {
    double term = z;  // z^k / k!
    double sum = 0.0;
    for (int k = 1; k < 200; ++k) {
        const double add = (k % 2 ? 1.0 : -1.0) * term / k;
        sum += add;
        if (std::abs(add) <= 1e-18 * std::abs(sum)) break;
        term *= z / (k + 1);
    }
    return sum;
}

double integrand(double mu, double t) { return -std::expm1(-mu * t) / t; }

double integral_between(double mu, double a, double b) {
    if (b <= a) return 0.0;
    double total = 0.0;
    if (a < kSeriesCut) {
        const double top = std::min(b, kSeriesCut);
        total += ein_series(mu * top) - ein_series(mu * a);
        a = top;
    }
    if (b > a) total += adaptive_simpson([mu](double t) { return integrand(mu, t); }, a, b, kQuadTol).value;
    return total;
}

struct LogSum {
    double max = kNegInf;
    double scaled = 0.0;

    void add(double log_term) {
        if (log_term == kNegInf) return;
        if (log_term > max) {
            scaled = scaled * std::exp(max - log_term) + 1.0;
            max = log_term;
        } else {
            scaled += std::exp(log_term - max);
        }
    }
    double value() const { return max == kNegInf ? kNegInf : max + std::log(scaled); }
};

double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double safe_exp(double x) { return x == kNegInf ? 0.0 : std::exp(x); }

// Value of f at the neighbour of `flat` along `axis` (step +-1); 0 past a Dirichlet edge.
double neighbour(const Grid& grid, const ScalarField& f, std::size_t flat, int axis, int step) {
    MultiIndex idx = grid.multi_index(flat);
    const int n = grid.points_per_axis();
    idx[axis] += step;
    if (idx[axis] < 0 || idx[axis] >= n) {
        if (grid.domain().boundary() == Boundary::Dirichlet) return 0.0;
        idx[axis] = (idx[axis] + n) % n;
    }
    return f[grid.flat_index(idx)];
}

std::string node_name(const Grid& grid, std::size_t flat) {
    const MultiIndex idx = grid.multi_index(flat);
    std::string s = "(";
    for (int a = 0; a < grid.dim(); ++a) s += (a ? "," : "") + std::to_string(idx[a]);
    return s + ")";
}

}  // namespace

double carleman_exponent_integral(double mu, double s) {
    if (!(mu > 0.0)) throw InvalidArgument("weight parameter mu must be > 0");
    if (!(s >= 0.0)) throw DomainError("psi is defined for s >= 0");
    return integral_between(mu, 0.0, s);
}

CarlemanWeight::CarlemanWeight(double mu, Eigen::MatrixXd a_inv_at_origin, double s_max)
    : mu_(mu), a_inv_(std::move(a_inv_at_origin)) {
    if (!(mu_ > 0.0)) throw InvalidArgument("weight parameter mu must be > 0");
    if (!(s_max > 0.0)) throw InvalidArgument("psi table range must be > 0");
    const auto d = a_inv_.rows();
    if (d < 1 || d > kMaxDim || a_inv_.cols() != d) throw DimensionError("a_inv(0) must be a square d x d matrix");
    if (!a_inv_.allFinite()) throw InvalidArgument("a_inv(0) must be finite");
    if ((a_inv_ - a_inv_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, a_inv_.cwiseAbs().maxCoeff())) {
        throw InvalidArgument("a_inv(0) must be symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(a_inv_);
    if (llt.info() != Eigen::Success) throw InvalidArgument("a_inv(0) must be positive definite");

    table_step_ = s_max / kTablePanels;
    table_.resize(kTablePanels + 1);
    table_[0] = 0.0;
    for (int k = 1; k <= kTablePanels; ++k)
        table_[k] = table_[k - 1] + integral_between(mu_, (k - 1) * table_step_, k * table_step_);
}

CarlemanWeight CarlemanWeight::identity(int dim, double mu) {
    if (dim < 1 || dim > kMaxDim) throw DimensionError("dimension must be 1, 2 or 3");
    return CarlemanWeight(mu, Eigen::MatrixXd::Identity(dim, dim));
}

CarlemanWeight CarlemanWeight::from_coefficients(const CoefficientField& a, double mu) {
    return CarlemanWeight(mu, a.inverse_at_origin());
}

double CarlemanWeight::c3() const noexcept { return std::numbers::e * mu_; }

double CarlemanWeight::sigma(const Point& x) const {
    const int d = dim();
    double q = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) q += a_inv_(i, j) * x[i] * x[j];
    return std::sqrt(std::max(q, 0.0));
}

double CarlemanWeight::exponent_integral(double s) const {
    if (!(s >= 0.0)) throw DomainError("psi is defined for s >= 0");
    const auto last = static_cast<double>(table_.size() - 1);
    const double k = std::min(std::floor(s / table_step_), last);
    const double base = k * table_step_;
    return table_[static_cast<std::size_t>(k)] + integral_between(mu_, base, s);
}

double CarlemanWeight::psi(double s) const { return s * std::exp(-exponent_integral(s)); }

WeightBoundsReport check_weight_bounds(const CarlemanWeight& w, double theta1, const std::vector<Point>& points) {
    if (!(theta1 > 0.0)) throw InvalidArgument("theta1 must be > 0");
    WeightBoundsReport rep;
    rep.points = points.size();
    rep.margin = std::numeric_limits<double>::infinity();
    const double root = std::sqrt(theta1);
    for (const auto& x : points) {
        const double r = norm(x, w.dim());
        if (r > 1.0 + kBoundSlack) throw InvalidArgument("weight-bound points must lie in B(0,1)");
        const double v = w(x);
        const double lower = r / (w.c3() * root);
        const double upper = root * r;
        const double m = std::min(v - lower, upper - v);
        rep.margin = std::min(rep.margin, m);
        if (v < lower - kBoundSlack || v > upper + kBoundSlack) ++rep.violations;
    }
    if (points.empty()) rep.margin = 0.0;
    return rep;
}

CarlemanFunctionals carleman_functionals(const CarlemanWeight& w, const DiscreteOperator& op, const ScalarField& f,
                                         double alpha, const SupportOptions& support) {
    const Grid& grid = op.grid();
    require_same_grid(grid, f.grid(), "carleman functionals");
    const int d = grid.dim();
    if (w.dim() != d) throw DimensionError("weight dimension does not match the grid");
    if (!(alpha > 0.0)) throw InvalidArgument("alpha must be > 0");
    if (!(support.rho_in >= 0.0 && support.rho_out >= 0.0 && support.rho_out < 1.0)) {
        throw InvalidArgument("support cutoffs must satisfy rho_in >= 0 and 0 <= rho_out < 1");
    }
    if (grid.domain().half_length() < 1.0 - 1e-12) throw CoverageError("grid does not cover B(0,1)");

    std::vector<std::string> offending;
    std::size_t n_offending = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (f[i] == 0.0) continue;
        const Point x = grid.node(i);
        if (w.sigma(x) < support.rho_in || norm(x, d) > 1.0 - support.rho_out) {
            if (offending.size() < 5) offending.push_back(node_name(grid, i));
            ++n_offending;
        }
    }
    if (n_offending) {
        std::string msg = "f must vanish where sigma < rho_in or |x| > 1 - rho_out; " + std::to_string(n_offending) +
                          " offending node(s):";
        for (const auto& s : offending) msg += " " + s;
        throw InvalidArgument(msg);
    }

    const ScalarField lf = op.apply_principal(f);
    const double h = grid.spacing();
    const double log_cell = std::log(grid.cell_volume());
    const double log_alpha = std::log(alpha);
    LogSum grad_sum, cube_sum, rhs_sum;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double g2 = 0.0;
        for (int a = 0; a < d; ++a) {
            const double g = (neighbour(grid, f, i, a, 1) - neighbour(grid, f, i, a, -1)) / (2.0 * h);
            g2 += g * g;
        }
        const double f2 = f[i] * f[i];
        const double l2 = lf[i] * lf[i];
        if (g2 == 0.0 && f2 == 0.0 && l2 == 0.0) continue;
        const double wv = w(grid.node(i));
        if (!(wv > 0.0)) throw InvalidArgument("weight vanishes at node " + node_name(grid, i) + " inside the support");
        const double lw = std::log(wv);
        if (g2 > 0.0) grad_sum.add(log_cell + log_alpha + (1.0 - 2.0 * alpha) * lw + std::log(g2));
        if (f2 > 0.0) cube_sum.add(log_cell + 3.0 * log_alpha + (-1.0 - 2.0 * alpha) * lw + std::log(f2));
        if (l2 > 0.0) rhs_sum.add(log_cell + (2.0 - 2.0 * alpha) * lw + std::log(l2));
    }

    CarlemanFunctionals out;
    out.alpha = alpha;
    const double lg = grad_sum.value();
    const double lc = cube_sum.value();
    out.log_lhs = log_add(lg, lc);
    out.log_rhs = rhs_sum.value();
    out.lhs_grad = safe_exp(lg);
    out.lhs_cube = safe_exp(lc);
    out.lhs = safe_exp(out.log_lhs);
    out.rhs = safe_exp(out.log_rhs);
    if (out.log_lhs == kNegInf) {
        out.ratio = 0.0;
    } else if (out.log_rhs == kNegInf) {
        out.anomaly = true;
        out.ratio = std::numeric_limits<double>::infinity();
    } else {
        out.ratio = std::exp(out.log_lhs - out.log_rhs);
    }
    return out;
}

C2Estimate estimate_C2(const CarlemanWeight& w, const DiscreteOperator& op, const std::vector<ScalarField>& family,
                       const std::vector<double>& alpha_grid, const SupportOptions& support, unsigned workers) {
    if (family.empty()) throw InvalidArgument("C2 estimate needs a nonempty family of test fields");
    if (alpha_grid.empty()) throw InvalidArgument("C2 estimate needs a nonempty alpha grid");
    const std::size_t total = family.size() * alpha_grid.size();
    std::vector<C2Row> rows(total);
    std::vector<std::exception_ptr> errors(total);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < total; k = next++) {
            const std::size_t fi = k / alpha_grid.size();
            try {
                rows[k] = {fi, carleman_functionals(w, op, family[fi], alpha_grid[k % alpha_grid.size()], support)};
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    if (!workers) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(total));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    C2Estimate est;
    for (const auto& r : rows) est.sup_ratio = std::max(est.sup_ratio, r.values.ratio);
    est.per_alpha = std::move(rows);
    return est;
}

void write_c2_csv(std::ostream& out, const C2Estimate& est) {
    out << "field,alpha,lhs_grad,lhs_cube,rhs,ratio\n";
    out.precision(17);
    for (const auto& r : est.per_alpha) {
        out << r.field << ',' << r.values.alpha << ',' << r.values.lhs_grad << ',' << r.values.lhs_cube << ','
            << r.values.rhs << ',' << r.values.ratio << '\n';
    }
}

ScalarField annulus_bump(const Grid& grid, double radius, double half_width, double power) {
    if (!(radius >= 0.0 && half_width > 0.0)) throw InvalidArgument("bump needs radius >= 0 and half width > 0");
    if (!(power >= 0.0)) throw InvalidArgument("bump power must be >= 0");
    const int d = grid.dim();
    return ScalarField::sample(grid, [&](const Point& x) {
        const double u = (norm(x, d) - radius) / half_width;
        if (std::abs(u) >= 1.0) return 0.0;
        if (power > 0.0) return std::pow(1.0 - u * u, power);
        return std::exp(1.0 - 1.0 / (1.0 - u * u));
    });
}

}  // namespace ucplab
