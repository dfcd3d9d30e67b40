#pragma once

#include "ucplab/operator.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace ucplab {

/// w = psi o sigma with sigma(x) = sqrt(x^T a_inv(0) x) and
/// psi(s) = s exp(-int_0^s (1 - e^{-mu t})/t dt).
class CarlemanWeight {
public:
    /// a_inv_at_origin is the inverse coefficient matrix a_{ij}(0); it must be symmetric
    /// positive definite. psi is tabulated on [0, s_max] (larger s are integrated directly).
    CarlemanWeight(double mu, Eigen::MatrixXd a_inv_at_origin, double s_max = 4.0);

    static CarlemanWeight identity(int dim, double mu);
    static CarlemanWeight from_coefficients(const CoefficientField& a, double mu);

    double mu() const noexcept { return mu_; }
    int dim() const noexcept { return static_cast<int>(a_inv_.rows()); }
    const Eigen::MatrixXd& a_inv_at_origin() const noexcept { return a_inv_; }
    /// e * mu
    double c3() const noexcept;

    double sigma(const Point& x) const;
    /// int_0^s (1 - e^{-mu t})/t dt
    double exponent_integral(double s) const;
    double psi(double s) const;
    double operator()(const Point& x) const { return psi(sigma(x)); }

private:
    double mu_;
    Eigen::MatrixXd a_inv_;
    double table_step_;
    std::vector<double> table_;  // exponent_integral at k * table_step_
};

/// int_0^s (1 - e^{-mu t})/t dt by series below t = 1e-3 and adaptive Simpson above.
double carleman_exponent_integral(double mu, double s);

struct WeightBoundsReport {
    std::size_t violations = 0;
    /// min over points of min(w - lower, upper - w); negative on a violation.
    double margin = 0.0;
    std::size_t points = 0;
};

/// |x|/(C3 sqrt(theta1)) <= w(x) <= sqrt(theta1) |x| with 1e-12 slack; points must lie in B(0,1).
WeightBoundsReport check_weight_bounds(const CarlemanWeight& w, double theta1, const std::vector<Point>& points);

struct SupportOptions {
    double rho_in = 0.05;
    double rho_out = 0.05;
};

struct CarlemanFunctionals {
    double alpha = 0.0;
    double lhs_grad = 0.0;   ///< int alpha w^{1-2 alpha} |grad f|^2
    double lhs_cube = 0.0;   ///< int alpha^3 w^{-1-2 alpha} f^2
    double rhs = 0.0;        ///< int w^{2-2 alpha} (L f)^2
    double lhs = 0.0;
    double log_lhs = 0.0;    ///< natural logs, finite even when the plain values overflow
    double log_rhs = 0.0;
    double ratio = 0.0;      ///< lhs / rhs (0 for f = 0)
    bool anomaly = false;    ///< rhs = 0 with lhs > 0
};

/// Grid quadrature of both sides of the Carleman inequality, accumulated in log space.
/// L f is the principal part of `op`; grad f uses central differences. Throws
/// InvalidArgument naming the offending nodes when f is nonzero where sigma < rho_in or
/// |x| > 1 - rho_out, and CoverageError when the grid does not cover B(0,1).
CarlemanFunctionals carleman_functionals(const CarlemanWeight& w, const DiscreteOperator& op, const ScalarField& f,
                                         double alpha, const SupportOptions& support = {});

struct C2Row {
    std::size_t field;
    CarlemanFunctionals values;
};

struct C2Estimate {
    double sup_ratio = 0.0;
    std::vector<C2Row> per_alpha;  ///< field-major, then alpha in grid order
};

/// sup of the functional ratio over family x alpha_grid; rows computed concurrently.
C2Estimate estimate_C2(const CarlemanWeight& w, const DiscreteOperator& op, const std::vector<ScalarField>& family,
                       const std::vector<double>& alpha_grid, const SupportOptions& support = {},
                       unsigned workers = 0);

/// Columns `field,alpha,lhs_grad,lhs_cube,rhs,ratio`.
void write_c2_csv(std::ostream& out, const C2Estimate& est);

/// Radial bump in u = (|x| - radius)/half_width, zero for |u| >= 1: (1 - u^2)^power, or the
/// C-infinity profile exp(1 - 1/(1 - u^2)) when power = 0.
ScalarField annulus_bump(const Grid& grid, double radius, double half_width, double power = 0.0);

}  // namespace ucplab
