#pragma once

#include <functional>

namespace ucplab {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
    bool converged = false;
};

using Integrand = std::function<double(double)>;

/// Adaptive Simpson with Richardson correction, to absolute tolerance `tol`.
QuadratureResult adaptive_simpson(const Integrand& f, double a, double b, double tol, int max_depth = 48);

/// Globally adaptive 15-point Gauss-Kronrod on [a, b]; stops when the summed error
/// estimate is below max(abs_tol, rel_tol * |value|).
QuadratureResult gauss_kronrod(const Integrand& f, double a, double b, double abs_tol, double rel_tol,
                               int max_intervals = 4000);

/// Integral over [a, inf) through the map t -> a + t/(1-t).
QuadratureResult gauss_kronrod_tail(const Integrand& f, double a, double abs_tol, double rel_tol,
                                    int max_intervals = 4000);

}  // namespace ucplab
