#pragma once

#include "ucplab/geometry.hpp"
#include "ucplab/operator.hpp"
#include "ucplab/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ucplab {

/// Parameters of the explicit bound formulas. N and M_d exist in theory but have no
/// known value; they are inputs (default 1).
struct BoundParams {
    double K = 0.0;   ///< ||V||_inf
    double E = 0.0;   ///< energy threshold
    double N = 1.0;   ///< exponent constant N(d)
    double M_d = 1.0; ///< short-interval exponent constant
};

/// integral over S_L of psi^2 divided by the integral over the cube.
double ratio(const ScalarField& psi, const BallArrangement& arrangement, int subsamples = 8);
double ratio(const ScalarField& psi, const IndicatorField& weight);

/// Best constant C in P W P >= C P on the range of the basis: the smallest eigenvalue
/// of M_kl = <psi_k, W psi_l>.
double uncertainty_constant(const SpectralBasis& basis, const IndicatorField& weight);
double uncertainty_constant(const SpectralBasis& basis, const BallArrangement& arrangement, int subsamples = 8);

/// delta^{N (1 + K^{2/3} + sqrt(E))}.
double sfuc_bound(double delta, const BoundParams& params);

struct KleinBound {
    double gamma;
    double bound;  ///< gamma^2
};
/// gamma = delta^{M_d (1 + (2K + E)^{2/3})} / 2.
KleinBound klein_gamma(double delta, const BoundParams& params);

struct ChainReport {
    bool skipped = false;
    std::string notice;
    double c_interval = 0.0;  ///< constant for [a, b]
    double c_halfline = 0.0;  ///< constant for (-inf, b]
    bool holds = false;
};

/// Verifies C_[a,b] >= C_(-inf,b] - 1e-10.
ChainReport chain_check(const DiscreteOperator& op, const BallArrangement& arrangement, double a, double b,
                        const SpectralOptions& options = {});

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t used = 0;
    std::size_t rejected = 0;
};

struct ScaleSample {
    double delta;
    double constant;
};

/// Least squares of log(constant) against log(delta). Samples with constant <= 0 are
/// rejected; at least four must remain.
ExponentFit fit_exponent(std::span<const ScaleSample> samples);

struct QucObservation {
    double ratio_delta_theta = 0.0;  ///< int_{B(x,delta)} psi^2 / int_Theta psi^2
    double beta_observed = 0.0;      ///< int_G psi^2 / int_Theta psi^2
    HypothesisReport hypotheses;
    InequalityReport inequality;      ///< |P psi| <= |V psi| on the nodes inside G
};

/// Measures the local unique-continuation ratio; the constant itself is never assumed.
QucObservation empirical_quc(const DiscreteOperator& op, const ScalarField& psi, const QUCGeometry& geo,
                             const ScalarField& potential, int subsamples = 8);

}  // namespace ucplab
