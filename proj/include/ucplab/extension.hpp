#pragma once

#include "ucplab/spectral.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace ucplab {

/// sinh(sqrt(E) y)/sqrt(E) for E > 0, y for E = 0, sin(sqrt(-E) y)/sqrt(-E) for E < 0.
/// |E| < 1e-12 is taken as E = 0.
double s_case(double energy, double y);

/// F(x', y) = sum_k alpha_k psi_k(x') s_case(E_k, y) on the product of the base grid with
/// the y nodes -Y, ..., Y (2 ny + 1 of them, spacing Y/ny).
struct ExtensionField {
    Grid grid;
    std::vector<double> energies;
    std::vector<double> alphas;
    std::vector<double> y;
    double hy;
    /// N x (2 ny + 1); column m is the slice y[m].
    Eigen::MatrixXd values;
    /// sum_k alpha_k psi_k, the Neumann datum F is built to match.
    ScalarField boundary_target;
    std::vector<std::string> warnings;

    std::size_t zero_slice() const noexcept { return y.size() / 2; }
    ScalarField slice(std::size_t m) const;
};

/// ny = 0 picks the y spacing equal to the base spacing h. Y * Y * max E_k > 50 adds a scaling
/// warning (sinh growth) but is not an error.
ExtensionField build_extension(const SpectralBasis& basis, const ScalarField& psi, double Y = 1.0, int ny = 0);

struct ExtensionResidual {
    /// ||Delta_{d+1} F - V F|| / ||F|| over the product nodes with interior y.
    double l2_residual;
    /// ||d_y F(., 0) - psi|| / ||psi||, one-sided second-order difference.
    double boundary_error;
};

/// Delta_{d+1} is the base Schrodinger stencil of the basis grid plus the y second difference.
ExtensionResidual residual(const ExtensionField& ext, const ScalarField& potential);

/// Rows `m,i_0..i_{d-1},y,F`; every slice, or only `slices` when non-empty.
void write_extension_csv(std::ostream& out, const ExtensionField& ext, const std::vector<std::size_t>& slices = {});

}  // namespace ucplab
