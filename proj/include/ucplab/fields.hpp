#pragma once

#include "ucplab/grid.hpp"
#include "ucplab/operator.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>

namespace ucplab {

// Built-in potential generators.

/// V(x) = offset + amplitude * prod_i sin(wavenumber * x_i).
ScalarField sinusoidal_field(const Grid& grid, double amplitude, double wavenumber, double offset = 0.0);

/// Independent uniform values in [-K, K] at every node.
ScalarField random_potential(const Grid& grid, double bound, std::uint64_t seed);

/// Uniform value in [-K, K] per unit cell Lambda_1 + j (Anderson-type potential).
/// Nodes outside the lattice of full unit cells use the nearest cell.
ScalarField random_cell_potential(const Grid& grid, double bound, std::uint64_t seed);

/// One constant per unit cell, `values` in the lattice order of `unit_cell_sites`.
ScalarField cell_potential(const Grid& grid, std::span<const double> values);

/// Integer lattice sites j with Lambda_1 + j inside the closed cube, axis 0 fastest.
std::vector<MultiIndex> unit_cell_sites(const Domain& domain);

/// Unit-cell index (position in unit_cell_sites) containing x, clamped to the lattice.
std::size_t nearest_cell(const Domain& domain, const Point& x);

// CSV interchange: one row per node, the d node indices first, then the value(s).

void write_field_csv(std::ostream& out, const ScalarField& field);
ScalarField read_field_csv(std::istream& in, const Grid& grid);
ScalarField load_field_csv(const std::filesystem::path& path, const Grid& grid);

/// Rows `i_0..i_{d-1}, a11, a12, ..., a_dd`; the origin matrix is taken from the node
/// nearest to the origin unless given explicitly.
CoefficientField read_coefficients_csv(std::istream& in, const Grid& grid);
CoefficientField load_coefficients_csv(const std::filesystem::path& path, const Grid& grid);

}  // namespace ucplab
