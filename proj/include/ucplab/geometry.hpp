#pragma once

#include "ucplab/grid.hpp"
#include "ucplab/operator.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ucplab {

struct Ball {
    Point center;
    double radius;
};

/// Axis-aligned box [lo, hi].
struct Box {
    Point lo;
    Point hi;
};

using Region = std::variant<Ball, Box>;

double diameter(const Region& region, int dim);
/// Euclidean distance from x to the closure of the region (0 inside).
double distance(const Point& x, const Region& region, int dim);
bool contains(const Region& region, const Point& x, int dim);
/// inner is a subset of outer (closed comparison with 1e-12 slack).
bool is_subset(const Region& inner, const Region& outer, int dim);

/// One delta-ball per unit cell Lambda_1 + j inside the cube.
class BallArrangement {
public:
    BallArrangement(Domain domain, double delta, std::vector<MultiIndex> sites, std::vector<Point> centers);

    const Domain& domain() const noexcept { return domain_; }
    double delta() const noexcept { return delta_; }
    std::size_t size() const noexcept { return centers_.size(); }
    const std::vector<MultiIndex>& sites() const noexcept { return sites_; }
    const std::vector<Point>& centers() const noexcept { return centers_; }

    /// Offsets x_j - j in site order, dim() components each.
    std::vector<double> offsets() const;

    /// Centre of the ball owned by the unit cell containing x, if that cell exists.
    std::optional<Point> ball_for(const Point& x) const;

    /// Union of the balls, clipped to the cube.
    double measure_estimate() const;

private:
    Domain domain_;
    double delta_;
    std::vector<MultiIndex> sites_;
    std::vector<Point> centers_;
    int jmax_;
};

namespace arrangement {
struct Periodic {};
/// Offsets drawn uniformly from [-amplitude, amplitude]^d.
struct Jitter {
    std::uint64_t seed;
    double amplitude;
};
/// One centre per unit cell, in unit_cell_sites order.
struct Explicit {
    std::vector<Point> centers;
};
using Mode = std::variant<Periodic, Jitter, Explicit>;
}  // namespace arrangement

BallArrangement make_arrangement(const Domain& domain, double delta, const arrangement::Mode& mode);

/// Arrangement with x_j = j + offsets_j; offsets as returned by BallArrangement::offsets().
BallArrangement arrangement_from_offsets(const Domain& domain, double delta, std::span<const double> offsets);

/// Per-node fraction of the node's cell covered by a set.
class IndicatorField {
public:
    IndicatorField(Grid grid, std::vector<double> weights);

    static IndicatorField whole(const Grid& grid);

    const Grid& grid() const noexcept { return grid_; }
    std::span<const double> weights() const noexcept { return weights_; }
    double operator[](std::size_t k) const noexcept { return weights_[k]; }
    /// sum(weights) * h^d
    double mass() const;

private:
    Grid grid_;
    std::vector<double> weights_;
};

/// Cell fractions inside the union of balls, from subsamples^d midpoint samples per cell.
IndicatorField indicator(const BallArrangement& arrangement, const Grid& grid, int subsamples = 8);
IndicatorField indicator(const Region& region, const Grid& grid, int subsamples = 8);

/// sum field^2 * weight * h^d.
double integrate(const ScalarField& field, const IndicatorField& weight);
/// sum field^2 * h^d.
double integrate(const ScalarField& field);

/// Rows `site_j0[,site_j1,...],x0[,x1,...]`.
void write_arrangement_csv(std::ostream& out, const BallArrangement& arrangement);

struct QUCGeometry {
    Point x;
    double R;
    double D0 = 0.0;
    double delta;
    Region theta;
    Region G;
};

namespace quc {
struct Schrodinger {};
struct Elliptic {
    EllipticityParams params;
    double mu;
    /// When given, A(12R + 2 D0, theta1, theta2) is checked on it; otherwise it is assumed.
    const CoefficientField* coefficients = nullptr;
};
using Variant = std::variant<Schrodinger, Elliptic>;
}  // namespace quc

struct Clause {
    std::string name;
    bool ok;
    double lhs;
    double rhs;
};

struct HypothesisReport {
    bool holds = true;
    std::vector<Clause> clauses;
    std::vector<std::string> failed_clauses;
    /// e * mu for the elliptic variant, 0 otherwise.
    double c3 = 0.0;
};

HypothesisReport check_quc_hypotheses(const QUCGeometry& geo, const quc::Variant& variant, int dim);

}  // namespace ucplab
