#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ucplab {

inline constexpr int kMaxDim = 3;

/// Point in R^d; components past dim() are zero.
using Point = std::array<double, kMaxDim>;
using MultiIndex = std::array<int, kMaxDim>;

enum class Boundary { Dirichlet, Periodic };

const char* to_string(Boundary bc);
Boundary boundary_from_string(const std::string& name);

/// The open cube (-L/2, L/2)^d together with its boundary rule.
class Domain {
public:
    Domain(int dim, double length, Boundary bc);

    int dim() const noexcept { return dim_; }
    double length() const noexcept { return length_; }
    double half_length() const noexcept { return 0.5 * length_; }
    Boundary boundary() const noexcept { return bc_; }

    /// Closed-cube membership, with `slack` added to the half side.
    bool contains(const Point& x, double slack = 0.0) const;

    bool operator==(const Domain&) const = default;

private:
    int dim_;
    double length_;
    Boundary bc_;
};

/// Tensor grid of n interior nodes per axis.
///
/// Dirichlet: h = L/(n+1), nodes at -L/2 + (i+1)h; boundary nodes are eliminated.
/// Periodic:  h = L/n, cell-centred nodes at -L/2 + (i+1/2)h with wraparound.
/// Every node owns the cell [x - h/2, x + h/2]^d; flat indices run axis 0 fastest.
class Grid {
public:
    Grid(Domain domain, int n);

    const Domain& domain() const noexcept { return domain_; }
    int dim() const noexcept { return domain_.dim(); }
    int points_per_axis() const noexcept { return n_; }
    double spacing() const noexcept { return h_; }
    std::size_t size() const noexcept { return size_; }
    double cell_volume() const noexcept { return cell_volume_; }

    double coordinate(int i) const noexcept;
    Point node(std::size_t flat) const noexcept;
    MultiIndex multi_index(std::size_t flat) const noexcept;
    std::size_t flat_index(const MultiIndex& idx) const noexcept;

    bool operator==(const Grid&) const = default;

private:
    Domain domain_;
    int n_;
    double h_;
    std::size_t size_;
    double cell_volume_;
};

/// Grid-sampled real function with its cached sup-norm.
class ScalarField {
public:
    ScalarField(Grid grid, std::vector<double> values);

    static ScalarField zeros(const Grid& grid);
    static ScalarField constant(const Grid& grid, double value);
    static ScalarField sample(const Grid& grid, const std::function<double(const Point&)>& f);

    const Grid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double sup_norm() const noexcept { return sup_norm_; }

    /// Discrete L2 norm with cell weight h^d.
    double l2_norm() const;

private:
    Grid grid_;
    std::vector<double> values_;
    double sup_norm_;
};

/// Discrete inner product sum(u*v)*h^d; throws DimensionError on grid mismatch.
double inner(const ScalarField& u, const ScalarField& v);

void require_same_grid(const Grid& a, const Grid& b, const char* what);

double norm(const Point& x, int dim) noexcept;
double distance(const Point& x, const Point& y, int dim) noexcept;

}  // namespace ucplab
