#include "ucplab/grid.hpp"

#include "ucplab/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ucplab {

const char* to_string(Boundary bc) {
    return bc == Boundary::Dirichlet ? "dirichlet" : "periodic";
}

Boundary boundary_from_string(const std::string& name) {
    if (name == "dirichlet" || name == "Dirichlet") return Boundary::Dirichlet;
    if (name == "periodic" || name == "Periodic") return Boundary::Periodic;
    throw InvalidArgument("bc must be 'dirichlet' or 'periodic', got '" + name + "'");
}

Domain::Domain(int dim, double length, Boundary bc) : dim_(dim), length_(length), bc_(bc) {
    if (dim < 1 || dim > kMaxDim) throw InvalidArgument("dimension must be 1, 2 or 3");
    if (!(length > 0.0) || !std::isfinite(length)) throw InvalidArgument("side length L must be > 0");
}

bool Domain::contains(const Point& x, double slack) const {
    for (int i = 0; i < dim_; ++i) {
        if (std::abs(x[i]) > half_length() + slack) return false;
    }
    return true;
}

Grid::Grid(Domain domain, int n) : domain_(domain), n_(n) {
    if (n < 2) throw InvalidArgument("grid needs n >= 2 points per axis");
    h_ = domain_.boundary() == Boundary::Dirichlet ? domain_.length() / (n + 1) : domain_.length() / n;
    size_ = 1;
    cell_volume_ = 1.0;
    for (int i = 0; i < domain_.dim(); ++i) {
        size_ *= static_cast<std::size_t>(n_);
        cell_volume_ *= h_;
    }
}

double Grid::coordinate(int i) const noexcept {
    const double offset = domain_.boundary() == Boundary::Dirichlet ? i + 1.0 : i + 0.5;
    return -domain_.half_length() + offset * h_;
}

MultiIndex Grid::multi_index(std::size_t flat) const noexcept {
    MultiIndex idx{0, 0, 0};
    for (int a = 0; a < dim(); ++a) {
        idx[a] = static_cast<int>(flat % n_);
        flat /= n_;
    }
    return idx;
}

std::size_t Grid::flat_index(const MultiIndex& idx) const noexcept {
    std::size_t flat = 0;
    for (int a = dim() - 1; a >= 0; --a) flat = flat * n_ + idx[a];
    return flat;
}

Point Grid::node(std::size_t flat) const noexcept {
    const MultiIndex idx = multi_index(flat);
    Point x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim(); ++a) x[a] = coordinate(idx[a]);
    return x;
}

namespace {
double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}
}  // namespace

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw DimensionError("field has " + std::to_string(values_.size()) + " values, grid has " +
                             std::to_string(grid_.size()) + " nodes");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw InvalidArgument("field values must be finite");
    }
    sup_norm_ = max_abs(values_);
}

ScalarField ScalarField::zeros(const Grid& grid) { return constant(grid, 0.0); }

ScalarField ScalarField::constant(const Grid& grid, double value) {
    return ScalarField(grid, std::vector<double>(grid.size(), value));
}

ScalarField ScalarField::sample(const Grid& grid, const std::function<double(const Point&)>& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.node(i));
    return ScalarField(grid, std::move(v));
}

double ScalarField::l2_norm() const { return std::sqrt(inner(*this, *this)); }

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) throw DimensionError(std::string(what) + ": grids differ");
}

double inner(const ScalarField& u, const ScalarField& v) {
    require_same_grid(u.grid(), v.grid(), "inner product");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s * u.grid().cell_volume();
}

double norm(const Point& x, int dim) noexcept {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += x[i] * x[i];
    return std::sqrt(s);
}

double distance(const Point& x, const Point& y, int dim) noexcept {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(s);
}

}  // namespace ucplab
