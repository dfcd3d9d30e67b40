#include "ucplab/fields.hpp"

#include "ucplab/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <string>

namespace ucplab {

ScalarField sinusoidal_field(const Grid& grid, double amplitude, double wavenumber, double offset) {
    const int d = grid.dim();
    return ScalarField::sample(grid, [=](const Point& x) {
        double p = 1.0;
        for (int i = 0; i < d; ++i) p *= std::sin(wavenumber * x[i]);
        return offset + amplitude * p;
    });
}

ScalarField random_potential(const Grid& grid, double bound, std::uint64_t seed) {
    if (!(bound >= 0.0)) throw InvalidArgument("potential bound K must be >= 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-bound, bound);
    std::vector<double> v(grid.size());
    for (double& x : v) x = bound > 0.0 ? u(rng) : 0.0;
    return ScalarField(grid, std::move(v));
}

std::vector<MultiIndex> unit_cell_sites(const Domain& domain) {
    // |j_i| + 1/2 <= L/2 along every axis.
    const int jmax = static_cast<int>(std::floor((domain.length() - 1.0) / 2.0 + 1e-12));
    std::vector<MultiIndex> sites;
    if (jmax < 0) return sites;
    const int w = 2 * jmax + 1;
    std::size_t total = 1;
    for (int a = 0; a < domain.dim(); ++a) total *= static_cast<std::size_t>(w);
    sites.reserve(total);
    for (std::size_t flat = 0; flat < total; ++flat) {
        MultiIndex j{0, 0, 0};
        std::size_t r = flat;
        for (int a = 0; a < domain.dim(); ++a) {
            j[a] = static_cast<int>(r % w) - jmax;
            r /= w;
        }
        sites.push_back(j);
    }
    return sites;
}

std::size_t nearest_cell(const Domain& domain, const Point& x) {
    const int jmax = static_cast<int>(std::floor((domain.length() - 1.0) / 2.0 + 1e-12));
    if (jmax < 0) throw InvalidArgument("cube holds no full unit cell");
    const int w = 2 * jmax + 1;
    std::size_t flat = 0;
    for (int a = domain.dim() - 1; a >= 0; --a) {
        int j = static_cast<int>(std::lround(x[a]));
        j = std::clamp(j, -jmax, jmax);
        flat = flat * w + static_cast<std::size_t>(j + jmax);
    }
    return flat;
}

ScalarField cell_potential(const Grid& grid, std::span<const double> values) {
    const auto sites = unit_cell_sites(grid.domain());
    if (values.size() != sites.size()) throw DimensionError("one potential value per unit cell is required");
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) v[k] = values[nearest_cell(grid.domain(), grid.node(k))];
    return ScalarField(grid, std::move(v));
}

ScalarField random_cell_potential(const Grid& grid, double bound, std::uint64_t seed) {
    if (!(bound >= 0.0)) throw InvalidArgument("potential bound K must be >= 0");
    const auto sites = unit_cell_sites(grid.domain());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-bound, bound);
    std::vector<double> cells(sites.size());
    for (double& c : cells) c = bound > 0.0 ? u(rng) : 0.0;
    return cell_potential(grid, cells);
}

void write_field_csv(std::ostream& out, const ScalarField& field) {
    const Grid& grid = field.grid();
    for (int a = 0; a < grid.dim(); ++a) out << 'i' << a << ',';
    out << "value\n";
    out << std::setprecision(17);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const MultiIndex idx = grid.multi_index(k);
        for (int a = 0; a < grid.dim(); ++a) out << idx[a] << ',';
        out << field[k] << '\n';
    }
}

namespace {

// Parses rows of `d` integer indices followed by `width` reals. Lines starting with '#'
// and a non-numeric header row are skipped.
std::vector<std::vector<double>> read_rows(std::istream& in, const Grid& grid, int width) {
    std::vector<std::vector<double>> rows(grid.size());
    std::vector<bool> seen(grid.size(), false);
    std::string line;
    std::size_t line_no = 0;
    std::size_t filled = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.empty()) continue;
        if (cells[0].find_first_not_of(" \t0123456789-+") != std::string::npos) continue;  // header
        if (static_cast<int>(cells.size()) != grid.dim() + width) {
            throw InvalidArgument("CSV line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(grid.dim() + width) + " columns");
        }
        MultiIndex idx{0, 0, 0};
        for (int a = 0; a < grid.dim(); ++a) {
            idx[a] = std::stoi(cells[a]);
            if (idx[a] < 0 || idx[a] >= grid.points_per_axis()) {
                throw DimensionError("CSV line " + std::to_string(line_no) + ": node index out of range");
            }
        }
        const std::size_t k = grid.flat_index(idx);
        std::vector<double> vals;
        for (int c = 0; c < width; ++c) vals.push_back(std::stod(cells[grid.dim() + c]));
        if (!seen[k]) ++filled;
        seen[k] = true;
        rows[k] = std::move(vals);
    }
    if (filled != grid.size()) {
        throw DimensionError("CSV covers " + std::to_string(filled) + " of " + std::to_string(grid.size()) +
                             " grid nodes");
    }
    return rows;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    return in;
}

}  // namespace

ScalarField read_field_csv(std::istream& in, const Grid& grid) {
    auto rows = read_rows(in, grid, 1);
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = rows[k][0];
    return ScalarField(grid, std::move(v));
}

ScalarField load_field_csv(const std::filesystem::path& path, const Grid& grid) {
    auto in = open_or_throw(path);
    return read_field_csv(in, grid);
}

CoefficientField read_coefficients_csv(std::istream& in, const Grid& grid) {
    const int d = grid.dim();
    auto rows = read_rows(in, grid, d * d);
    std::vector<double> entries;
    entries.reserve(grid.size() * d * d);
    std::size_t origin_node = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        entries.insert(entries.end(), rows[k].begin(), rows[k].end());
        const double r = norm(grid.node(k), d);
        if (r < best) {
            best = r;
            origin_node = k;
        }
    }
    Eigen::MatrixXd origin(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) origin(i, j) = rows[origin_node][i * d + j];
    return CoefficientField(grid, std::move(entries), origin);
}

CoefficientField load_coefficients_csv(const std::filesystem::path& path, const Grid& grid) {
    auto in = open_or_throw(path);
    return read_coefficients_csv(in, grid);
}

}  // namespace ucplab
