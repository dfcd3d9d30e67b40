#include "ucplab/geometry.hpp"

#include "ucplab/error.hpp"
#include "ucplab/fields.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace ucplab {

namespace {

constexpr double kSlack = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

int lattice_extent(const Domain& domain) {
    return static_cast<int>(std::floor((domain.length() - 1.0) / 2.0 + 1e-12));
}

double ball_volume(int dim, double r) {
    switch (dim) {
        case 1: return 2.0 * r;
        case 2: return std::numbers::pi * r * r;
        default: return 4.0 / 3.0 * std::numbers::pi * r * r * r;
    }
}

std::string site_name(const MultiIndex& j, int dim) {
    std::ostringstream os;
    os << '(';
    for (int a = 0; a < dim; ++a) os << (a ? "," : "") << j[a];
    os << ')';
    return os.str();
}

void require_delta(double delta) {
    if (!(delta > 0.0 && delta < 0.5)) throw InvalidArgument("delta must be in (0, 1/2)");
}

}  // namespace

double diameter(const Region& region, int dim) {
    return std::visit(overloaded{[](const Ball& b) { return 2.0 * b.radius; },
                                 [dim](const Box& b) { return distance(b.lo, b.hi, dim); }},
                      region);
}

double distance(const Point& x, const Region& region, int dim) {
    return std::visit(overloaded{[&](const Ball& b) { return std::max(0.0, distance(x, b.center, dim) - b.radius); },
                                 [&](const Box& b) {
                                     Point c = x;
                                     for (int i = 0; i < dim; ++i) c[i] = std::clamp(x[i], b.lo[i], b.hi[i]);
                                     return distance(x, c, dim);
                                 }},
                      region);
}

bool contains(const Region& region, const Point& x, int dim) {
    return std::visit(overloaded{[&](const Ball& b) { return distance(x, b.center, dim) < b.radius; },
                                 [&](const Box& b) {
                                     for (int i = 0; i < dim; ++i)
                                         if (x[i] < b.lo[i] || x[i] > b.hi[i]) return false;
                                     return true;
                                 }},
                      region);
}

bool is_subset(const Region& inner, const Region& outer, int dim) {
    return std::visit(
        overloaded{
            [&](const Ball& a, const Ball& b) { return distance(a.center, b.center, dim) + a.radius <= b.radius + kSlack; },
            [&](const Ball& a, const Box& b) {
                for (int i = 0; i < dim; ++i) {
                    if (a.center[i] - a.radius < b.lo[i] - kSlack || a.center[i] + a.radius > b.hi[i] + kSlack) return false;
                }
                return true;
            },
            [&](const Box& a, const Box& b) {
                for (int i = 0; i < dim; ++i) {
                    if (a.lo[i] < b.lo[i] - kSlack || a.hi[i] > b.hi[i] + kSlack) return false;
                }
                return true;
            },
            [&](const Box& a, const Ball& b) {
                double far = 0.0;
                for (int i = 0; i < dim; ++i) {
                    const double e = std::max(std::abs(a.lo[i] - b.center[i]), std::abs(a.hi[i] - b.center[i]));
                    far += e * e;
                }
                return std::sqrt(far) <= b.radius + kSlack;
            }},
        inner, outer);
}

BallArrangement::BallArrangement(Domain domain, double delta, std::vector<MultiIndex> sites, std::vector<Point> centers)
    : domain_(domain), delta_(delta), sites_(std::move(sites)), centers_(std::move(centers)),
      jmax_(lattice_extent(domain)) {
    require_delta(delta);
    if (sites_ != unit_cell_sites(domain_)) throw InvalidArgument("arrangement sites must be the unit-cell lattice");
    if (sites_.empty()) throw InvalidArgument("no unit cell fits inside the cube; need L >= 1");
    if (centers_.size() != sites_.size()) {
        throw DimensionError("arrangement needs one centre per unit cell (" + std::to_string(sites_.size()) + ")");
    }
    const double margin = 0.5 - delta_;
    for (std::size_t s = 0; s < sites_.size(); ++s) {
        for (int a = 0; a < domain_.dim(); ++a) {
            const double off = centers_[s][a] - sites_[s][a];
            if (!(std::abs(off) <= margin + kSlack)) {
                throw InvalidArgument("ball at site j=" + site_name(sites_[s], domain_.dim()) +
                                      " leaves its unit cell: |x_j - j|_inf must be <= 1/2 - delta");
            }
        }
    }
}

std::vector<double> BallArrangement::offsets() const {
    std::vector<double> out;
    out.reserve(size() * domain_.dim());
    for (std::size_t s = 0; s < sites_.size(); ++s)
        for (int a = 0; a < domain_.dim(); ++a) out.push_back(centers_[s][a] - sites_[s][a]);
    return out;
}

std::optional<Point> BallArrangement::ball_for(const Point& x) const {
    if (jmax_ < 0) return std::nullopt;
    const int w = 2 * jmax_ + 1;
    std::size_t flat = 0;
    for (int a = domain_.dim() - 1; a >= 0; --a) {
        const int j = static_cast<int>(std::lround(x[a]));
        if (j < -jmax_ || j > jmax_) return std::nullopt;
        flat = flat * w + static_cast<std::size_t>(j + jmax_);
    }
    return centers_[flat];
}

double BallArrangement::measure_estimate() const {
    return static_cast<double>(size()) * ball_volume(domain_.dim(), delta_);
}

BallArrangement make_arrangement(const Domain& domain, double delta, const arrangement::Mode& mode) {
    require_delta(delta);
    auto sites = unit_cell_sites(domain);
    std::vector<Point> centers(sites.size());
    for (std::size_t s = 0; s < sites.size(); ++s)
        for (int a = 0; a < domain.dim(); ++a) centers[s][a] = sites[s][a];

    std::visit(overloaded{[](const arrangement::Periodic&) {},
                          [&](const arrangement::Jitter& j) {
                              if (!(j.amplitude >= 0.0 && j.amplitude <= 0.5 - delta + kSlack)) {
                                  throw InvalidArgument("jitter amplitude must be in [0, 1/2 - delta]");
                              }
                              std::mt19937_64 rng(j.seed);
                              std::uniform_real_distribution<double> u(-j.amplitude, j.amplitude);
                              for (auto& c : centers)
                                  for (int a = 0; a < domain.dim(); ++a) c[a] += u(rng);
                          },
                          [&](const arrangement::Explicit& e) { centers = e.centers; }},
               mode);
    return BallArrangement(domain, delta, std::move(sites), std::move(centers));
}

BallArrangement arrangement_from_offsets(const Domain& domain, double delta, std::span<const double> offsets) {
    auto sites = unit_cell_sites(domain);
    const auto d = static_cast<std::size_t>(domain.dim());
    if (offsets.size() != sites.size() * d) throw DimensionError("expected d offsets per unit cell");
    std::vector<Point> centers(sites.size());
    for (std::size_t s = 0; s < sites.size(); ++s)
        for (std::size_t a = 0; a < d; ++a) centers[s][a] = sites[s][a] + offsets[s * d + a];
    return BallArrangement(domain, delta, std::move(sites), std::move(centers));
}

IndicatorField::IndicatorField(Grid grid, std::vector<double> weights) : grid_(grid), weights_(std::move(weights)) {
    if (weights_.size() != grid_.size()) throw DimensionError("indicator needs one weight per node");
    for (double w : weights_) {
        if (!(w >= 0.0 && w <= 1.0)) throw InvalidArgument("indicator weights must lie in [0, 1]");
    }
}

IndicatorField IndicatorField::whole(const Grid& grid) {
    return IndicatorField(grid, std::vector<double>(grid.size(), 1.0));
}

double IndicatorField::mass() const {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s * grid_.cell_volume();
}

namespace {

template <class Inside>
IndicatorField cell_fractions(const Grid& grid, int subsamples, Inside inside) {
    if (subsamples < 1) throw InvalidArgument("subsamples must be >= 1");
    const int d = grid.dim();
    const double h = grid.spacing();
    std::size_t per_cell = 1;
    for (int a = 0; a < d; ++a) per_cell *= static_cast<std::size_t>(subsamples);
    std::vector<double> offsets(static_cast<std::size_t>(subsamples));
    for (int m = 0; m < subsamples; ++m) offsets[m] = h * ((m + 0.5) / subsamples - 0.5);

    std::vector<double> w(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Point x = grid.node(k);
        std::size_t hits = 0;
        for (std::size_t s = 0; s < per_cell; ++s) {
            Point p = x;
            std::size_t r = s;
            for (int a = 0; a < d; ++a) {
                p[a] += offsets[r % subsamples];
                r /= subsamples;
            }
            if (inside(p)) ++hits;
        }
        w[k] = static_cast<double>(hits) / static_cast<double>(per_cell);
    }
    return IndicatorField(grid, std::move(w));
}

}  // namespace

IndicatorField indicator(const BallArrangement& arrangement, const Grid& grid, int subsamples) {
    if (!(grid.domain() == arrangement.domain())) throw DimensionError("indicator: grid and arrangement domains differ");
    const int d = grid.dim();
    const double delta = arrangement.delta();
    return cell_fractions(grid, subsamples, [&](const Point& p) {
        const auto c = arrangement.ball_for(p);
        return c && distance(p, *c, d) < delta;
    });
}

IndicatorField indicator(const Region& region, const Grid& grid, int subsamples) {
    const int d = grid.dim();
    return cell_fractions(grid, subsamples, [&](const Point& p) { return contains(region, p, d); });
}

double integrate(const ScalarField& field, const IndicatorField& weight) {
    require_same_grid(field.grid(), weight.grid(), "integrate");
    double s = 0.0;
    for (std::size_t k = 0; k < field.size(); ++k) s += field[k] * field[k] * weight[k];
    return s * field.grid().cell_volume();
}

double integrate(const ScalarField& field) {
    double s = 0.0;
    for (std::size_t k = 0; k < field.size(); ++k) s += field[k] * field[k];
    return s * field.grid().cell_volume();
}

void write_arrangement_csv(std::ostream& out, const BallArrangement& arrangement) {
    const int d = arrangement.domain().dim();
    for (int a = 0; a < d; ++a) out << "j" << a << ',';
    for (int a = 0; a < d; ++a) out << (a ? "," : "") << 'x' << a;
    out << '\n' << std::setprecision(17);
    for (std::size_t s = 0; s < arrangement.size(); ++s) {
        for (int a = 0; a < d; ++a) out << arrangement.sites()[s][a] << ',';
        for (int a = 0; a < d; ++a) out << (a ? "," : "") << arrangement.centers()[s][a];
        out << '\n';
    }
}

HypothesisReport check_quc_hypotheses(const QUCGeometry& geo, const quc::Variant& variant, int dim) {
    HypothesisReport report;
    auto clause = [&](std::string name, bool ok, double lhs, double rhs) {
        report.clauses.push_back({name, ok, lhs, rhs});
        if (!ok) {
            report.holds = false;
            report.failed_clauses.push_back(std::move(name));
        }
    };
    const double diam = diameter(geo.theta, dim);
    const double dist = distance(geo.x, geo.theta, dim);
    const double two_r = 2.0 * geo.R;

    clause("R > 0", geo.R > 0.0, geo.R, 0.0);
    clause("Theta subset G", is_subset(geo.theta, geo.G, dim), 0.0, 0.0);
    clause("diam Theta + dist(x, Theta) <= 2R", diam + dist <= two_r + kSlack, diam + dist, two_r);
    clause("2R <= 2 dist(x, Theta)", two_r <= 2.0 * dist + kSlack, two_r, 2.0 * dist);

    std::visit(overloaded{[&](const quc::Schrodinger&) {
                              clause("delta < 4R", geo.delta < 4.0 * geo.R, geo.delta, 4.0 * geo.R);
                              const double r = 14.0 * geo.R;
                              clause("B(x, 14R) subset G", is_subset(Ball{geo.x, r}, geo.G, dim), r, 0.0);
                          },
                          [&](const quc::Elliptic& e) {
                              report.c3 = std::numbers::e * e.mu;
                              const double r = 12.0 * geo.R + 2.0 * geo.D0;
                              clause("delta in (0, 4R]", geo.delta > 0.0 && geo.delta <= 4.0 * geo.R + kSlack,
                                     geo.delta, 4.0 * geo.R);
                              clause("D0 < 6R", geo.D0 < 6.0 * geo.R, geo.D0, 6.0 * geo.R);
                              clause("B(x, 12R + 2 D0) subset G", is_subset(Ball{geo.x, r}, geo.G, dim), r, 0.0);
                              clause("theta1 * C3 < 1/(4R)", e.params.theta1 * report.c3 < 1.0 / (4.0 * geo.R),
                                     e.params.theta1 * report.c3, 1.0 / (4.0 * geo.R));
                              if (e.coefficients) {
                                  const auto a = check_assumption_a(
                                      *e.coefficients, EllipticityParams{r, e.params.theta1, e.params.theta2});
                                  clause("A(12R + 2 D0, theta1, theta2)", a.holds, a.worst_ellipticity,
                                         e.params.theta1);
                              }
                          }},
               variant);
    return report;
}

}  // namespace ucplab
