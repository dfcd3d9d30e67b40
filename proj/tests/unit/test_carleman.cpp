#include "oracles.hpp"

#include "ucplab/carleman.hpp"
#include "ucplab/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace ucplab;

namespace {

std::vector<Point> ball_points(int dim, std::size_t count, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Point> out;
    while (out.size() < count) {
        Point x{0, 0, 0};
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a) {
            x[a] = u(rng);
            r2 += x[a] * x[a];
        }
        if (r2 <= 1.0) out.push_back(x);
    }
    return out;
}

struct Fixture {
    Grid grid;
    DiscreteOperator op;
};

Fixture periodic_disc(int n) {
    const Domain dom(2, 2.0, Boundary::Periodic);
    const Grid g(dom, n);
    return {g, build_schrodinger(dom, n, ScalarField::zeros(g))};
}

}  // namespace

TEST_SUITE("carleman") {

TEST_CASE("sigma") {
    const auto id = CarlemanWeight::identity(2, 1.0);
    CHECK(id.sigma({0.3, 0.4, 0}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(id.sigma({0, 0, 0}) == 0.0);
    Eigen::MatrixXd a(2, 2);
    a << 4, 0, 0, 1;
    const CarlemanWeight w(1.0, a);
    CHECK(w.sigma({1, 0, 0}) == doctest::Approx(2.0).epsilon(1e-15));
    const Point x{0.2, -0.7, 0};
    CHECK(w.sigma({0.4, -1.4, 0}) == doctest::Approx(2.0 * w.sigma(x)).epsilon(1e-15));
    Eigen::MatrixXd bad(2, 2);
    bad << 1, 2, 2, 1;
    CHECK_THROWS_AS(CarlemanWeight(1.0, bad), InvalidArgument);
    CHECK_THROWS_AS(CarlemanWeight(0.0, Eigen::MatrixXd::Identity(2, 2)), InvalidArgument);
}

TEST_CASE("psi against the series oracle") {
    for (double mu : {0.05, 1.0, 3.0}) {
        const auto w = CarlemanWeight::identity(1, mu);
        for (double s : {0.0, 1e-6, 1e-3, 0.2, 0.5, 1.0, 1.7, 3.9, 6.0}) {
            CHECK(w.exponent_integral(s) == doctest::Approx(oracle::ein(mu * s)).epsilon(1e-12).scale(1e-12));
            CHECK(w.psi(s) == doctest::Approx(oracle::carleman_psi(mu, s)).epsilon(1e-10).scale(1e-12));
        }
    }
    const auto w = CarlemanWeight::identity(2, 1.0);
    CHECK(w.exponent_integral(0.5) == doctest::Approx(0.4438).epsilon(1e-4));
    CHECK(w.psi(0.5) == doctest::Approx(0.3208).epsilon(1e-4));
    CHECK(w.psi(0.0) == 0.0);
    CHECK(w.psi(1e-9) / 1e-9 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(w.c3() == std::numbers::e * 1.0);
    CHECK_THROWS_AS(w.psi(-0.1), DomainError);
    CHECK_THROWS_AS(carleman_exponent_integral(1.0, -1.0), DomainError);
}

TEST_CASE("property: psi increasing and below the identity") {
    const auto w = CarlemanWeight::identity(1, 1.0);
    double prev = -1.0;
    for (int i = 0; i <= 400; ++i) {
        const double s = 2.0 * i / 400;
        const double p = w.psi(s);
        CHECK(p > prev);
        CHECK(p <= s);
        prev = p;
    }
}

TEST_CASE("weight bounds") {
    const auto w = CarlemanWeight::identity(2, 1.0);
    const auto half = check_weight_bounds(w, 1.0, {Point{0.5, 0, 0}, Point{0, 0, 0}});
    CHECK(half.violations == 0);
    CHECK(half.points == 2);
    const auto batch = check_weight_bounds(w, 1.0, ball_points(2, 10000, 1));
    CHECK(batch.violations == 0);
    CHECK(batch.margin >= 0.0);
    CHECK_THROWS_AS(check_weight_bounds(w, 1.0, {Point{1.1, 0, 0}}), InvalidArgument);
    // A large mu breaks the lower bound |x| / (e mu).
    CHECK(check_weight_bounds(CarlemanWeight::identity(2, 0.01), 1.0, ball_points(2, 100, 2)).violations > 0);
}

TEST_CASE("property: no violations for slowly varying coefficients under assumption A") {
    const Domain dom(2, 2.0, Boundary::Periodic);
    const Grid g(dom, 40);
    const auto a = CoefficientField::sample(g, [](const Point& x) {
        Eigen::MatrixXd m(2, 2);
        m << 1.2 + 0.1 * std::sin(x[0]), 0.05, 0.05, 0.9 + 0.1 * std::cos(x[1]);
        return m;
    });
    const double theta1 = 1.5;
    REQUIRE(check_assumption_a(a, {1.0, theta1, 1.0}).holds);
    const auto w = CarlemanWeight::from_coefficients(a, 1.0);
    CHECK(check_weight_bounds(w, theta1, ball_points(2, 5000, 4)).violations == 0);
}

TEST_CASE("functionals: zero field, scaling, support") {
    const auto fx = periodic_disc(64);
    const auto w = CarlemanWeight::identity(2, 1.0);
    const auto zero = carleman_functionals(w, fx.op, ScalarField::zeros(fx.grid), 4.0);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == 0.0);
    CHECK(zero.ratio == 0.0);

    const auto f = annulus_bump(fx.grid, 0.5, 0.2, 4.0);
    std::vector<double> twice(f.values().begin(), f.values().end());
    for (auto& v : twice) v *= 2.0;
    const auto r1 = carleman_functionals(w, fx.op, f, 6.0);
    const auto r2 = carleman_functionals(w, fx.op, ScalarField(fx.grid, twice), 6.0);
    CHECK(std::isfinite(r1.ratio));
    CHECK(r1.ratio > 0.0);
    CHECK(r2.ratio == doctest::Approx(r1.ratio).epsilon(1e-13));
    CHECK(r1.lhs_grad >= 0.0);
    CHECK(r1.lhs_cube >= 0.0);
    CHECK(r1.rhs >= 0.0);

    CHECK_THROWS_WITH_AS(carleman_functionals(w, fx.op, annulus_bump(fx.grid, 0.2, 0.2, 4.0), 4.0),
                         doctest::Contains("node"), InvalidArgument);
    CHECK_THROWS_AS(carleman_functionals(w, fx.op, annulus_bump(fx.grid, 0.85, 0.2, 4.0), 4.0), InvalidArgument);
    const Domain small(2, 1.5, Boundary::Periodic);
    const Grid gs(small, 30);
    CHECK_THROWS_AS(carleman_functionals(w, build_schrodinger(small, 30, ScalarField::zeros(gs)),
                                         ScalarField::zeros(gs), 4.0),
                    CoverageError);
}

TEST_CASE("large alpha stays finite through log accumulation") {
    const auto fx = periodic_disc(64);
    const auto r = carleman_functionals(CarlemanWeight::identity(2, 1.0), fx.op, annulus_bump(fx.grid, 0.5, 0.2, 4.0), 400.0);
    CHECK(std::isfinite(r.log_lhs));
    CHECK(std::isfinite(r.log_rhs));
    CHECK(std::isfinite(r.ratio));
    CHECK(r.ratio == doctest::Approx(std::exp(r.log_lhs - r.log_rhs)).epsilon(1e-12));
}

TEST_CASE("single annulus refinement") {
    const auto w = CarlemanWeight::identity(2, 1.0);
    const auto c = periodic_disc(128), f = periodic_disc(256);
    const double rc = carleman_functionals(w, c.op, annulus_bump(c.grid, 0.5, 0.2, 4.0), 4.0).ratio;
    const double rf = carleman_functionals(w, f.op, annulus_bump(f.grid, 0.5, 0.2, 4.0), 4.0).ratio;
    CHECK(std::abs(rc - rf) / rf <= 0.01);
}

TEST_CASE("C2 estimate") {
    const auto fx = periodic_disc(64);
    const auto w = CarlemanWeight::identity(2, 1.0);
    const std::vector<ScalarField> one{annulus_bump(fx.grid, 0.5, 0.2, 4.0)};
    const auto single = estimate_C2(w, fx.op, one, {4.0});
    CHECK(single.sup_ratio == carleman_functionals(w, fx.op, one[0], 4.0).ratio);

    std::vector<ScalarField> fam = one;
    const auto base = estimate_C2(w, fx.op, fam, {3.0, 8.0, 15.0}, {}, 2);
    fam.push_back(annulus_bump(fx.grid, 0.35, 0.2, 4.0));
    const auto doubled = estimate_C2(w, fx.op, fam, {3.0, 8.0, 15.0}, {}, 2);
    CHECK(doubled.sup_ratio >= base.sup_ratio);
    CHECK(doubled.per_alpha.size() == 6);
    CHECK(doubled.per_alpha[3].field == 1);
    CHECK(doubled.per_alpha[3].values.alpha == 3.0);
    const auto serial = estimate_C2(w, fx.op, fam, {3.0, 8.0, 15.0}, {}, 1);
    CHECK(serial.sup_ratio == doubled.sup_ratio);
    CHECK_THROWS_AS(estimate_C2(w, fx.op, {}, {4.0}), InvalidArgument);

    std::ostringstream out;
    write_c2_csv(out, doubled);
    CHECK(out.str().rfind("field,alpha,lhs_grad,lhs_cube,rhs,ratio\n", 0) == 0);
}

TEST_CASE("annulus bumps") {
    const auto fx = periodic_disc(64);
    const auto smooth = annulus_bump(fx.grid, 0.5, 0.2);
    const auto poly = annulus_bump(fx.grid, 0.5, 0.2, 2.0);
    for (std::size_t k = 0; k < fx.grid.size(); ++k) {
        const Point x = fx.grid.node(k);
        const double u = (std::hypot(x[0], x[1]) - 0.5) / 0.2;
        if (std::abs(u) >= 1.0) {
            CHECK(smooth[k] == 0.0);
            CHECK(poly[k] == 0.0);
        } else {
            CHECK(poly[k] == doctest::Approx((1 - u * u) * (1 - u * u)).epsilon(1e-14));
            CHECK(smooth[k] == doctest::Approx(std::exp(1.0 - 1.0 / (1.0 - u * u))).epsilon(1e-14));
        }
    }
}

}  // TEST_SUITE
