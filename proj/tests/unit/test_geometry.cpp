#include "ucplab/error.hpp"
#include "ucplab/geometry.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

using namespace ucplab;

namespace {

bool has_failed(const HypothesisReport& r, const std::string& name) {
    return std::find(r.failed_clauses.begin(), r.failed_clauses.end(), name) != r.failed_clauses.end();
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("periodic arrangement centres") {
    const Domain dom(1, 3.0, Boundary::Dirichlet);
    const auto arr = make_arrangement(dom, 0.3, arrangement::Periodic{});
    REQUIRE(arr.size() == 3);
    CHECK(arr.centers()[0][0] == -1.0);
    CHECK(arr.centers()[1][0] == 0.0);
    CHECK(arr.centers()[2][0] == 1.0);
    for (double o : arr.offsets()) CHECK(o == 0.0);
}

TEST_CASE("containment is enforced") {
    const Domain one(1, 1.0, Boundary::Dirichlet);
    CHECK_THROWS_WITH_AS(make_arrangement(one, 0.2, arrangement::Explicit{{Point{0.4, 0, 0}}}),
                         doctest::Contains("j=(0)"), InvalidArgument);
    CHECK_NOTHROW(make_arrangement(one, 0.2, arrangement::Explicit{{Point{0.3, 0, 0}}}));
    CHECK_THROWS_WITH(make_arrangement(one, 0.6, arrangement::Periodic{}), "delta must be in (0, 1/2)");
    CHECK_THROWS_AS(make_arrangement(one, 0.2, arrangement::Explicit{{}}), DimensionError);
    CHECK_THROWS_AS(make_arrangement(Domain(1, 0.5, Boundary::Dirichlet), 0.2, arrangement::Periodic{}),
                    InvalidArgument);
}

TEST_CASE("property: every generated arrangement passes the re-check") {
    const Domain dom(2, 4.0, Boundary::Periodic);
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const auto arr = make_arrangement(dom, 0.15, arrangement::Jitter{seed, 0.35});
        for (double o : arr.offsets()) CHECK(std::abs(o) <= 0.35);
        const auto again = arrangement_from_offsets(dom, 0.15, arr.offsets());
        CHECK(again.centers() == arr.centers());
    }
    CHECK_THROWS_AS(make_arrangement(dom, 0.15, arrangement::Jitter{0, 0.36}), InvalidArgument);
}

TEST_CASE("indicator weights") {
    const Domain dom(1, 3.0, Boundary::Dirichlet);
    const Grid g(dom, 299);
    const auto arr = make_arrangement(dom, 0.2, arrangement::Periodic{});
    const auto w = indicator(arr, g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double x = g.node(k)[0];
        const double d = std::abs(x - std::round(x));
        if (d + 0.5 * g.spacing() < 0.2) CHECK(w[k] == 1.0);
        if (d - 0.5 * g.spacing() > 0.2) CHECK(w[k] == 0.0);
    }
    CHECK(w.mass() == doctest::Approx(1.2).epsilon(1e-2));
}

TEST_CASE("property: indicator mass converges at first order or better") {
    const Domain dom(2, 3.0, Boundary::Dirichlet);
    const auto arr = make_arrangement(dom, 0.2, arrangement::Jitter{4, 0.2});
    const double exact = 9.0 * std::numbers::pi * 0.04;
    double prev = INFINITY;
    for (int n : {29, 59, 119}) {
        const Grid g(dom, n);
        const double err = std::abs(indicator(arr, g, 4).mass() - exact);
        CHECK(err <= 3.0 * g.spacing() * exact);
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("property: integration is monotone in the weight") {
    const Domain dom(2, 2.0, Boundary::Periodic);
    const Grid g(dom, 40);
    const auto psi = ScalarField::sample(g, [](const Point& x) { return std::sin(3 * x[0]) + x[1]; });
    const auto small = indicator(Ball{{0.1, 0.1, 0}, 0.3}, g), big = indicator(Ball{{0.1, 0.1, 0}, 0.6}, g);
    for (std::size_t k = 0; k < g.size(); ++k) REQUIRE(small[k] <= big[k]);
    CHECK(integrate(psi, small) <= integrate(psi, big));
    CHECK(integrate(psi, big) <= integrate(psi));
}

TEST_CASE("integrals of simple fields") {
    const Domain dom(1, 3.0, Boundary::Periodic);
    const Grid g(dom, 300);
    CHECK(integrate(ScalarField::constant(g, 1.0)) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(integrate(ScalarField::zeros(g), IndicatorField::whole(g)) == 0.0);

    const Domain unit(1, 1.0, Boundary::Periodic);
    const Grid fine(unit, 20000);
    const auto x = ScalarField::sample(fine, [](const Point& p) { return p[0] + 0.5; });
    const auto w = indicator(Box{{-0.5, 0, 0}, {0.0, 0, 0}}, fine);
    CHECK(integrate(x, w) == doctest::Approx(1.0 / 24.0).epsilon(1e-8));
}

TEST_CASE("regions") {
    const Region b = Ball{{0, 0, 0}, 1.0};
    const Region box = Box{{-1, -2, 0}, {1, 2, 0}};
    CHECK(diameter(b, 2) == 2.0);
    CHECK(diameter(box, 2) == doctest::Approx(std::sqrt(20.0)));
    CHECK(distance(Point{3, 0, 0}, b, 2) == doctest::Approx(2.0));
    CHECK(distance(Point{2, 3, 0}, box, 2) == doctest::Approx(std::sqrt(2.0)));
    CHECK(distance(Point{0.5, 1, 0}, box, 2) == 0.0);
    CHECK(is_subset(b, box, 2));
    CHECK_FALSE(is_subset(box, b, 2));
    CHECK(is_subset(Ball{{0.5, 0, 0}, 0.5}, b, 2));
}

TEST_CASE("Schrodinger hypothesis example") {
    const auto geo = [](double y) {
        return QUCGeometry{{0, 0, 0}, 1.0, 0.0, 0.5, Ball{{y, 0, 0}, 0.1}, Ball{{0, 0, 0}, 14.5}};
    };
    const auto pass = check_quc_hypotheses(geo(1.2), quc::Schrodinger{}, 2);
    CHECK(pass.holds);
    CHECK(pass.failed_clauses.empty());
    const auto fail = check_quc_hypotheses(geo(0.9), quc::Schrodinger{}, 2);
    CHECK_FALSE(fail.holds);
    CHECK(has_failed(fail, "2R <= 2 dist(x, Theta)"));
    CHECK(fail.failed_clauses.size() == 1);
}

TEST_CASE("elliptic hypothesis example") {
    QUCGeometry geo{{0, 0, 0}, 1.0, 5.0, 0.5, Ball{{1.2, 0, 0}, 0.1}, Ball{{0, 0, 0}, 30.0}};
    const auto ok = check_quc_hypotheses(geo, quc::Elliptic{{22.0, 1.0, 0.0}, 0.05, nullptr}, 2);
    CHECK(ok.holds);
    CHECK(ok.c3 == doctest::Approx(0.05 * std::numbers::e).epsilon(1e-15));
    const auto bad = check_quc_hypotheses(geo, quc::Elliptic{{22.0, 1.0, 0.0}, 0.1, nullptr}, 2);
    CHECK(has_failed(bad, "theta1 * C3 < 1/(4R)"));
    geo.D0 = 6.0;
    CHECK(has_failed(check_quc_hypotheses(geo, quc::Elliptic{{24.0, 1.0, 0.0}, 0.05, nullptr}, 2), "D0 < 6R"));
}

TEST_CASE("arrangement CSV") {
    const Domain dom(2, 3.0, Boundary::Dirichlet);
    std::ostringstream out;
    write_arrangement_csv(out, make_arrangement(dom, 0.1, arrangement::Periodic{}));
    const std::string s = out.str();
    CHECK(std::count(s.begin(), s.end(), '\n') == 10);
    CHECK(s.rfind("j0,j1,x0,x1", 0) == 0);
}

}  // TEST_SUITE
