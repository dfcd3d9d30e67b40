#include "ucplab/error.hpp"
#include "ucplab/extension.hpp"
#include "ucplab/fields.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace ucplab;

namespace {

struct Setup {
    SpectralBasis basis;
    ScalarField potential;
};

Setup setup(int n, double K, double E, std::uint64_t seed) {
    const Domain dom(1, 3.0, Boundary::Dirichlet);
    const Grid g(dom, n);
    // Cell-constant potential: the same function at every resolution.
    auto v = random_cell_potential(g, K, seed);
    return {spectrum_below(build_schrodinger(dom, n, v), EnergyWindow::below(E)), v};
}

}  // namespace

TEST_SUITE("extension") {

TEST_CASE("case functions") {
    CHECK(s_case(0.0, 0.7) == 0.7);
    CHECK(s_case(4.0, 1.0) == doctest::Approx(std::sinh(2.0) / 2.0).epsilon(1e-15));
    CHECK(s_case(4.0, 1.0) == doctest::Approx(1.813430).epsilon(1e-6));
    CHECK(s_case(-4.0, std::numbers::pi / 4) == doctest::Approx(0.5).epsilon(1e-15));
    for (double y : {0.3, 1.0, 2.0}) {
        // Series: s(E, y) = y + E y^3 / 6 + O(E^2)
        CHECK(std::abs(s_case(1e-8, y) - (y + 1e-8 * y * y * y / 6)) <= 1e-12);
        CHECK(std::abs(s_case(-1e-8, y) - (y - 1e-8 * y * y * y / 6)) <= 1e-12);
        CHECK(std::abs(s_case(1e-8, y) - y) <= 1e-8 * y * y * y);
    }
}

TEST_CASE("property: odd in y, unit slope at y = 0") {
    for (double e : {-9.0, -1e-7, 0.0, 1e-7, 2.5, 30.0}) {
        for (double y : {0.1, 0.5, 1.3}) CHECK(s_case(e, -y) == -s_case(e, y));
        const double h = 1e-6;
        CHECK((s_case(e, h) - s_case(e, -h)) / (2 * h) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("single mode extension is the product") {
    const auto s = setup(199, 0.0, 3.0, 0);
    REQUIRE(s.basis.size() == 1);
    const auto ext = build_extension(s.basis, s.basis.mode(0), 1.0, 50);
    REQUIRE(ext.y.size() == 101);
    const double e = s.basis.energy(0);
    for (std::size_t m = 0; m < ext.y.size(); m += 10) {
        const auto sl = ext.slice(m);
        for (std::size_t k = 0; k < sl.size(); k += 17) {
            CHECK(sl[k] == doctest::Approx(s.basis.mode(0)[k] * std::sinh(std::sqrt(e) * ext.y[m]) / std::sqrt(e))
                               .epsilon(1e-13)
                               .scale(1e-14));
        }
    }
    CHECK(ext.slice(ext.zero_slice()).sup_norm() == 0.0);
}

TEST_CASE("orthogonal datum gives the zero extension") {
    const auto s = setup(199, 0.0, 3.0, 0);
    const auto full = setup(199, 0.0, 60.0, 0);
    const auto ext = build_extension(s.basis, full.basis.mode(2));
    CHECK(ext.values.cwiseAbs().maxCoeff() < 1e-12);
    const auto none = build_extension(s.basis, ScalarField::zeros(s.potential.grid()));
    CHECK(none.values.cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(residual(none, s.potential), InvalidArgument);
}

TEST_CASE("property: residual is second order under refinement") {
    double prev_l2 = 0.0, prev_b = 0.0;
    for (int level = 0; level < 3; ++level) {
        const int n = 60 * (1 << level) - 1;
        const auto s = setup(n, 1.0, 10.0, 5);
        REQUIRE(s.basis.size() >= 2);
        std::vector<double> ones(s.basis.size(), 1.0);
        const auto psi = synthesize(s.basis, ones);
        const auto ext = build_extension(s.basis, psi, 1.0, 0);
        const auto r = residual(ext, s.potential);
        CHECK(r.boundary_error <= 1e-6 + 10.0 * ext.hy * ext.hy);
        if (level > 0) {
            const double f = prev_l2 / r.l2_residual;
            CHECK(f >= 3.0);
            CHECK(f <= 5.0);
            CHECK(r.boundary_error < prev_b);
        }
        prev_l2 = r.l2_residual;
        prev_b = r.boundary_error;
    }
}

TEST_CASE("Neumann datum and warnings") {
    const auto s = setup(199, 1.0, 60.0, 2);
    const auto psi = random_in_range(s.basis, 4);
    const auto ext = build_extension(s.basis, psi, 1.0, 0);
    CHECK_FALSE(ext.warnings.empty());
    for (std::size_t k = 0; k < psi.size(); ++k) CHECK(ext.boundary_target[k] == doctest::Approx(psi[k]).scale(1.0));
    const auto quiet = build_extension(setup(199, 0.0, 3.0, 0).basis, setup(199, 0.0, 3.0, 0).basis.mode(0), 1.0, 0);
    CHECK(quiet.warnings.empty());
    CHECK_THROWS_AS(build_extension(setup(199, 0.0, 1.0, 0).basis, psi), InvalidArgument);
}

TEST_CASE("CSV slices") {
    const auto s = setup(9, 0.0, 30.0, 0);
    const auto ext = build_extension(s.basis, s.basis.mode(0), 1.0, 2);
    std::ostringstream out;
    write_extension_csv(out, ext, {ext.zero_slice()});
    const std::string t = out.str();
    CHECK(t.rfind("m,i0,y,F\n", 0) == 0);
    CHECK(std::count(t.begin(), t.end(), '\n') == 10);
}

}  // TEST_SUITE
