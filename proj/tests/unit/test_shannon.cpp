#include "oracles.hpp"

#include "ucplab/error.hpp"
#include "ucplab/quadrature.hpp"
#include "ucplab/shannon.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace ucplab;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return x;
}

double sup_error(const RealFunction& f, const SamplingProblem& p, const std::vector<double>& xs) {
    double e = 0.0;
    for (double x : xs) e = std::max(e, std::abs(f(x) - reconstruct(p, x)));
    return e;
}

const RealFunction gaussian = [](double x) { return std::exp(-0.5 * x * x); };
const RealFunction gaussian_hat = [](double p) { return std::exp(-0.5 * p * p); };

}  // namespace

TEST_SUITE("shannon") {

TEST_CASE("sinc") {
    CHECK(sinc(0.0) == 1.0);
    CHECK(std::abs(sinc(3.0)) < 1e-16);
    CHECK(sinc(0.5) == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-15));
}

TEST_CASE("a single sinc reconstructs itself") {
    for (double K : {1.0, 2.5}) {
        const RealFunction f = [K](double x) { return sinc(K * x); };
        const auto p = make_sampling_problem(f, K, 50);
        for (double x : linspace(-3.0, 3.0, 301)) CHECK(std::abs(reconstruct(p, x) - f(x)) <= 1e-14);
    }
}

TEST_CASE("property: interpolation at the nodes") {
    const auto p = make_sampling_problem(gaussian, 2.0, 40);
    for (int j = -40; j <= 40; ++j) CHECK(reconstruct(p, j / 2.0) == gaussian(j / 2.0));
    CHECK(reconstruct(p, 41 / 2.0) == 0.0);
}

TEST_CASE("property: sinc spans are reconstructed exactly") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> shift(-40, 40);
    std::normal_distribution<double> coef;
    const auto xs = linspace(-2.0, 2.0, 801);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 1 + trial * 49 / 19;
        std::vector<double> s, c;
        for (int i = 0; i < m; ++i) {
            s.push_back(shift(rng));
            c.push_back(coef(rng));
        }
        const double K = 1.0 + 0.25 * (trial % 4);
        const auto f = sinc_span(K, s, c);
        CHECK(sup_error(f, make_sampling_problem(f, K, 200), xs) <= 1e-8);
    }
    const auto two = sinc_span(1.0, {-2.0, 3.0}, {1.0, 0.5});
    CHECK(sup_error(two, make_sampling_problem(two, 1.0, 200), xs) <= 1e-8);
}

TEST_CASE("aliasing bound") {
    for (double K : {1.0, 2.0, 4.0, 0.3}) {
        const auto b = aliasing_bound(gaussian_hat, K);
        CHECK(b.value == doctest::Approx(oracle::gaussian_aliasing_bound(K)).epsilon(1e-10).scale(1e-300));
    }
    CHECK(aliasing_bound(gaussian_hat, 2.0).value < aliasing_bound(gaussian_hat, 1.0).value);
    CHECK(aliasing_bound([](double) { return 0.0; }, 1.0).value == 0.0);
    CHECK(aliasing_bound([](double p) { return std::abs(p) < 3.0 ? 1.0 : 0.0; }, 1.0).value == 0.0);
    CHECK_THROWS_AS(aliasing_bound([](double p) { return 1.0 / (1.0 + std::abs(p)); }, 1.0), ConvergenceError);
    CHECK_THROWS_AS(aliasing_bound(gaussian_hat, 0.0), InvalidArgument);

    // Tabulated tail: trapezoid of a linear |fhat| is exact.
    const std::vector<double> p{-6.0, -4.0, 0.0, 4.0, 6.0};
    const std::vector<double> v{0.0, 1.0, 2.0, 1.0, 0.0};
    const double a = std::numbers::pi;
    // |fhat| on [pi, 4] is 2 - p/4; the [4, 6] triangle has area 1.
    const double right = (2.0 * (4.0 - a) - (16.0 - a * a) / 8.0) + 1.0;
    CHECK(aliasing_bound(p, v, 1.0) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi) * 2.0 * right).epsilon(1e-14));
}

TEST_CASE("Gaussian aliasing verdicts") {
    const auto xs = linspace(-2.0, 2.0, 401);
    for (double K : {1.0, 2.0, 4.0}) {
        const auto rep = verify_aliasing(gaussian, gaussian_hat, K, xs, 200);
        CHECK(rep.verdict == Verdict::Holds);
        CHECK(rep.sup_error <= rep.bound + rep.truncation_allowance);
    }
    AliasingOptions capped;
    capped.J_ceiling = 3;
    const auto under = verify_aliasing(gaussian, gaussian_hat, 1.0, xs, 3, capped);
    CHECK(under.verdict == Verdict::Inconclusive);
    CHECK_FALSE(under.notice.empty());

    const auto band = sinc_span(1.0, {0.0, 2.0}, {1.0, -1.0});
    const auto b = verify_aliasing(band, [](double) { return 0.0; }, 1.0, xs, 200);
    CHECK(b.bound == 0.0);
    CHECK(b.sup_error <= b.truncation_allowance);
    CHECK(b.verdict == Verdict::Holds);

    // With the spectrum understated, a wide Gaussian is caught.
    const RealFunction wide = [](double x) { return std::exp(-0.02 * x * x); };
    const auto lie = verify_aliasing(wide, [](double p) { return 1e-3 * std::exp(-0.5 * p * p); }, 0.05, xs, 200);
    CHECK(lie.verdict != Verdict::Holds);
}

TEST_CASE("property: jitter error grows with amplitude") {
    const auto xs = linspace(-2.0, 2.0, 401);
    const auto f = sinc_span(1.0, {-1.0, 0.0, 2.0}, {0.7, 1.0, -0.4});
    double prev = -1.0;
    for (double amp : {0.0, 1e-3, 1e-2}) {
        const auto p = make_sampling_problem(f, 1.0, 200, amp > 0 ? random_jitter(200, amp, 9) : std::vector<double>{});
        const double e = sup_error(f, p, xs);
        CHECK(e > prev);
        prev = e;
    }
    CHECK(prev < 0.1);
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(make_sampling_problem(gaussian, -1.0, 10), InvalidArgument);
    CHECK_THROWS_AS(make_sampling_problem(gaussian, 1.0, 0), InvalidArgument);
    CHECK_THROWS_AS(make_sampling_problem(gaussian, 1.0, 5, std::vector<double>(3)), DimensionError);
    CHECK_THROWS_AS(random_jitter(5, 0.5, 1), InvalidArgument);
    const std::vector<double> xs{0.0};
    AliasingOptions o;
    o.J_ceiling = 5;
    CHECK_THROWS_AS(verify_aliasing(gaussian, gaussian_hat, 1.0, xs, 10, o), InvalidArgument);
}

TEST_CASE("quadrature building blocks") {
    const auto s = adaptive_simpson([](double x) { return std::cos(x); }, 0.0, 1.0, 1e-13);
    CHECK(s.converged);
    CHECK(s.value == doctest::Approx(std::sin(1.0)).epsilon(1e-13));
    const auto g = gauss_kronrod([](double x) { return 1.0 / (1.0 + x * x); }, -1.0, 1.0, 0.0, 1e-13);
    CHECK(g.value == doctest::Approx(std::numbers::pi / 2).epsilon(1e-13));
    const auto t = gauss_kronrod_tail([](double x) { return std::exp(-x); }, 2.0, 0.0, 1e-12);
    CHECK(t.converged);
    CHECK(t.value == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
}

}  // TEST_SUITE
