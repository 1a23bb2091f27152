#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "territory/errors.hpp"
#include "territory/quadrature.hpp"

using namespace territory;

TEST_CASE("kronrod rule is exact for polynomials up to degree 23") {
    for (int deg = 0; deg <= 23; ++deg) {
        auto f = [deg](double x) { return std::pow(x, deg); };
        const auto seg = [&] {
            auto g = f;
            return quad::detail::kronrod15(g, -1.0, 2.0);
        }();
        const double exact = (std::pow(2.0, deg + 1) - std::pow(-1.0, deg + 1)) / (deg + 1);
        CHECK(std::abs(seg.value - exact) <= 1e-13 * std::max(1.0, std::abs(exact)));
    }
}

TEST_CASE("adaptive integration of smooth and singular integrands") {
    quad::Options opt;
    opt.rel_tol = 1e-12;
    auto r = quad::integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0, opt);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));

    // integrable endpoint singularity
    r = quad::integrate([](double x) { return x > 0.0 ? 1.0 / std::sqrt(x) : 0.0; }, 0.0, 1.0, opt);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));

    // kink placed on a breakpoint
    const std::array<double, 3> pts{-1.0, 0.3, 2.0};
    r = quad::integrate([](double x) { return std::abs(x - 0.3); }, std::span<const double>(pts), opt);
    CHECK(r.value == doctest::Approx(0.5 * 1.3 * 1.3 + 0.5 * 1.7 * 1.7).epsilon(1e-14));
}

TEST_CASE("quadrature failure reports the estimate") {
    quad::Options opt;
    opt.rel_tol = 1e-14;
    opt.max_intervals = 8;
    auto wild = [](double x) { return std::sin(1.0 / (x + 1e-3)); };
    CHECK_THROWS_AS(quad::integrate(wild, 0.0, 1.0, opt), QuadratureError);
    opt.throw_on_failure = false;
    const auto r = quad::integrate(wild, 0.0, 1.0, opt);
    CHECK_FALSE(r.converged);
    CHECK(std::isfinite(r.value));
}

TEST_CASE("empty and reversed intervals") {
    CHECK(quad::integrate([](double) { return 1.0; }, 1.0, 1.0).value == 0.0);
    CHECK(quad::integrate([](double) { return 1.0; }, 2.0, 1.0).value == doctest::Approx(-1.0));
}
