#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/constants/constants.hpp>

#include "oracles.hpp"
#include "territory/boundary.hpp"
#include "territory/errors.hpp"
#include "territory/quadrature.hpp"

using namespace territory;

namespace {

double rel(double a, double b) { return a == b ? 0.0 : std::abs(a - b) / std::max(std::abs(b), 1e-300); }

BoundaryParams reduced(double kp, double alpha, double beta, GammaMode mode) {
    return boundary_from_dimensionless({kp, 1.0, beta, alpha, 1.0}, mode);
}

double integrate_z(const BoundaryMoments& m, double lo_factor = 14.0) {
    const double s = std::sqrt(0.5 * m.b);
    const std::vector<double> pts{0.0, std::max(0.0, m.lambda_bar - lo_factor * s), m.lambda_bar,
                                  m.lambda_bar + lo_factor * s};
    quad::Options o;
    o.rel_tol = 1e-13;
    return quad::integrate([&](double l) { return z_weight(m, l); }, std::span<const double>(pts), o).value;
}

}  // namespace

TEST_CASE("phi law") {
    CHECK(phi_at({1.0, 3.0}, 5.0) == 1.0);
    CHECK(phi_at({0.5, 1.0}, 4.0) == doctest::Approx(0.25).epsilon(1e-15));
    {
        oracle::Precision pr(60);
        using oracle::mpfr_float;
        const mpfr_float want = mpfr_float("0.05") * pow(mpfr_float(2) / 10, mpfr_float("0.05") - 1);
        CHECK(rel(phi_at({0.05, 10.0}, 2.0), oracle::to_double(want)) < 1e-14);
    }
    CHECK_THROWS_AS(phi_at({0.5, 1.0}, 0.0), DomainError);
    CHECK_THROWS_AS(phi_at({0.0, 1.0}, 1.0), DomainError);
    CHECK_THROWS_AS(phi_at({0.5, -1.0}, 1.0), DomainError);
}

TEST_CASE("b and c closed forms") {
    const auto sub = reduced(0.01, 1.0, 2.0, GammaMode::Subordinated);
    CHECK(b_of_t(sub, 0.0) == 0.0);
    CHECK(c_of_t(sub, 0.0) == 0.0);
    CHECK(rel(b_of_t(sub, 60.0), 0.04) < 1e-14);
    const auto con1 = reduced(0.01, 1.0, 2.0, GammaMode::Constant);
    for (double tau : {1e-6, 0.1, 1.0, 3.0, 20.0})
        CHECK(rel(b_of_t(con1, tau), 0.04 * -std::expm1(-2.0 * tau)) < 1e-14);
    CHECK(rel(c_of_t(sub, 3.0), 0.06) < 1e-14);
    {
        oracle::Precision pr(60);
        using oracle::mpfr_float;
        const mpfr_float want = 2 * mpfr_float("0.01") * sqrt(mpfr_float("0.1")) * 2;
        CHECK(rel(c_of_t(reduced(0.01, 0.5, 0.1, GammaMode::Subordinated), 4.0), oracle::to_double(want)) < 1e-14);
    }
}

TEST_CASE("constant-gamma kernel against the Mittag-Leffler oracle") {
    // int_0^tau exp(-2(tau-p)) alpha p^(alpha-1) dp = Gamma(alpha+1) tau^alpha E_{1,alpha+1}(-2 tau)
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ua(0.02, 1.0), ut(-4.0, 2.0);
    for (int i = 0; i < 30; ++i) {
        const double a = ua(rng), tau = std::pow(10.0, ut(rng));
        const double want = std::tgamma(a + 1.0) * std::pow(tau, a) * oracle::mittag_leffler(a + 1.0, 2.0 * tau);
        CHECK(rel(constant_gamma_kernel(a, tau), want) < 1e-11);
    }
}

TEST_CASE("constant-gamma b against a midpoint rule in the substituted variable") {
    const double alpha = 0.05, beta = 0.1, kp = 0.01, tau = 1.0;
    const long panels = 10000000;
    const long double top = std::pow(static_cast<long double>(tau), static_cast<long double>(alpha));
    const long double h = top / panels;
    long double sum = 0.0L;
    for (long i = 0; i < panels; ++i) {
        const long double u = (i + 0.5L) * h;
        sum += std::exp(-2.0L * (tau - std::pow(u, 1.0L / alpha)));
    }
    const double want = static_cast<double>(8.0L * kp * std::pow(static_cast<long double>(beta), 1.0L - alpha) * sum * h);
    CHECK(rel(b_of_t(reduced(kp, alpha, beta, GammaMode::Constant), tau), want) < 1e-9);
}

TEST_CASE("sign patterns of b and c on a log grid") {
    std::vector<double> grid;
    for (int i = 0; i <= 120; ++i) grid.push_back(std::pow(10.0, -4.0 + 7.0 * i / 120.0));
    for (double alpha : {0.05, 0.3, 0.7, 1.0}) {
        const auto sub = reduced(0.01, alpha, 0.1, GammaMode::Subordinated);
        const auto con = reduced(0.01, alpha, 0.1, GammaMode::Constant);
        double prev_b = 0.0, prev_c = 0.0, prev_bc = 0.0;
        int changes = 0, sign = 1;
        for (double tau : grid) {
            const double b = b_of_t(sub, tau), c = c_of_t(sub, tau), bc = b_of_t(con, tau);
            CHECK(b >= prev_b);
            CHECK(c > prev_c);
            CHECK(bc >= 0.0);
            const int s = bc >= prev_bc ? 1 : -1;
            if (s != sign) ++changes;
            sign = s;
            prev_b = b;
            prev_c = c;
            prev_bc = bc;
        }
        if (alpha < 1.0) CHECK(changes == 1);  // single interior maximum, then decay
        else CHECK(changes == 0);
    }
}

TEST_CASE("separation and centroid densities") {
    const auto p = reduced(0.01, 0.5, 0.1, GammaMode::Subordinated);
    const auto m = moments_at(p, 2.0);
    CHECK(std::abs(integrate_z(m) - 1.0) < 1e-12);
    CHECK(z_weight(m, -0.1) == 0.0);
    CHECK(rel(z_weight(m, 0.0), 2.0 * std::exp(-1.0 / m.b) / std::sqrt(std::numbers::pi * m.b)) < 1e-14);
    CHECK(q_density(p, -0.2, 0.1, 1.0) == 0.0);
    for (double l : {0.3, 0.9, 1.1})
        for (double x : {0.01, 0.05, 0.2}) CHECK(q_density(p, l, x, 1.0) == q_density(p, l, -x, 1.0));

    SUBCASE("normalization of the joint density") {
        const auto m1 = moments_at(p, 1.0);
        const double sl = std::sqrt(0.5 * m1.b), sc = std::sqrt(0.5 * m1.c);
        quad::Options o;
        o.rel_tol = 1e-11;
        auto inner = [&](double l) {
            const std::vector<double> pts{-14 * sc, 0.0, 14 * sc};
            return quad::integrate([&](double x) { return q_density(p, l, x, 1.0); }, std::span<const double>(pts), o)
                .value;
        };
        const std::vector<double> pts{0.0, 1.0 - 14 * sl, 1.0, 1.0 + 14 * sl};
        const double total = quad::integrate(inner, std::span<const double>(pts), o).value;
        CHECK(std::abs(total - 1.0) < 1e-8);
    }

    SUBCASE("factorization into normalized marginals") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> ul(0.6, 1.4), ux(-0.2, 0.2), ut(0.2, 5.0);
        for (int i = 0; i < 20; ++i) {
            const double l = ul(rng), x = ux(rng), t = ut(rng);
            const auto mt = moments_at(p, t);
            const double sl = std::sqrt(0.5 * mt.b), sc = std::sqrt(0.5 * mt.c);
            quad::Options o;
            o.rel_tol = 1e-12;
            const std::vector<double> xs{-16 * sc, 0.0, 16 * sc};
            const double q2 =
                quad::integrate([&](double y) { return q_density(p, l, y, t); }, std::span<const double>(xs), o).value;
            const std::vector<double> ls{0.0, std::max(0.0, 1.0 - 16 * sl), 1.0, 1.0 + 16 * sl};
            const double q1 =
                quad::integrate([&](double y) { return q_density(p, y, x, t); }, std::span<const double>(ls), o).value;
            CHECK(rel(q_density(p, l, x, t), q2 * q1) < 1e-9);
        }
    }
}

TEST_CASE("reflecting condition at zero separation") {
    // a wide law so that lambda = 0 carries visible mass
    const auto p = reduced(0.2, 0.5, 0.1, GammaMode::Subordinated);
    const auto m = moments_at(p, 5.0);
    const double sigma = std::sqrt(0.5 * m.b);
    const double h = 1e-8 * sigma;
    const double slope = (z_weight(m, 2.0 * h) - z_weight(m, h)) / h;  // one-sided, O(h) at a flat point
    double peak = 0.0;
    for (int i = 1; i < 400; ++i) {
        const double l = 6.0 * sigma * i / 400.0;
        const double hp = 1e-4 * sigma;
        peak = std::max(peak, std::abs(z_weight(m, l + hp) - z_weight(m, l - hp)) / (2 * hp));
    }
    CHECK(std::abs(slope) < 1e-6 * peak);
}

TEST_CASE("mass concentrates at L for vanishing K") {
    const auto p = reduced(1e-8, 0.5, 0.1, GammaMode::Subordinated);
    const auto m = moments_at(p, 1.0);
    const std::vector<double> pts{1.0 - 1e-3, 1.0, 1.0 + 1e-3};
    const double mass =
        quad::integrate([&](double l) { return z_weight(m, l); }, std::span<const double>(pts)).value;
    CHECK(mass > 0.999);
}

TEST_CASE("separation MSD") {
    CHECK(sep_msd_from_width(0.0, 0.3, 0.0) == doctest::Approx(0.15).epsilon(1e-15));
    {
        const double b = 0.01;  // L / sqrt(b) = 10
        const double r = sep_msd_from_width(1.0, b, 1.0) / (0.5 * b);
        CHECK(r <= 1.0);
        CHECK(r >= 1.0 - 1e-8);
    }
    {
        oracle::Precision pr(60);
        using oracle::mpfr_float;
        const mpfr_float b = mpfr_float("0.04"), sb = sqrt(b);
        const mpfr_float want = b / 2 * (1 - 4 / sqrt(boost::math::constants::pi<mpfr_float>()) / sb * exp(-1 / b) +
                                         4 / b * erfc(1 / sb));
        const auto p = reduced(0.01, 0.5, 3.7, GammaMode::Subordinated);
        CHECK(rel(sep_msd_star(p), oracle::to_double(want)) < 1e-13);
    }
    CHECK_THROWS_AS(sep_msd_star(reduced(0.01, 0.5, 0.1, GammaMode::Constant)), UnsupportedError);

    for (auto mode : {GammaMode::Subordinated, GammaMode::Constant}) {
        const auto p = reduced(0.05, 0.3, 0.1, mode);
        for (double t : {0.01, 0.3, 2.0, 40.0}) {
            const auto m = moments_at(p, t);
            const double s = std::sqrt(0.5 * m.b);
            const std::vector<double> pts{0.0, std::max(0.0, 1.0 - 14 * s), 1.0, 1.0 + 14 * s};
            quad::Options o;
            o.rel_tol = 1e-13;
            const double q = quad::integrate([&](double l) { return (l - 1.0) * (l - 1.0) * z_weight(m, l); },
                                             std::span<const double>(pts), o)
                                 .value;
            CHECK(rel(sep_msd(p, t), q) < 1e-8);
        }
    }
}

TEST_CASE("general initial condition shifts the separation mean") {
    auto p = reduced(0.01, 0.5, 0.1, GammaMode::Subordinated);
    p.lambda0 = 1.5;
    p.centroid0 = 0.2;
    const auto m = moments_at(p, 1.0);
    CHECK(rel(m.lambda_bar, 1.0 + 0.5 * std::exp(-std::sqrt(0.1))) < 1e-14);
    CHECK(m.centroid == 0.2);
    p.lambda0 = -1.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("zeta gauge cancels against a rescaled K") {
    // zeta -> C zeta with K -> K C^(alpha-1): c is invariant in both modes, b in constant mode
    for (auto mode : {GammaMode::Subordinated, GammaMode::Constant}) {
        BoundaryParams p;
        p.K = 0.02;
        p.gamma = 0.7;
        p.L = 3.0;
        p.mode = mode;
        p.phi = {0.4, 2.0};
        auto q = p;
        const double C = 7.5;
        q.phi.zeta *= C;
        q.K *= std::pow(C, p.phi.alpha - 1.0);
        for (double t : {0.1, 1.0, 10.0}) {
            CHECK(rel(c_of_t(q, t), c_of_t(p, t)) < 1e-13);
            if (mode == GammaMode::Constant) CHECK(rel(b_of_t(q, t), b_of_t(p, t)) < 1e-12);
        }
    }
    CHECK_THROWS_AS(gamma_mode_from_string("other"), DomainError);
    CHECK(gamma_mode_from_string(to_string(GammaMode::Subordinated)) == GammaMode::Subordinated);
}
