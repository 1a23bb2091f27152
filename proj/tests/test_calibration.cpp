#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "territory/calibration.hpp"
#include "territory/errors.hpp"

using namespace territory;
using namespace territory::calib;

TEST_CASE("Z from active time and density") {
    CHECK(compute_z(9000.0, 0.02) == doctest::Approx(3.6).epsilon(1e-15));
    CHECK(compute_z(3000.0, 0.02) == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(compute_z(0.0, 0.3) == 0.0);
    CHECK(compute_z(9000.0, 0.02, ZConvention::Halved) == doctest::Approx(1.8).epsilon(1e-15));
    CHECK_THROWS_AS(compute_z(-1.0, 0.02), DomainError);
    CHECK(z_convention_from_string("halved") == ZConvention::Halved);
    CHECK_THROWS_AS(z_convention_from_string("double"), DomainError);
}

TEST_CASE("least squares recovers exact lines") {
    std::vector<double> z, k, s;
    for (double zi : {1.0, 1.4, 2.0, 2.4, 3.1, 3.6}) {
        z.push_back(zi);
        k.push_back(std::pow(10.0, 1.11 - 0.95 * zi));
        s.push_back(std::pow(10.0, 0.64 - 2.32 * std::pow(zi, 0.25)));
    }
    const auto f = fit_lines(z, k, z, s);
    CHECK(std::abs(f.k.intercept - 1.11) < 1e-12);
    CHECK(std::abs(f.k.slope + 0.95) < 1e-12);
    CHECK(std::abs(f.s.intercept - 0.64) < 1e-12);
    CHECK(std::abs(f.s.slope + 2.32) < 1e-12);
    for (double r : f.k.residuals) CHECK(std::abs(r) < 1e-13);

    const auto e = fit_line(z, k, Covariate::Z, LogBase::E);
    CHECK(std::abs(e.slope + 0.95 * std::log(10.0)) < 1e-12);
}

TEST_CASE("residuals are orthogonal to the covariate") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> noise(0.0, 0.2);
    std::vector<double> z, y;
    for (int i = 0; i < 12; ++i) {
        z.push_back(0.5 + 0.25 * i);
        y.push_back(std::pow(10.0, 1.0 - 0.8 * z.back() + noise(rng)));
    }
    for (auto cov : {Covariate::Z, Covariate::QuarterRootZ}) {
        const auto f = fit_line(z, y, cov);
        double dot = 0, sum = 0, scale = 0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            dot += f.residuals[i] * f.covariate_of(z[i]);
            sum += f.residuals[i];
            scale += std::abs(f.residuals[i] * f.covariate_of(z[i]));
        }
        CHECK(std::abs(dot) < 1e-13 * scale);
        CHECK(std::abs(sum) < 1e-13 * scale);
        CHECK(f.slope_se > 0.0);
    }
}

TEST_CASE("fit errors and repeated covariates") {
    CHECK_THROWS_AS(fit_line({1.0, 2.0}, {1.0, 2.0}, Covariate::Z), DomainError);
    CHECK_THROWS_AS(fit_line({2.0, 2.0, 2.0}, {1.0, 2.0, 3.0}, Covariate::Z), DomainError);
    CHECK_THROWS_AS(fit_line({1.0, 2.0, 3.0}, {1.0, -2.0, 3.0}, Covariate::Z), DomainError);
    // duplicate x with different y: the fit passes through their mean
    const auto f = fit_line({1.0, 1.0, 2.0, 3.0}, {10.0, 1000.0, 10.0, 1.0}, Covariate::Z);
    CHECK(std::isfinite(f.slope));
    CHECK(f.residuals[0] == doctest::Approx(-f.residuals[1]));
}

TEST_CASE("gamma inversion round trip") {
    for (double L : {1.0, 50.0}) {
        for (double K : {1e-4, 0.01, 0.7}) {
            for (double gamma : {1e-5, 1e-3, 0.2, 5.0}) {
                BoundaryParams p;
                p.K = K, p.gamma = gamma, p.L = L, p.mode = GammaMode::Subordinated;
                p.phi = {0.5, 2.0};
                const double s = sep_msd_star(p) / (L * L);
                const double got = invert_gamma(K, L, s, 0.5);
                INFO("L=", L, " K=", K, " gamma=", gamma);
                CHECK(std::abs(got / gamma - 1.0) < 1e-8);
            }
        }
    }
    // s* -> 0 needs gamma beyond the search cap
    CHECK_THROWS_AS(invert_gamma(0.01, 1.0, 1e-30, 0.5), BracketError);
    CHECK_THROWS_AS(invert_gamma(0.01, 1.0, 1e12, 0.5), BracketError);
}

TEST_CASE("parameters from the printed lines") {
    const Lines printed{printed_k_line(), printed_s_line()};
    const double F = 0.5, rho = 0.02;
    for (auto conv : {ZConvention::AsPrinted, ZConvention::Halved}) {
        const auto cp = invert_params(printed, 6000.0, rho, F, conv);
        const double z = conv == ZConvention::AsPrinted ? 2.4 : 1.2;
        CHECK(cp.z == doctest::Approx(z));
        CHECK(cp.k_over_d == doctest::Approx(std::pow(10.0, 1.11 - 0.95 * z)));
        CHECK(cp.L == doctest::Approx(50.0));
        CHECK(cp.reduced.alpha == 0.5);
        CHECK(cp.reduced.k_prime > 0.0);
        CHECK(cp.reduced.d_prime == doctest::Approx(cp.reduced.k_prime / cp.k_over_d));
        CHECK(cp.reduced.beta == doctest::Approx(cp.gamma / F));
        // forward model reproduces the requested plateau
        CHECK(sep_msd_star(cp.boundary()) / (cp.L * cp.L) == doctest::Approx(cp.s_star).epsilon(1e-9));
        const auto m = theory_pmf(cp, 0.5, 21000.0, -80, 80);
        double mass = 0;
        for (double v : m) mass += v;
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-4));
    }
}

TEST_CASE("distribution distances") {
    const std::vector<double> a{0.1, 0.2, 0.4, 0.2, 0.1, 0.0};
    const std::vector<double> b{0.0, 0.1, 0.2, 0.4, 0.2, 0.1};
    const auto same = compare_distributions(a, a);
    CHECK(same.total_variation == 0.0);
    CHECK(same.l2 == 0.0);
    const auto d = compare_distributions(a, b), r = compare_distributions(b, a);
    double half = 0, sq = 0;
    for (std::size_t i = 0; i < a.size(); ++i) half += 0.5 * std::abs(a[i] - b[i]), sq += (a[i] - b[i]) * (a[i] - b[i]);
    CHECK(d.total_variation == doctest::Approx(half).epsilon(1e-15));
    CHECK(d.l2 == doctest::Approx(std::sqrt(sq)).epsilon(1e-15));
    CHECK(d.total_variation == r.total_variation);
    CHECK(d.l2 == r.l2);
    CHECK(d.residuals[2] == doctest::Approx(0.2));
    CHECK_THROWS_AS(compare_distributions(a, std::vector<double>{0.5, 0.5}), DomainError);
    CHECK_THROWS_AS(compare_distributions({}, {}), DomainError);

    const auto p = normalise_counts({1, 3, 0, 4});
    CHECK(p[1] == 0.375);
    CHECK_THROWS_AS(normalise_counts({0, 0}), DomainError);
}
