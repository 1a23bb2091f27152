#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "territory/asymptotics.hpp"
#include "territory/errors.hpp"

using namespace territory;

namespace {

double rel(double a, double b) { return a == b ? 0.0 : std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("v_alpha values") {
    for (double tau : {1e-3, 0.1, 1.0, 10.0, 300.0}) {
        CHECK(rel(v_alpha(1.0, tau), 0.5 * -std::expm1(-2.0 * tau)) < 1e-13);
        CHECK(v_alpha(1.0, tau) <= 0.5);
    }
    // v = tau Gamma(alpha) E_{1,alpha+1}(-2 tau)
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> ua(0.02, 1.0), ut(-3.0, 2.0);
    for (int i = 0; i < 20; ++i) {
        const double a = ua(rng), tau = std::pow(10.0, ut(rng));
        const double want = tau * std::tgamma(a) * oracle::mittag_leffler(a + 1.0, 2.0 * tau);
        CHECK(rel(v_alpha(a, tau), want) < 1e-10);
    }
    CHECK_THROWS_AS(v_alpha(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(v_alpha(0.5, 0.0), DomainError);
}

TEST_CASE("alpha0 threshold") {
    const auto r = alpha0_threshold();
    CHECK(std::abs(r.alpha0 - 0.105) <= 0.005);
    CHECK(r.lo <= r.alpha0);
    CHECK(r.hi >= r.alpha0);
    CHECK(v_alpha_max(r.alpha0).value == doctest::Approx(2.0).epsilon(1e-7));
    const auto m = v_alpha_max(0.05);
    CHECK(m.value > 2.0);
    CHECK(v_alpha(0.05, m.tau_star) > 2.0);
    CHECK(v_alpha(0.05, m.tau_star) >= v_alpha(0.05, 1.05 * m.tau_star));
    CHECK(v_alpha(0.05, m.tau_star) >= v_alpha(0.05, 0.95 * m.tau_star));
}

TEST_CASE("effective diffusion coefficient") {
    // separation part tends to 1/3: extrapolate from small times
    const double h = 1e-7;
    const double s1 = d_eff_separation(0.3, h), s2 = d_eff_separation(0.3, 2 * h);
    CHECK(std::abs(d_eff_separation(0.3, 0.0) - 1.0 / 3.0) < 1e-14);
    CHECK(std::abs(2.0 * s1 - s2 - 1.0 / 3.0) < 1e-6);
    for (double t : {0.0, 0.01, 1.0, 10.0, 100.0}) {
        CHECK(rel(d_eff_separation(1.0, t), std::exp(-2.0 * t) / 3.0) < 1e-13);
    }
    BoundaryParams p;
    p.mode = GammaMode::Constant;
    p.phi = {1.0, 1.0};
    for (double t : {1e-3, 1.0, 50.0}) CHECK(d_eff(p, t) > 0.0);
    double min_sep = 1.0;
    for (const double t : log_grid(1e-3, 1e3, 200)) min_sep = std::min(min_sep, d_eff_separation(0.3, t));
    CHECK(min_sep < 0.0);
    auto s = p;
    s.mode = GammaMode::Subordinated;
    CHECK_THROWS_AS(d_eff(s, 1.0), UnsupportedError);
}

TEST_CASE("asymptotic factor and f") {
    const auto p = boundary_from_dimensionless({0.01, 1.0, 0.1, 0.5, 1.0}, GammaMode::Subordinated);
    const auto m = moments_at(p, 2.0);
    CHECK(rel(asymptotic_a(p, 2.0), 1.0 + m.b / 2.0 + 6.0 * m.c) < 1e-15);
    for (double t : {1e-4, 1.0, 1e3}) CHECK(f_ratio(WalkerParams{1.0, 0.0}, p, t) > 0.0);
}

TEST_CASE("dip finder on synthetic curves") {
    const std::vector<double> t{1, 2, 3, 4, 5, 6, 7};
    const std::vector<double> up{1, 2, 3, 4, 5, 6, 7}, dip{1, 3, 2.5, 2.5, 2.0, 4, 5}, flat{1, 2, 2 + 1e-12, 2, 3, 4, 5};
    CHECK_FALSE(find_dip(t, up).has_value());
    CHECK_FALSE(find_dip(t, flat).has_value());
    const auto d = find_dip(t, dip);
    REQUIRE(d.has_value());
    CHECK(d->t_max == 2);
    CHECK(d->t_min == 5);
    CHECK(d->depth == doctest::Approx(1.0));
}

TEST_CASE("dip of the full MSD") {
    const auto grid = log_grid(1e-3, 1e2, 200);
    const auto p = boundary_from_dimensionless({0.01, 1.0, 0.1, 0.05, 1.0}, GammaMode::Constant);
    CHECK(dip_detect(WalkerParams{1.0, 0.0}, p, grid).has_value());
    auto q = p;
    q.phi.alpha = 1.0;
    CHECK_FALSE(dip_detect(WalkerParams{1.0, 0.0}, q, grid).has_value());
    CHECK_THROWS_AS(dip_detect(WalkerParams{1.0, 0.0}, p, log_grid(1e-3, 1.0, 50)), DomainError);
}
