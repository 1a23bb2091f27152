#include "territory/boundary.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "territory/errors.hpp"
#include "territory/quadrature.hpp"

namespace territory {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive and finite");
}

void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
}

struct Reduced {
    double k_prime, alpha, beta, tau;
};

Reduced reduce(const BoundaryParams& p, double t) {
    return {p.K / (p.L * p.L * p.gamma), p.phi.alpha, p.gamma * p.phi.zeta, p.gamma * t};
}

}  // namespace

void PhiLaw::validate() const {
    require_alpha(alpha);
    require_positive(zeta, "zeta");
}

std::string to_string(GammaMode mode) { return mode == GammaMode::Subordinated ? "subordinated" : "constant"; }

GammaMode gamma_mode_from_string(const std::string& name) {
    if (name == "subordinated") return GammaMode::Subordinated;
    if (name == "constant") return GammaMode::Constant;
    throw DomainError("unknown gamma mode '" + name + "' (expected subordinated|constant)");
}

void BoundaryParams::validate() const {
    require_positive(K, "K");
    require_positive(gamma, "gamma");
    require_positive(L, "L");
    phi.validate();
    if (lambda0 && !(*lambda0 > 0.0)) throw DomainError("initial separation must be positive");
    if (centroid0 && !std::isfinite(*centroid0)) throw DomainError("initial centroid must be finite");
}

void DimensionlessSet::validate() const {
    require_positive(k_prime, "K'");
    require_positive(d_prime, "D'");
    require_positive(beta, "beta");
    require_positive(tau, "tau");
    require_alpha(alpha);
}

BoundaryParams boundary_from_dimensionless(const DimensionlessSet& d, GammaMode mode) {
    BoundaryParams p;
    p.K = d.k_prime;
    p.gamma = 1.0;
    p.L = 1.0;
    p.mode = mode;
    p.phi = {d.alpha, d.beta};
    return p;
}

double phi_at(const PhiLaw& phi, double t) {
    phi.validate();
    if (!(t > 0.0)) throw DomainError("phi_at: t must be positive");
    return phi.alpha * std::pow(t / phi.zeta, phi.alpha - 1.0);
}

double constant_gamma_kernel(double alpha, double tau) {
    require_alpha(alpha);
    if (!(tau >= 0.0)) throw DomainError("constant_gamma_kernel: tau must be non-negative");
    if (tau == 0.0) return 0.0;
    if (alpha == 1.0) return -0.5 * std::expm1(-2.0 * tau);
    const double inv_alpha = 1.0 / alpha;
    // in u = p^alpha the integrand exp(-2 (tau - u^(1/alpha))) is bounded by 1
    auto integrand = [&](double u) {
        if (u <= 0.0) return std::exp(-2.0 * tau);
        return std::exp(-2.0 * (tau - std::exp(std::log(u) * inv_alpha)));
    };
    std::vector<double> pts{0.0};
    for (double d : {40.0, 12.0, 4.0, 1.0, 0.25})
        if (tau - d > 0.0) pts.push_back(std::pow(tau - d, alpha));
    pts.push_back(std::pow(tau, alpha));
    quad::Options opt;
    opt.rel_tol = 1e-12;
    opt.max_intervals = 2000;
    return quad::integrate(integrand, std::span<const double>(pts), opt).value;
}

double g_reduced(GammaMode mode, double alpha, double beta, double tau) {
    if (mode == GammaMode::Constant) return tau;
    return std::pow(beta, 1.0 - alpha) * std::pow(tau, alpha);
}

double b_reduced(GammaMode mode, double k_prime, double alpha, double beta, double tau) {
    if (!(tau >= 0.0)) throw DomainError("b: time must be non-negative");
    if (tau == 0.0) return 0.0;
    const double scale = std::pow(beta, 1.0 - alpha);
    if (mode == GammaMode::Subordinated) return -4.0 * k_prime * std::expm1(-2.0 * scale * std::pow(tau, alpha));
    return 8.0 * k_prime * scale * constant_gamma_kernel(alpha, tau);
}

double c_reduced(double k_prime, double alpha, double beta, double tau) {
    if (!(tau >= 0.0)) throw DomainError("c: time must be non-negative");
    return 2.0 * k_prime * std::pow(beta, 1.0 - alpha) * std::pow(tau, alpha);
}

double b_of_t(const BoundaryParams& p, double t) {
    p.validate();
    const auto r = reduce(p, t);
    return p.L * p.L * b_reduced(p.mode, r.k_prime, r.alpha, r.beta, r.tau);
}

double c_of_t(const BoundaryParams& p, double t) {
    p.validate();
    const auto r = reduce(p, t);
    return p.L * p.L * c_reduced(r.k_prime, r.alpha, r.beta, r.tau);
}

BoundaryMoments moments_at(const BoundaryParams& p, double t) {
    p.validate();
    const auto r = reduce(p, t);
    BoundaryMoments m;
    m.b = p.L * p.L * b_reduced(p.mode, r.k_prime, r.alpha, r.beta, r.tau);
    m.c = p.L * p.L * c_reduced(r.k_prime, r.alpha, r.beta, r.tau);
    const double decay = std::exp(-g_reduced(p.mode, r.alpha, r.beta, r.tau));
    m.lambda_bar = p.L + decay * (p.initial_separation() - p.L);
    m.centroid = p.initial_centroid();
    return m;
}

double z_weight(const BoundaryMoments& m, double lambda) {
    if (lambda < 0.0) return 0.0;
    const double dm = lambda - m.lambda_bar, dp = lambda + m.lambda_bar;
    // both exponents are non-positive; the cosh form would overflow for small b
    return (std::exp(-dm * dm / m.b) + std::exp(-dp * dp / m.b)) / std::sqrt(kPi * m.b);
}

double centroid_density(const BoundaryMoments& m, double centroid) {
    const double d = centroid - m.centroid;
    return std::exp(-d * d / m.c) / std::sqrt(kPi * m.c);
}

double z_weight(const BoundaryParams& p, double lambda, double t) {
    if (!(t > 0.0)) throw DomainError("z_weight: t must be positive");
    return z_weight(moments_at(p, t), lambda);
}

double q_density(const BoundaryParams& p, double lambda, double centroid, double t) {
    if (!(t > 0.0)) throw DomainError("q_density: t must be positive");
    if (lambda < 0.0) return 0.0;
    const auto m = moments_at(p, t);
    return z_weight(m, lambda) * centroid_density(m, centroid);
}

double sep_msd_from_width(double L, double b, double lambda_bar) {
    if (b == 0.0) return (lambda_bar - L) * (lambda_bar - L);
    const double sb = std::sqrt(b);
    // <(|X| - L)^2> for X ~ N(lambda_bar, b/2), arranged without cancellation
    return (lambda_bar - L) * (lambda_bar - L) + 0.5 * b + 2.0 * L * lambda_bar * std::erfc(lambda_bar / sb) -
           2.0 * L * sb / std::sqrt(kPi) * std::exp(-lambda_bar * lambda_bar / b);
}

double sep_msd(const BoundaryParams& p, double t) {
    if (!(t >= 0.0)) throw DomainError("sep_msd: t must be non-negative");
    const auto m = moments_at(p, t);
    return sep_msd_from_width(p.L, m.b, m.lambda_bar);
}

double sep_msd_star(const BoundaryParams& p) {
    p.validate();
    if (p.mode != GammaMode::Subordinated)
        throw UnsupportedError("sep_msd_star: the long-time separation MSD is only defined in subordinated mode");
    return sep_msd_from_width(p.L, 4.0 * p.K / p.gamma, p.L);
}

}  // namespace territory
