#pragma once

// Spring-coupled boundary pair with power-law time-dependent diffusion.
//
// Everything is evaluated in reduced variables (L = 1, time in units of
// 1/gamma) and rescaled on the way out.

#include <optional>
#include <string>

namespace territory {

/// phi(t) = alpha (t / zeta)^(alpha - 1)
struct PhiLaw {
    double alpha = 1.0;
    double zeta = 1.0;

    void validate() const;
};

enum class GammaMode { Subordinated, Constant };

std::string to_string(GammaMode mode);
GammaMode gamma_mode_from_string(const std::string& name);

/// Dimensional boundary parameters. The initial separation defaults to L and
/// the initial centroid to 0.
struct BoundaryParams {
    double K = 0.01;
    double gamma = 1.0;
    double L = 1.0;
    GammaMode mode = GammaMode::Constant;
    PhiLaw phi{};
    std::optional<double> lambda0;
    std::optional<double> centroid0;

    void validate() const;
    double initial_separation() const { return lambda0.value_or(L); }
    double initial_centroid() const { return centroid0.value_or(0.0); }
};

/// K' = K/(L^2 gamma), D' = D/(L^2 gamma), beta = gamma zeta, tau = gamma t.
struct DimensionlessSet {
    double k_prime = 0.01;
    double d_prime = 1.0;
    double beta = 0.1;
    double alpha = 0.05;
    double tau = 1.0;

    void validate() const;
};

/// Boundary parameters realising a dimensionless set with L = 1, gamma = 1.
BoundaryParams boundary_from_dimensionless(const DimensionlessSet& d, GammaMode mode);

/// Moments of the boundary law at one instant (dimensional).
struct BoundaryMoments {
    double b = 0.0;           // separation width
    double c = 0.0;           // centroid width
    double lambda_bar = 0.0;  // mean of the unreflected separation Gaussian
    double centroid = 0.0;    // centroid mean
};

double phi_at(const PhiLaw& phi, double t);

/// int_0^tau exp(-2 (tau - p)) alpha p^(alpha - 1) dp, by quadrature in u = p^alpha.
double constant_gamma_kernel(double alpha, double tau);

/// Reduced widths b/L^2 and c/L^2 at reduced time tau.
double b_reduced(GammaMode mode, double k_prime, double alpha, double beta, double tau);
double c_reduced(double k_prime, double alpha, double beta, double tau);

/// G(t) = int_0^t gamma(s) ds in reduced form.
double g_reduced(GammaMode mode, double alpha, double beta, double tau);

double b_of_t(const BoundaryParams& p, double t);
double c_of_t(const BoundaryParams& p, double t);
BoundaryMoments moments_at(const BoundaryParams& p, double t);

/// Joint density of separation and centroid; zero for lambda < 0.
double q_density(const BoundaryParams& p, double lambda, double centroid, double t);

/// Separation marginal (the reflected Gaussian pair).
double z_weight(const BoundaryParams& p, double lambda, double t);
double z_weight(const BoundaryMoments& m, double lambda);

/// Centroid marginal.
double centroid_density(const BoundaryMoments& m, double centroid);

/// <(lambda - L)^2> at time t, and its long-time value in subordinated mode.
double sep_msd(const BoundaryParams& p, double t);
double sep_msd_from_width(double L, double b, double lambda_bar);
double sep_msd_star(const BoundaryParams& p);

}  // namespace territory
