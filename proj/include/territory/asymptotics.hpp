#pragma once

// Long-time factor a(t), the v_alpha dip criterion and its threshold, the
// effective diffusion coefficient, and dip detection on an MSD curve.

#include <optional>
#include <span>
#include <vector>

#include "territory/boundary.hpp"
#include "territory/walker.hpp"

namespace territory {

/// v_alpha(tau) = tau^(1-alpha) int_0^tau e^{-2(tau-s)} s^(alpha-1) ds
double v_alpha(double alpha, double tau);

struct VAlphaMax {
    double tau_star;
    double value;
};

/// Maximum of v_alpha over tau (log-grid scan, then golden section on log tau).
VAlphaMax v_alpha_max(double alpha);

struct Alpha0Result {
    double alpha0;
    double lo, hi;    // final bisection bracket
    double tau_star;  // maximiser of v at alpha0
    int iterations;
};

/// Solves max_tau v_alpha(tau) = 2 for alpha by bisection on [0.01, 0.5].
Alpha0Result alpha0_threshold(double tol = 1e-10);

/// Gamma(alpha) E_{1,alpha}(-2 gamma t) / 3, the separation part of D_eff.
double d_eff_separation(double alpha, double gamma_t);

/// D_eff(t) = K phi(t) [1 + Gamma(alpha) E_{1,alpha}(-2 gamma t) / 3]; constant-gamma mode only.
double d_eff(const BoundaryParams& p, double t);

/// a(t) = 1 + b/(2 L^2) + 6 c / L^2
double asymptotic_a(const BoundaryParams& p, double t);

/// f(t) = (c + w) / b
double f_ratio(const WalkerParams& w, const BoundaryParams& p, double t);

struct Dip {
    double t_max, t_min;
    std::size_t i_max, i_min;
    double depth;  // msd(t_max) - msd(t_min)
};

/// Local max followed by a local min in a sampled curve (finite-difference signs
/// +, -, +). Differences below rel_floor * |value| are treated as flat.
std::optional<Dip> find_dip(std::span<const double> times, std::span<const double> values, double rel_floor = 1e-9);

/// Dip of the full lambda-integral MSD on `grid` (>= 100 increasing points).
std::optional<Dip> dip_detect(const WalkerParams& w, const BoundaryParams& p, std::span<const double> grid);

/// log-spaced grid of n points in [a, b]
std::vector<double> log_grid(double a, double b, std::size_t n);

}  // namespace territory
