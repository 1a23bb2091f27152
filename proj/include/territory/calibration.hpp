#pragma once

// Mapping lattice observables (K/D, s*/L^2) to reduced-model parameters, and
// distances between simulated and predicted walker distributions.

#include <string>
#include <vector>

#include "territory/boundary.hpp"
#include "territory/walker.hpp"

namespace territory::calib {

enum class ZConvention { AsPrinted, Halved };
enum class Covariate { Z, QuarterRootZ };
enum class LogBase { Ten, E };

std::string to_string(ZConvention c);
std::string to_string(Covariate c);
std::string to_string(LogBase b);
ZConvention z_convention_from_string(const std::string& s);
LogBase log_base_from_string(const std::string& s);

/// Z = T_AS' rho'^2, halved under ZConvention::Halved.
double compute_z(double t_as_prime, double rho_prime, ZConvention conv = ZConvention::AsPrinted);

/// log(y) = intercept + slope * transform(Z).
struct FitLine {
    double intercept = 0.0;
    double slope = 0.0;
    Covariate covariate = Covariate::Z;
    LogBase base = LogBase::Ten;
    std::vector<double> residuals;
    double intercept_se = 0.0, slope_se = 0.0;

    double covariate_of(double z) const;
    double predict(double z) const;  // y, not log y
};

/// Printed Fig. 1 lines: log10(K/D) = 1.11 - 0.95 Z, log10(s*/L^2) = 0.64 - 2.32 Z^(1/4).
FitLine printed_k_line();
FitLine printed_s_line();

/// Ordinary least squares in (transform(Z), log y). Needs >= 3 points and two distinct Z.
FitLine fit_line(const std::vector<double>& z, const std::vector<double>& y, Covariate cov, LogBase base = LogBase::Ten);

struct Lines {
    FitLine k, s;
};
Lines fit_lines(const std::vector<double>& z_k, const std::vector<double>& k_over_d, const std::vector<double>& z_s,
                const std::vector<double>& s_star, LogBase base = LogBase::Ten);

struct CalibratedParams {
    DimensionlessSet reduced;  // alpha = 1/2; tau left at its default
    double K = 0.0, gamma = 0.0, D = 0.0, F = 0.0, L = 0.0, zeta = 0.0;
    double z = 0.0, k_over_d = 0.0, s_star = 0.0;
    ZConvention convention = ZConvention::AsPrinted;

    /// Dimensional boundary law (subordinated, zeta = 1/F) in lattice units.
    BoundaryParams boundary() const;
    WalkerParams walker(double x0) const;
};

/// gamma such that the long-time separation MSD with b = 4K/gamma equals s_star L^2.
/// Searches gamma in [1e-8, 1e8] F; BracketError outside that range.
double invert_gamma(double K, double L, double s_star, double F);

/// Lattice spacing a = 1: D = F, L = 1 / rho'.
CalibratedParams invert_params(const Lines& fits, double t_as_prime, double rho_prime, double F,
                               ZConvention conv = ZConvention::AsPrinted);

struct Divergence {
    double total_variation = 0.0;
    double l2 = 0.0;
    std::vector<double> residuals;  // sim - theory per bin
};

/// Both inputs are probabilities per bin on the same support.
Divergence compare_distributions(const std::vector<double>& sim, const std::vector<double>& theory);

/// Counts normalised to probabilities.
std::vector<double> normalise_counts(const std::vector<long>& counts);

/// M(x0 + d, t) * a for integer displacements d on [d_min, d_max], lattice constant a = 1.
std::vector<double> theory_pmf(const CalibratedParams& cp, double x0, double t_steps, long d_min, long d_max);

}  // namespace territory::calib
