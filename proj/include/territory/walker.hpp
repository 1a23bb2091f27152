#pragma once

// Walker confined between the boundaries: propagator, marginal density and
// the lambda-integral form of the mean square displacement.

#include "territory/boundary.hpp"
#include "territory/series.hpp"

namespace territory {

/// D is the walker diffusion constant; x0 its start, measured from the
/// initial boundary centroid.
struct WalkerParams {
    double D = 1.0;
    double x0 = 0.0;

    void validate() const;
    double w(double t) const { return 4.0 * D * t; }
};

/// Walker parameters realising a dimensionless set (L = 1, gamma = 1).
WalkerParams walker_from_dimensionless(const DimensionlessSet& d, double x0 = 0.0);

/// Below this w/lambda^2 the image series is used, above it the cosine series.
inline constexpr double kImageSwitch = 0.2;

enum class PropagatorForm { Automatic, Images, Eigen };

/// Reflected-diffusion density in [L1, L2] for a fixed box.
double walker_propagator(const WalkerParams& w, double L1, double L2, double x, double t,
                         const SeriesControl& ctl = {}, PropagatorForm form = PropagatorForm::Automatic);

/// Marginal walker density M(x, t), averaged over the boundary law.
double marginal_m(const WalkerParams& w, const BoundaryParams& p, double x, double t, const SeriesControl& ctl = {});

/// Reference value of M(x, t): nested quadrature over the centroid and separation of
/// the box-restricted propagator, without the resummation used by marginal_m.
double marginal_m_direct(const WalkerParams& w, const BoundaryParams& p, double x, double t);

/// <(x - x0)^2>(t) from the lambda integral against the separation law.
double msd_lambda_integral(const WalkerParams& w, const BoundaryParams& p, double t, const SeriesControl& ctl = {});

/// <(x - x0)^2> for a fixed box of width lambda centred at `centroid`.
double conditional_msd(const WalkerParams& w, double lambda, double centroid, double t, const SeriesControl& ctl = {});

/// Same quantity from the two cosine series only (slowly convergent for small w).
double conditional_msd_series(const WalkerParams& w, double lambda, double centroid, double t,
                              const SeriesControl& ctl = {});

/// Fixed-box MSD for a walker started at the box centre (independent eigen-series).
double fixed_box_msd(double D, double width, double t);

}  // namespace territory
