#pragma once

// Closed representations of the walker MSD (x0 = 0, default initial boundary
// state) obtained by integrating the n-series over lambda term by term.

#include <string>

#include "territory/boundary.hpp"
#include "territory/series.hpp"
#include "territory/walker.hpp"

namespace territory {

enum class MsdRepresentation { LambdaIntegral, PartialClosed, SingleSum2F2 };

std::string to_string(MsdRepresentation rep);
MsdRepresentation msd_representation_from_string(const std::string& name);

/// Outcome of a closed-form evaluation. `available` is false when the series
/// could not be summed to the accuracy target (cost, overflow or rounding);
/// the representation is then simply not usable at this point.
struct ClosedMsd {
    bool available = false;
    double value = 0.0;
    double error = 0.0;       // absolute error estimate
    long terms = 0;           // log-domain terms summed
    bool tail_bounded = false;  // residual series replaced by its analytic bound
    std::string status;
};

/// Relative error above which a closed form is reported unavailable.
inline constexpr double kClosedAccuracy = 1e-9;
/// Residual series are dropped once their rigorous bound is below this fraction of the MSD.
inline constexpr double kTailDrop = 1e-10;
/// Constant-gamma closed forms are used only for gamma t above this.
inline constexpr double kClosedTauMin = 1e-8;
/// Upper bound on summed terms before a closed form gives up.
inline constexpr double kClosedCostCap = 1e8;

/// Pieces shared by both closed forms, in units of the dimensional inputs.
struct ClosedParts {
    double b, c, w, f, y, u;
    double base;        // exact k = 0, 1 contributions plus L^2/12 + b/24 + c/2
    double tail_bound;  // bound on |MSD - base|
};

ClosedParts closed_parts(const WalkerParams& w, const BoundaryParams& p, double t);

ClosedMsd msd_closed(const WalkerParams& w, const BoundaryParams& p, double t, MsdRepresentation rep,
                     const SeriesControl& ctl = {});

/// Convenience: value of the requested representation, throwing SeriesError when unavailable.
double msd_value(const WalkerParams& w, const BoundaryParams& p, double t, MsdRepresentation rep,
                 const SeriesControl& ctl = {});

}  // namespace territory
