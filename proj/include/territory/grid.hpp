#pragma once

// Evaluation of the MSD on a time grid. Each point is independent, so the
// parallel and serial versions return identical arrays.

#include <span>
#include <vector>

#include "territory/msd_closed.hpp"

namespace territory {

/// Threads used by the OpenMP kernels; 0 means the OpenMP default. The
/// TERRITORY_MAX_THREADS environment variable caps the default.
int kernel_threads();
void set_kernel_threads(int n);

std::vector<double> msd_grid(const WalkerParams& w, const BoundaryParams& p, std::span<const double> times,
                             MsdRepresentation rep = MsdRepresentation::LambdaIntegral, const SeriesControl& ctl = {});

std::vector<double> msd_grid_serial(const WalkerParams& w, const BoundaryParams& p, std::span<const double> times,
                                    MsdRepresentation rep = MsdRepresentation::LambdaIntegral,
                                    const SeriesControl& ctl = {});

/// Closed-form results on a grid (unavailable points are kept, flagged).
std::vector<ClosedMsd> closed_grid(const WalkerParams& w, const BoundaryParams& p, std::span<const double> times,
                                   MsdRepresentation rep, const SeriesControl& ctl = {});

/// M(x, t) on a grid of x at fixed t.
std::vector<double> marginal_grid(const WalkerParams& w, const BoundaryParams& p, std::span<const double> xs, double t,
                                  const SeriesControl& ctl = {});
std::vector<double> marginal_grid_serial(const WalkerParams& w, const BoundaryParams& p, std::span<const double> xs,
                                         double t, const SeriesControl& ctl = {});

}  // namespace territory
