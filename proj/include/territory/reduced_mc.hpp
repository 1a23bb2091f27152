#pragma once

// Direct sampling of the reduced model: separation and centroid advanced with
// exact Gaussian transitions between the requested times, walker drawn from the
// reflected free propagator inside the box present at each time.

#include <cstdint>
#include <span>
#include <vector>

#include "territory/boundary.hpp"
#include "territory/walker.hpp"

namespace territory {

struct McMoment {
    double t;
    double mean;
    double std_error;
};

/// Sample estimate of <(x - x0)^2> at each time (times strictly increasing).
/// Results do not depend on the thread count.
std::vector<McMoment> reduced_model_msd(const WalkerParams& w, const BoundaryParams& p, std::span<const double> times,
                                        long paths, std::uint64_t seed, bool parallel = true);

/// Folds y into [L1, L1 + lambda] by reflection at both walls.
double fold_into_box(double y, double L1, double lambda);

}  // namespace territory
