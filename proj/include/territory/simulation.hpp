#pragma once

// Two territorial random walkers on a ring with finite-lifetime scent marks.
//
// Time is counted in lattice steps. Each step a walker attempts a hop with
// probability hop_prob, to either neighbour with equal odds, so the transfer
// rate to one neighbour is F = hop_prob / 2 per step and D = a^2 F (a = 1).

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace territory::sim {

inline constexpr const char* kBoundaryConvention =
    "midpoint between the focal walker's outermost active site and the nearest active foreign site";

struct SimConfig {
    int n_sites = 100;
    double t_as_prime = 3000.0;  // T_AS * F
    double hop_prob = 1.0;
    long n_steps = 21000;
    long n_realizations = 1000;
    std::uint64_t seed = 1;
    long record_stride = 100;
    std::vector<long> hist_steps;  // steps at which displacement histograms are taken
    long max_walker_steps = 20000000000L;  // resource cap on n_steps * n_realizations

    void validate() const;
    double F() const { return 0.5 * hop_prob; }
    double rho_prime() const { return 2.0 / n_sites; }
    /// Mean territory size L = 1 / rho in lattice units.
    double L() const { return 0.5 * n_sites; }
    /// Active scent time in steps.
    long t_as_steps() const;
};

struct SimState {
    std::vector<long> stamp;           // step of the last visit (initial marks are <= 0)
    std::vector<std::uint8_t> owner;   // walker id of the last visitor
    std::array<int, 2> pos{};          // site index in [0, n_sites)
    std::array<long, 2> unwrapped{};   // cumulative position
    long t = 0;                        // completed steps
};

struct Boundaries {
    double left, right;  // unwrapped, measured on the focal walker's sheet
    double separation() const { return right - left; }
    double centroid() const { return 0.5 * (left + right); }
};

SimState init_state(const SimConfig& cfg);

/// Advances one step in place.
void step(SimState& s, const SimConfig& cfg, std::mt19937_64& rng);

bool is_active(const SimState& s, const SimConfig& cfg, int site);

/// Borders of walker `focal`'s territory (see kBoundaryConvention).
Boundaries boundaries(const SimState& s, const SimConfig& cfg, int focal = 0);

/// Exclusion and connectivity invariants; returns an empty string when they hold.
std::string check_invariants(const SimState& s, const SimConfig& cfg);

struct Histogram {
    long step = 0;
    long min_displacement = 0;  // displacement of counts[0]
    std::vector<long> counts;
    long total() const;
};

struct SimResult {
    SimConfig cfg;
    std::string convention = kBoundaryConvention;
    double x0 = 0.0;  // focal walker start measured from its initial territory centroid
    std::vector<long> steps;
    std::vector<double> mean_left, mean_right, mean_lambda, mean_centroid;
    std::vector<double> sep_msd, sep_msd_se;            // <(lambda - L)^2>
    std::vector<double> centroid_msd, centroid_msd_se;  // <(centroid(t) - centroid(0))^2>
    std::vector<double> boundary_msd;                   // mean over both borders of <(L_i(t) - L_i(0))^2>
    std::vector<Histogram> histograms;

    double tF(std::size_t i) const { return steps[i] * cfg.F(); }
};

/// Runs cfg.n_realizations replicas; replica k uses stream (seed, k) only.
SimResult run_measurement(const SimConfig& cfg, bool parallel = true);

struct KEstimate {
    double k_over_d;            // in the gauge zeta = C / F
    double gauge_c;
    double t_lo, t_hi;          // fit window in tF
    double loglog_slope;        // local exponent of the centroid MSD in the window
    std::vector<double> slope_trace;  // running exponent over the window
    std::size_t points;
};

/// Fits centroid MSD = (K/D) sqrt(C tF) through the origin over the last
/// `window_fraction` of the record (in log time). Throws RegimeError when the
/// exponent differs from 1/2 by more than slope_tol (unless slope_tol <= 0).
KEstimate estimate_k(const SimResult& res, double gauge_c = 1.0, double window_fraction = 0.5, double slope_tol = 0.2);

/// Same fit applied to raw (tF, centroid MSD) arrays.
KEstimate estimate_k(const std::vector<double>& tF, const std::vector<double>& centroid_msd, double gauge_c = 1.0,
                     double window_fraction = 0.5, double slope_tol = 0.2);

struct SStarEstimate {
    double s_star;      // plateau of <(lambda - L)^2> / L^2
    double std_error;   // spread of the plateau mean
    double loglog_slope;
    std::size_t points;
};

/// Plateau of the separation MSD over the last decade of recorded time.
SStarEstimate estimate_s_star(const SimResult& res, double slope_threshold = 0.1);
SStarEstimate estimate_s_star(const std::vector<double>& tF, const std::vector<double>& sep_msd, double L,
                              double slope_threshold = 0.1);

}  // namespace territory::sim
