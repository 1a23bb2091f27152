#pragma once

// Simulation campaigns behind the figure subcommands and the acceptance run.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "territory/asymptotics.hpp"
#include "territory/calibration.hpp"
#include "territory/simulation.hpp"

namespace territory::exp {

// ---- calibration lines from lattice runs

struct Fig1Options {
    std::vector<double> t_as_primes{2500.0, 4000.0, 5500.0, 7000.0};
    int n_sites = 100;
    double hop_prob = 1.0;
    std::uint64_t seed = 1;
    // ensemble for the centroid MSD (K/D)
    long k_steps = 1000000, k_reps = 1000, k_stride = 2500;
    double window_fraction = 0.5;
    double slope_tol = 0.0;  // <= 0: exponent reported, not enforced
    // long runs for the separation plateau
    long s_steps = 10000000, s_reps = 128, s_stride = 10000;
    double plateau_slope = 0.1;
    calib::LogBase base = calib::LogBase::Ten;
};

struct Fig1Point {
    double t_as_prime = 0.0, z = 0.0;
    sim::KEstimate k{};
    std::optional<sim::SStarEstimate> s;
    std::string s_error;  // set when no plateau was found
};

struct Fig1Result {
    std::vector<Fig1Point> points;
    std::optional<calib::FitLine> k_line, s_line;  // absent with fewer than three usable points
};

Fig1Result run_fig1(const Fig1Options& o);

// ---- walker distributions against the calibrated marginal

struct Fig2Options {
    std::vector<double> t_as_primes{9000.0, 7000.0, 6000.0, 3000.0};
    int n_sites = 100;
    double hop_prob = 1.0;
    double tF = 10500.0;
    long reps = 20000;
    std::uint64_t seed = 1;
    long pad = 50;  // empty bins added on each side of the simulated support
    calib::Lines lines{calib::printed_k_line(), calib::printed_s_line()};
};

struct Fig2Theory {
    calib::ZConvention convention;
    calib::CalibratedParams params;
    std::vector<double> pmf;
    calib::Divergence divergence;
};

struct Fig2Config {
    double t_as_prime = 0.0;
    long step = 0;
    double x0 = 0.0;
    long d_min = 0, d_max = 0;
    std::vector<long> counts;
    std::vector<double> sim_pmf;
    std::array<Fig2Theory, 2> theory;  // as-printed, halved
};

std::vector<Fig2Config> run_fig2(const Fig2Options& o);

// ---- MSD sweeps with the dip flag

struct Fig3Curve {
    std::string sweep;  // "alpha" or "dprime"
    DimensionlessSet params;
    std::vector<double> msd;
    std::optional<Dip> dip;
};

struct Fig3Options {
    DimensionlessSet base{0.01, 1.0, 0.1, 0.05, 1.0};
    GammaMode mode = GammaMode::Constant;
    std::vector<double> alphas{0.05, 0.1, 0.3, 1.0};
    std::vector<double> dprimes{0.01, 0.1, 1.0, 10.0};
    double tau_min = 1e-3, tau_max = 1e2;
    std::size_t points = 200;
};

struct Fig3Result {
    std::vector<double> tau;
    std::vector<Fig3Curve> curves;
};

Fig3Result run_fig3(const Fig3Options& o);

}  // namespace territory::exp
