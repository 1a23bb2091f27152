#include "territory/experiments.hpp"

#include <cmath>

#include "territory/errors.hpp"
#include "territory/grid.hpp"

namespace territory::exp {

Fig1Result run_fig1(const Fig1Options& o) {
    Fig1Result out;
    std::vector<double> zk, kd, zs, ss;
    for (std::size_t i = 0; i < o.t_as_primes.size(); ++i) {
        Fig1Point pt;
        pt.t_as_prime = o.t_as_primes[i];
        sim::SimConfig c;
        c.n_sites = o.n_sites;
        c.hop_prob = o.hop_prob;
        c.t_as_prime = pt.t_as_prime;
        pt.z = calib::compute_z(c.t_as_prime, c.rho_prime());
        // separate seed streams per configuration and per ensemble
        c.seed = o.seed + 1000003ULL * (2 * i);
        c.n_steps = o.k_steps, c.n_realizations = o.k_reps, c.record_stride = o.k_stride;
        pt.k = sim::estimate_k(sim::run_measurement(c), 1.0, o.window_fraction, o.slope_tol);
        zk.push_back(pt.z), kd.push_back(pt.k.k_over_d);

        c.seed = o.seed + 1000003ULL * (2 * i + 1);
        c.n_steps = o.s_steps, c.n_realizations = o.s_reps, c.record_stride = o.s_stride;
        try {
            pt.s = sim::estimate_s_star(sim::run_measurement(c), o.plateau_slope);
            zs.push_back(pt.z), ss.push_back(pt.s->s_star);
        } catch (const RegimeError& e) {
            pt.s_error = e.what();
        }
        out.points.push_back(std::move(pt));
    }
    if (zk.size() >= 3) out.k_line = calib::fit_line(zk, kd, calib::Covariate::Z, o.base);
    if (zs.size() >= 3) out.s_line = calib::fit_line(zs, ss, calib::Covariate::QuarterRootZ, o.base);
    return out;
}

std::vector<Fig2Config> run_fig2(const Fig2Options& o) {
    std::vector<Fig2Config> out;
    for (std::size_t i = 0; i < o.t_as_primes.size(); ++i) {
        sim::SimConfig c;
        c.n_sites = o.n_sites;
        c.hop_prob = o.hop_prob;
        c.t_as_prime = o.t_as_primes[i];
        c.n_steps = std::lround(o.tF / c.F());
        c.record_stride = c.n_steps > 0 ? c.n_steps : 1;
        c.hist_steps = {c.n_steps};
        c.n_realizations = o.reps;
        c.seed = o.seed + 7919ULL * i;
        const auto res = sim::run_measurement(c);
        const auto& h = res.histograms.at(0);

        Fig2Config f;
        f.t_as_prime = c.t_as_prime;
        f.step = c.n_steps;
        f.x0 = res.x0;
        f.d_min = h.min_displacement - o.pad;
        f.d_max = h.min_displacement + static_cast<long>(h.counts.size()) - 1 + o.pad;
        f.counts.assign(f.d_max - f.d_min + 1, 0);
        for (std::size_t k = 0; k < h.counts.size(); ++k) f.counts[k + o.pad] = h.counts[k];
        f.sim_pmf = calib::normalise_counts(f.counts);
        const calib::ZConvention convs[2] = {calib::ZConvention::AsPrinted, calib::ZConvention::Halved};
        for (int k = 0; k < 2; ++k) {
            auto& th = f.theory[k];
            th.convention = convs[k];
            th.params = calib::invert_params(o.lines, c.t_as_prime, c.rho_prime(), c.F(), convs[k]);
            // time in steps: D = F per step, zeta = 1/F steps
            th.pmf = calib::theory_pmf(th.params, f.x0, static_cast<double>(f.step), f.d_min, f.d_max);
            th.divergence = calib::compare_distributions(f.sim_pmf, th.pmf);
        }
        out.push_back(std::move(f));
    }
    return out;
}

Fig3Result run_fig3(const Fig3Options& o) {
    Fig3Result out;
    out.tau = log_grid(o.tau_min, o.tau_max, o.points);
    auto add = [&](const std::string& sweep, DimensionlessSet d) {
        Fig3Curve c;
        c.sweep = sweep;
        c.params = d;
        const auto p = boundary_from_dimensionless(d, o.mode);
        const auto w = walker_from_dimensionless(d);
        c.msd = msd_grid(w, p, out.tau);
        c.dip = find_dip(out.tau, c.msd);
        out.curves.push_back(std::move(c));
    };
    for (double a : o.alphas) {
        auto d = o.base;
        d.alpha = a;
        add("alpha", d);
    }
    for (double dp : o.dprimes) {
        auto d = o.base;
        d.d_prime = dp;
        add("dprime", d);
    }
    return out;
}

}  // namespace territory::exp
