#include "territory/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numeric>

#include <omp.h>

#include "territory/errors.hpp"
#include "territory/grid.hpp"
#include "territory/rng.hpp"

namespace territory::sim {

namespace {

constexpr long kBlock = 16;  // replicas per accumulation block

inline int wrap(long x, int n) {
    const long r = x % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Sums {
    // per record index: left, right, lambda, centroid, sep, sep^2, cen, cen^2, bnd
    std::vector<std::array<double, 9>> rows;
    std::vector<std::map<long, long>> hist;
};

void ols(const std::vector<double>& x, const std::vector<double>& y, std::size_t lo, std::size_t hi, double& slope) {
    const double n = static_cast<double>(hi - lo);
    double mx = 0, my = 0;
    for (std::size_t i = lo; i < hi; ++i) mx += x[i], my += y[i];
    mx /= n, my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = lo; i < hi; ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
    slope = sxx > 0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

void require_series(const std::vector<double>& t, const std::vector<double>& v, const char* who) {
    if (t.size() != v.size()) throw DomainError(std::string(who) + ": time and value arrays differ in length");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw DomainError(std::string(who) + ": times must be strictly increasing");
}

}  // namespace

void SimConfig::validate() const {
    if (n_sites < 20 || n_sites % 2 != 0) throw DomainError("n_sites must be even and at least 20");
    if (!(hop_prob >= 0.0 && hop_prob <= 1.0)) throw DomainError("hop_prob must lie in [0, 1]");
    if (!(t_as_prime > 0.0) || !std::isfinite(t_as_prime)) throw DomainError("t_as_prime must be positive");
    if (n_steps < 0) throw DomainError("n_steps must be non-negative");
    if (n_realizations < 1) throw DomainError("n_realizations must be positive");
    if (record_stride < 1) throw DomainError("record_stride must be positive");
    for (long h : hist_steps)
        if (h < 0 || h > n_steps) throw DomainError("histogram step outside [0, n_steps]");
    (void)t_as_steps();
}

long SimConfig::t_as_steps() const {
    // hop_prob = 0 has no transfer rate; T_AS' is then read directly in steps
    const double steps = hop_prob > 0.0 ? t_as_prime / F() : t_as_prime;
    if (steps > 4.0e18) return std::numeric_limits<long>::max() / 4;
    const long r = std::lround(steps);
    if (r < 2) throw DomainError("active scent time must be at least two steps");
    return r;
}

long Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), 0L); }

SimState init_state(const SimConfig& cfg) {
    cfg.validate();
    const int n = cfg.n_sites, h = n / 2;
    const long tas = cfg.t_as_steps();
    SimState s;
    s.stamp.assign(n, 0);
    s.owner.assign(n, 0);
    // distance from the territory centre, 0 at the central site (pair) and 1 at the border
    const double centre = 0.5 * (h - 1), d_min = h % 2 == 0 ? 0.5 : 0.0, radius = centre - d_min;
    for (int w = 0; w < 2; ++w) {
        for (int i = 0; i < h; ++i) {
            const double d = (std::abs(i - centre) - d_min) / radius;
            // age 0 at the centre, T_AS - 1 (expires next step) at the border
            const long age = std::min<long>(tas - 1, static_cast<long>(std::floor((tas - 1) * d + 1e-9)));
            s.stamp[w * h + i] = -age;
            s.owner[w * h + i] = static_cast<std::uint8_t>(w);
        }
        s.pos[w] = w * h + h / 2;
        s.unwrapped[w] = s.pos[w];
    }
    s.t = 0;
    return s;
}

bool is_active(const SimState& s, const SimConfig& cfg, int site) { return s.t - s.stamp[site] < cfg.t_as_steps(); }

void step(SimState& s, const SimConfig& cfg, std::mt19937_64& rng) {
    const int n = cfg.n_sites;
    const long tas = cfg.t_as_steps();
    const long t = s.t + 1;
    const int first = static_cast<int>(rng() >> 63);
    for (int k = 0; k < 2; ++k) {
        const int me = k == 0 ? first : 1 - first;
        const double u = unit_draw(rng);
        if (u < cfg.hop_prob) {
            const int dir = u < 0.5 * cfg.hop_prob ? -1 : 1;
            const int target = wrap(s.pos[me] + dir, n);
            const bool foreign = s.owner[target] != me && t - s.stamp[target] < tas;
            if (!foreign) {
                s.pos[me] = target;
                s.unwrapped[me] += dir;
            }
        }
        s.stamp[s.pos[me]] = t;
        s.owner[s.pos[me]] = static_cast<std::uint8_t>(me);
    }
    s.t = t;
}

Boundaries boundaries(const SimState& s, const SimConfig& cfg, int focal) {
    const int n = cfg.n_sites;
    const long tas = cfg.t_as_steps();
    auto own = [&](int site) { return s.owner[site] == focal && s.t - s.stamp[site] < tas; };
    auto foreign = [&](int site) { return s.owner[site] != focal && s.t - s.stamp[site] < tas; };
    const int p = s.pos[focal];
    const double u = static_cast<double>(s.unwrapped[focal]);
    double edge[2];
    for (int side = 0; side < 2; ++side) {
        const int dir = side == 0 ? -1 : 1;
        int k = 1;
        while (k < n && own(wrap(p + dir * k, n))) ++k;
        const int last_own = k - 1;
        while (k < n && !foreign(wrap(p + dir * k, n))) ++k;
        if (k >= n) throw std::logic_error("boundaries: no active foreign site on the ring");
        edge[side] = u + dir * 0.5 * (last_own + k);
    }
    return {edge[0], edge[1]};
}

std::string check_invariants(const SimState& s, const SimConfig& cfg) {
    const int n = cfg.n_sites;
    const long tas = cfg.t_as_steps();
    for (int w = 0; w < 2; ++w) {
        auto own = [&](int site) { return s.owner[site] == w && s.t - s.stamp[site] < tas; };
        const int p = s.pos[w];
        if (!own(p)) return "walker " + std::to_string(w) + " is not on its own active scent";
        long count = 0;
        for (int i = 0; i < n; ++i) count += own(i);
        long arc = 1;
        for (int k = 1; k < n && own(wrap(p + k, n)); ++k) ++arc;
        for (int k = 1; k < n && own(wrap(p - k, n)); ++k) ++arc;
        if (arc != count) return "walker " + std::to_string(w) + " territory is not a contiguous arc";
    }
    if (s.pos[0] == s.pos[1]) return "walkers share a site";
    return {};
}

SimResult run_measurement(const SimConfig& cfg, bool parallel) {
    cfg.validate();
    if (static_cast<double>(cfg.n_steps) * cfg.n_realizations > static_cast<double>(cfg.max_walker_steps))
        throw ResourceError("simulation exceeds the walker-step cap (" + std::to_string(cfg.max_walker_steps) + ")");

    SimResult res;
    res.cfg = cfg;
    for (long t = 0; t <= cfg.n_steps; t += cfg.record_stride) res.steps.push_back(t);
    if (res.steps.back() != cfg.n_steps) res.steps.push_back(cfg.n_steps);
    std::vector<long> hist_steps = cfg.hist_steps;
    std::sort(hist_steps.begin(), hist_steps.end());
    hist_steps.erase(std::unique(hist_steps.begin(), hist_steps.end()), hist_steps.end());

    const SimState start = init_state(cfg);
    const Boundaries b0 = boundaries(start, cfg, 0);
    res.x0 = static_cast<double>(start.unwrapped[0]) - b0.centroid();
    const double L = cfg.L();
    const std::size_t nrec = res.steps.size();
    const long nblocks = (cfg.n_realizations + kBlock - 1) / kBlock;
    std::vector<Sums> blocks(nblocks);
    // invariants are asserted on every step in debug builds, on the record stride otherwise
#ifdef NDEBUG
    constexpr bool kCheckEveryStep = false;
#else
    constexpr bool kCheckEveryStep = true;
#endif

    auto run_block = [&](long blk) {
        Sums& acc = blocks[blk];
        acc.rows.assign(nrec, {});
        acc.hist.assign(hist_steps.size(), {});
        for (long rep = blk * kBlock; rep < std::min(cfg.n_realizations, (blk + 1) * kBlock); ++rep) {
            auto rng = stream_rng(cfg.seed, static_cast<std::uint64_t>(rep));
            SimState s = start;
            std::size_t ri = 0, hi = 0;
            for (long t = 0;; ++t) {
                if (hi < hist_steps.size() && hist_steps[hi] == t) {
                    ++acc.hist[hi][s.unwrapped[0] - start.unwrapped[0]];
                    ++hi;
                }
                if (ri < nrec && res.steps[ri] == t) {
                    if (const auto bad = check_invariants(s, cfg); !bad.empty())
                        throw std::logic_error("invariant violated at step " + std::to_string(t) + ": " + bad);
                    const Boundaries b = boundaries(s, cfg, 0);
                    const double sep = (b.separation() - L) * (b.separation() - L);
                    const double dc = b.centroid() - b0.centroid();
                    const double bnd = 0.5 * ((b.left - b0.left) * (b.left - b0.left) +
                                              (b.right - b0.right) * (b.right - b0.right));
                    auto& row = acc.rows[ri];
                    row[0] += b.left, row[1] += b.right, row[2] += b.separation(), row[3] += b.centroid();
                    row[4] += sep, row[5] += sep * sep, row[6] += dc * dc, row[7] += dc * dc * dc * dc;
                    row[8] += bnd;
                    ++ri;
                } else if (kCheckEveryStep && t > 0) {
                    if (const auto bad = check_invariants(s, cfg); !bad.empty())
                        throw std::logic_error("invariant violated at step " + std::to_string(t) + ": " + bad);
                }
                if (t == cfg.n_steps) break;
                step(s, cfg, rng);
            }
        }
    };

    if (parallel) {
        std::exception_ptr err;
        const int threads = kernel_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads > 0 ? threads : omp_get_max_threads())
        for (long blk = 0; blk < nblocks; ++blk) {
            try {
                run_block(blk);
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
    } else {
        for (long blk = 0; blk < nblocks; ++blk) run_block(blk);
    }

    // combine in block order so the result does not depend on scheduling
    std::vector<std::array<double, 9>> tot(nrec, std::array<double, 9>{});
    std::vector<std::map<long, long>> hist(hist_steps.size());
    for (const auto& blk : blocks) {
        for (std::size_t i = 0; i < nrec; ++i)
            for (int j = 0; j < 9; ++j) tot[i][j] += blk.rows[i][j];
        for (std::size_t h = 0; h < hist.size(); ++h)
            for (const auto& [d, c] : blk.hist[h]) hist[h][d] += c;
    }
    const double nr = static_cast<double>(cfg.n_realizations);
    auto se = [&](double s1, double s2) {
        if (cfg.n_realizations < 2) return 0.0;
        const double m = s1 / nr;
        const double var = std::max(0.0, (s2 / nr - m * m) * nr / (nr - 1.0));
        return std::sqrt(var / nr);
    };
    for (std::size_t i = 0; i < nrec; ++i) {
        const auto& r = tot[i];
        res.mean_left.push_back(r[0] / nr);
        res.mean_right.push_back(r[1] / nr);
        res.mean_lambda.push_back(r[2] / nr);
        res.mean_centroid.push_back(r[3] / nr);
        res.sep_msd.push_back(r[4] / nr);
        res.sep_msd_se.push_back(se(r[4], r[5]));
        res.centroid_msd.push_back(r[6] / nr);
        res.centroid_msd_se.push_back(se(r[6], r[7]));
        res.boundary_msd.push_back(r[8] / nr);
    }
    for (std::size_t h = 0; h < hist.size(); ++h) {
        Histogram out;
        out.step = hist_steps[h];
        if (!hist[h].empty()) {
            out.min_displacement = hist[h].begin()->first;
            out.counts.assign(hist[h].rbegin()->first - out.min_displacement + 1, 0);
            for (const auto& [d, c] : hist[h]) out.counts[d - out.min_displacement] = c;
        }
        res.histograms.push_back(std::move(out));
    }
    return res;
}

KEstimate estimate_k(const std::vector<double>& tF, const std::vector<double>& msd, double gauge_c,
                     double window_fraction, double slope_tol) {
    require_series(tF, msd, "estimate_k");
    if (!(gauge_c > 0.0)) throw DomainError("estimate_k: gauge constant must be positive");
    if (!(window_fraction > 0.0 && window_fraction <= 1.0)) throw DomainError("estimate_k: window fraction in (0, 1]");
    std::vector<double> lt, lm, t, m;
    for (std::size_t i = 0; i < tF.size(); ++i)
        if (tF[i] > 0.0 && msd[i] > 0.0) {
            t.push_back(tF[i]), m.push_back(msd[i]);
            lt.push_back(std::log(tF[i])), lm.push_back(std::log(msd[i]));
        }
    if (t.size() < 3) throw DomainError("estimate_k: fewer than three positive points");
    const double log_lo = lt.back() - window_fraction * (lt.back() - lt.front());
    std::size_t lo = 0;
    while (lo < t.size() && lt[lo] < log_lo - 1e-12) ++lo;
    const std::size_t hi = t.size();
    if (hi - lo < 3) throw DomainError("estimate_k: fewer than three points in the fit window");

    KEstimate k;
    k.gauge_c = gauge_c;
    k.t_lo = t[lo], k.t_hi = t[hi - 1], k.points = hi - lo;
    double num = 0, den = 0;
    for (std::size_t i = lo; i < hi; ++i) {
        const double g = std::sqrt(gauge_c * t[i]);
        num += m[i] * g, den += g * g;
    }
    k.k_over_d = num / den;
    ols(lt, lm, lo, hi, k.loglog_slope);
    const std::size_t chunks = std::min<std::size_t>(8, (hi - lo) / 3);
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t a = lo + c * (hi - lo) / chunks, b = lo + (c + 1) * (hi - lo) / chunks;
        double s;
        ols(lt, lm, a, b, s);
        k.slope_trace.push_back(s);
    }
    if (slope_tol > 0.0 && !(std::abs(k.loglog_slope - 0.5) <= slope_tol))
        throw RegimeError("estimate_k: centroid MSD exponent " + std::to_string(k.loglog_slope) +
                              " is not near 1/2; asymptotic regime not reached",
                          k.slope_trace);
    return k;
}

KEstimate estimate_k(const SimResult& res, double gauge_c, double window_fraction, double slope_tol) {
    std::vector<double> tF(res.steps.size());
    for (std::size_t i = 0; i < tF.size(); ++i) tF[i] = res.tF(i);
    return estimate_k(tF, res.centroid_msd, gauge_c, window_fraction, slope_tol);
}

SStarEstimate estimate_s_star(const std::vector<double>& tF, const std::vector<double>& sep, double L,
                              double slope_threshold) {
    require_series(tF, sep, "estimate_s_star");
    if (!(L > 0.0)) throw DomainError("estimate_s_star: L must be positive");
    if (tF.empty() || !(tF.back() > 0.0)) throw DomainError("estimate_s_star: empty record");
    const double t_lo = 0.1 * tF.back();
    std::vector<double> lt, ls, v;
    for (std::size_t i = 0; i < tF.size(); ++i)
        if (tF[i] >= t_lo && tF[i] > 0.0) {
            if (!(sep[i] > 0.0)) continue;
            lt.push_back(std::log(tF[i])), ls.push_back(std::log(sep[i])), v.push_back(sep[i]);
        }
    SStarEstimate out{};
    out.points = v.size();
    if (v.empty()) {
        // boundaries never moved in the last decade
        bool all_zero = true;
        for (std::size_t i = 0; i < tF.size(); ++i)
            if (tF[i] >= t_lo && sep[i] != 0.0) all_zero = false;
        if (!all_zero) throw DomainError("estimate_s_star: negative separation MSD");
        return out;
    }
    if (v.size() < 3) throw DomainError("estimate_s_star: fewer than three points in the last decade");
    ols(lt, ls, 0, lt.size(), out.loglog_slope);
    if (!(std::abs(out.loglog_slope) < slope_threshold))
        throw RegimeError("estimate_s_star: separation MSD still growing (log-log slope " +
                              std::to_string(out.loglog_slope) + ")",
                          {out.loglog_slope});
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= std::max<double>(1.0, static_cast<double>(v.size()) - 1.0);
    out.s_star = mean / (L * L);
    out.std_error = std::sqrt(var / static_cast<double>(v.size())) / (L * L);
    return out;
}

SStarEstimate estimate_s_star(const SimResult& res, double slope_threshold) {
    std::vector<double> tF(res.steps.size());
    for (std::size_t i = 0; i < tF.size(); ++i) tF[i] = res.tF(i);
    return estimate_s_star(tF, res.sep_msd, res.cfg.L(), slope_threshold);
}

}  // namespace territory::sim
