#include "territory/asymptotics.hpp"

#include <cmath>
#include <string>

#include "territory/errors.hpp"
#include "territory/grid.hpp"
#include "territory/special_functions.hpp"

namespace territory {

double v_alpha(double alpha, double tau) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("v_alpha: alpha must lie in (0, 1]");
    if (!(tau > 0.0)) throw DomainError("v_alpha: tau must be positive");
    return std::pow(tau, 1.0 - alpha) * constant_gamma_kernel(alpha, tau) / alpha;
}

VAlphaMax v_alpha_max(double alpha) {
    // coarse scan in log tau, then golden section around the best cell
    const double lo = std::log(1e-4), hi = std::log(1e4);
    const int n = 160;
    int best = 0;
    double best_v = -1.0;
    for (int i = 0; i <= n; ++i) {
        const double v = v_alpha(alpha, std::exp(lo + (hi - lo) * i / n));
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    if (best == 0 || best == n) return {std::exp(lo + (hi - lo) * best / n), best_v};
    double a = lo + (hi - lo) * (best - 1) / n, b = lo + (hi - lo) * (best + 1) / n;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = v_alpha(alpha, std::exp(x1)), f2 = v_alpha(alpha, std::exp(x2));
    while (b - a > 1e-9) {
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = v_alpha(alpha, std::exp(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = v_alpha(alpha, std::exp(x2));
        }
    }
    const double x = 0.5 * (a + b);
    return {std::exp(x), v_alpha(alpha, std::exp(x))};
}

Alpha0Result alpha0_threshold(double tol) {
    double lo = 0.01, hi = 0.5;
    const double g_lo = v_alpha_max(lo).value - 2.0, g_hi = v_alpha_max(hi).value - 2.0;
    if (!(g_lo > 0.0 && g_hi < 0.0))
        throw BracketError("alpha0_threshold: max v_alpha - 2 does not change sign on [0.01, 0.5] (values " +
                           std::to_string(g_lo) + ", " + std::to_string(g_hi) + ")");
    int it = 0;
    while (hi - lo > tol && it < 200) {
        const double mid = 0.5 * (lo + hi);
        if (v_alpha_max(mid).value - 2.0 > 0.0)
            lo = mid;
        else
            hi = mid;
        ++it;
    }
    const double a0 = 0.5 * (lo + hi);
    return {a0, lo, hi, v_alpha_max(a0).tau_star, it};
}

double d_eff_separation(double alpha, double gamma_t) {
    if (!(gamma_t >= 0.0)) throw DomainError("d_eff: time must be non-negative");
    return std::tgamma(alpha) * special::mittag_leffler_1a(alpha, -2.0 * gamma_t) / 3.0;
}

double d_eff(const BoundaryParams& p, double t) {
    p.validate();
    if (p.mode != GammaMode::Constant)
        throw UnsupportedError("d_eff is derived for constant gamma only");
    return p.K * phi_at(p.phi, t) * (1.0 + d_eff_separation(p.phi.alpha, p.gamma * t));
}

double asymptotic_a(const BoundaryParams& p, double t) {
    const auto m = moments_at(p, t);
    return 1.0 + m.b / (2.0 * p.L * p.L) + 6.0 * m.c / (p.L * p.L);
}

double f_ratio(const WalkerParams& w, const BoundaryParams& p, double t) {
    if (!(t > 0.0)) throw DomainError("f_ratio: t must be positive");
    const auto m = moments_at(p, t);
    return (m.c + w.w(t)) / m.b;
}

std::optional<Dip> find_dip(std::span<const double> times, std::span<const double> values, double rel_floor) {
    if (times.size() != values.size()) throw DomainError("find_dip: size mismatch");
    // compressed sign sequence of the non-flat differences, with the index where each run starts
    int state = 0;  // 0: look for +, 1: seen +, 2: seen + then -
    std::size_t i_max = 0, i_min = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double d = values[i] - values[i - 1];
        const double floor = rel_floor * std::max(std::abs(values[i]), std::abs(values[i - 1]));
        if (std::abs(d) <= floor) continue;
        const int s = d > 0 ? 1 : -1;
        if (state == 0 && s > 0) state = 1;
        else if (state == 1 && s < 0) {
            state = 2;
            i_max = i - 1;
        } else if (state == 2 && s > 0) {
            i_min = i - 1;
            return Dip{times[i_max], times[i_min], i_max, i_min, values[i_max] - values[i_min]};
        }
    }
    return std::nullopt;
}

std::optional<Dip> dip_detect(const WalkerParams& w, const BoundaryParams& p, std::span<const double> grid) {
    if (grid.size() < 100) throw DomainError("dip_detect: need at least 100 grid points");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw DomainError("dip_detect: grid must be strictly increasing");
    const auto msd = msd_grid(w, p, grid);
    return find_dip(grid, msd);
}

std::vector<double> log_grid(double a, double b, std::size_t n) {
    if (!(a > 0.0 && b > a && n >= 2)) throw DomainError("log_grid: need 0 < a < b and n >= 2");
    std::vector<double> g(n);
    const double la = std::log(a), lb = std::log(b);
    for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(la + (lb - la) * double(i) / double(n - 1));
    g.front() = a;
    g.back() = b;
    return g;
}

}  // namespace territory
