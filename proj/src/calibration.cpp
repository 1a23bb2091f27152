#include "territory/calibration.hpp"

#include <cmath>

#include "territory/errors.hpp"
#include "territory/grid.hpp"

namespace territory::calib {

namespace {

double log_of(double y, LogBase b) { return b == LogBase::Ten ? std::log10(y) : std::log(y); }
double exp_of(double v, LogBase b) { return b == LogBase::Ten ? std::pow(10.0, v) : std::exp(v); }

}  // namespace

std::string to_string(ZConvention c) { return c == ZConvention::AsPrinted ? "as-printed" : "halved"; }
std::string to_string(Covariate c) { return c == Covariate::Z ? "Z" : "Z^(1/4)"; }
std::string to_string(LogBase b) { return b == LogBase::Ten ? "10" : "e"; }

ZConvention z_convention_from_string(const std::string& s) {
    if (s == "as-printed") return ZConvention::AsPrinted;
    if (s == "halved") return ZConvention::Halved;
    throw DomainError("unknown z convention '" + s + "' (expected as-printed|halved)");
}

LogBase log_base_from_string(const std::string& s) {
    if (s == "10") return LogBase::Ten;
    if (s == "e") return LogBase::E;
    throw DomainError("unknown log base '" + s + "' (expected 10|e)");
}

double compute_z(double t_as_prime, double rho_prime, ZConvention conv) {
    if (!(t_as_prime >= 0.0) || !(rho_prime >= 0.0)) throw DomainError("compute_z: arguments must be non-negative");
    const double z = t_as_prime * rho_prime * rho_prime;
    return conv == ZConvention::Halved ? 0.5 * z : z;
}

double FitLine::covariate_of(double z) const {
    if (covariate == Covariate::Z) return z;
    if (!(z >= 0.0)) throw DomainError("Z^(1/4) needs Z >= 0");
    return std::sqrt(std::sqrt(z));
}

double FitLine::predict(double z) const { return exp_of(intercept + slope * covariate_of(z), base); }

FitLine printed_k_line() { return {1.11, -0.95, Covariate::Z, LogBase::Ten, {}, 0.0, 0.0}; }
FitLine printed_s_line() { return {0.64, -2.32, Covariate::QuarterRootZ, LogBase::Ten, {}, 0.0, 0.0}; }

FitLine fit_line(const std::vector<double>& z, const std::vector<double>& y, Covariate cov, LogBase base) {
    if (z.size() != y.size()) throw DomainError("fit_line: covariate and response lengths differ");
    if (z.size() < 3) throw DomainError("fit_line: at least three points are required");
    FitLine f;
    f.covariate = cov, f.base = base;
    const std::size_t n = z.size();
    std::vector<double> x(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(y[i] > 0.0)) throw DomainError("fit_line: responses must be positive");
        x[i] = f.covariate_of(z[i]);
        v[i] = log_of(y[i], base);
    }
    double mx = 0, mv = 0;
    for (std::size_t i = 0; i < n; ++i) mx += x[i], mv += v[i];
    mx /= n, mv /= n;
    double sxx = 0, sxv = 0;
    for (std::size_t i = 0; i < n; ++i) sxx += (x[i] - mx) * (x[i] - mx), sxv += (x[i] - mx) * (v[i] - mv);
    double spread = 0;
    for (double xi : x) spread = std::max(spread, std::abs(xi - mx));
    if (!(sxx > 0.0) || spread <= 1e-13 * std::max(1.0, std::abs(mx)))
        throw DomainError("fit_line: rank-deficient design (all covariates equal)");
    f.slope = sxv / sxx;
    f.intercept = mv - f.slope * mx;
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        f.residuals.push_back(v[i] - f.intercept - f.slope * x[i]);
        rss += f.residuals.back() * f.residuals.back();
    }
    const double s2 = n > 2 ? rss / (n - 2) : 0.0;
    f.slope_se = std::sqrt(s2 / sxx);
    f.intercept_se = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
    return f;
}

Lines fit_lines(const std::vector<double>& z_k, const std::vector<double>& k_over_d, const std::vector<double>& z_s,
                const std::vector<double>& s_star, LogBase base) {
    return {fit_line(z_k, k_over_d, Covariate::Z, base), fit_line(z_s, s_star, Covariate::QuarterRootZ, base)};
}

BoundaryParams CalibratedParams::boundary() const {
    BoundaryParams p;
    p.K = K, p.gamma = gamma, p.L = L;
    p.mode = GammaMode::Subordinated;
    p.phi = {0.5, zeta};
    return p;
}

WalkerParams CalibratedParams::walker(double x0) const { return {D, x0}; }

double invert_gamma(double K, double L, double s_star, double F) {
    if (!(K > 0.0) || !(L > 0.0) || !(F > 0.0)) throw DomainError("invert_gamma: K, L, F must be positive");
    if (!(s_star > 0.0)) throw DomainError("invert_gamma: s* must be positive");
    // s*(gamma) decreases with gamma: stiffer restoring force, narrower spread
    auto g = [&](double log_gamma) {
        const double b = 4.0 * K / std::exp(log_gamma);
        return std::log(sep_msd_from_width(L, b, L) / (L * L)) - std::log(s_star);
    };
    double lo = std::log(1e-8 * F), hi = std::log(1e8 * F);
    double glo = g(lo), ghi = g(hi);
    if (!(glo >= 0.0 && ghi <= 0.0))
        throw BracketError("invert_gamma: s*/L^2 = " + std::to_string(s_star) + " outside the range reachable for gamma in [1e-8, 1e8] F");
    for (int i = 0; i < 200 && hi - lo > 1e-6; ++i) {
        const double mid = 0.5 * (lo + hi), gm = g(mid);
        if (gm > 0.0)
            lo = mid, glo = gm;
        else
            hi = mid, ghi = gm;
    }
    // secant polish inside the final bracket
    double x0 = lo, x1 = hi, f0 = glo, f1 = ghi;
    for (int i = 0; i < 60; ++i) {
        if (f1 == f0) break;
        const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (!(x2 >= lo - 1e-3 && x2 <= hi + 1e-3)) break;
        x0 = x1, f0 = f1, x1 = x2, f1 = g(x2);
        if (std::abs(x1 - x0) < 1e-15 * std::max(1.0, std::abs(x1)) || f1 == 0.0) break;
    }
    return std::exp(x1);
}

CalibratedParams invert_params(const Lines& fits, double t_as_prime, double rho_prime, double F, ZConvention conv) {
    if (!(rho_prime > 0.0) || !(F > 0.0)) throw DomainError("invert_params: rho' and F must be positive");
    CalibratedParams cp;
    cp.convention = conv;
    cp.z = compute_z(t_as_prime, rho_prime, conv);
    cp.k_over_d = fits.k.predict(cp.z);
    cp.s_star = fits.s.predict(cp.z);
    cp.F = F;
    cp.D = F;
    cp.K = cp.k_over_d * cp.D;
    cp.L = 1.0 / rho_prime;
    cp.zeta = 1.0 / F;
    cp.gamma = invert_gamma(cp.K, cp.L, cp.s_star, F);
    const double gl2 = cp.gamma * cp.L * cp.L;
    cp.reduced.k_prime = cp.K / gl2;
    cp.reduced.d_prime = cp.D / gl2;
    cp.reduced.beta = cp.gamma * cp.zeta;
    cp.reduced.alpha = 0.5;
    return cp;
}

Divergence compare_distributions(const std::vector<double>& sim, const std::vector<double>& theory) {
    if (sim.size() != theory.size()) throw DomainError("compare_distributions: support mismatch");
    if (sim.empty()) throw DomainError("compare_distributions: empty support");
    Divergence d;
    double l2 = 0;
    for (std::size_t i = 0; i < sim.size(); ++i) {
        if (!std::isfinite(sim[i]) || !std::isfinite(theory[i]) || sim[i] < 0.0 || theory[i] < 0.0)
            throw DomainError("compare_distributions: probabilities must be finite and non-negative");
        const double r = sim[i] - theory[i];
        d.residuals.push_back(r);
        d.total_variation += std::abs(r);
        l2 += r * r;
    }
    d.total_variation *= 0.5;
    d.l2 = std::sqrt(l2);
    return d;
}

std::vector<double> normalise_counts(const std::vector<long>& counts) {
    long total = 0;
    for (long c : counts) {
        if (c < 0) throw DomainError("normalise_counts: negative count");
        total += c;
    }
    if (total == 0) throw DomainError("normalise_counts: empty histogram");
    std::vector<double> p;
    for (long c : counts) p.push_back(static_cast<double>(c) / total);
    return p;
}

std::vector<double> theory_pmf(const CalibratedParams& cp, double x0, double t_steps, long d_min, long d_max) {
    if (d_max < d_min) throw DomainError("theory_pmf: empty support");
    std::vector<double> xs;
    for (long d = d_min; d <= d_max; ++d) xs.push_back(x0 + static_cast<double>(d));
    return marginal_grid(cp.walker(x0), cp.boundary(), xs, t_steps);
}

}  // namespace territory::calib
