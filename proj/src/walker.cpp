#include "territory/walker.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "territory/errors.hpp"
#include "territory/quadrature.hpp"

namespace territory {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrtPi = 1.7724538509055160273;
// exp(-46) ~ 1e-20: Gaussian factors beyond this are dropped
constexpr double kGaussCut = 46.0;

// erf(a) - erf(b) without cancellation when both arguments share a sign.
double erf_diff(double a, double b) {
    if (a > 0.0 && b > 0.0) return std::erfc(b) - std::erfc(a);
    if (a < 0.0 && b < 0.0) return std::erfc(-a) - std::erfc(-b);
    return std::erf(a) - std::erf(b);
}

// sum_k exp(-(d + 2 k lambda)^2 / w) / sqrt(pi w): the periodic heat kernel.
double periodic_images(double d, double lambda, double w, const SeriesControl& ctl) {
    const double period = 2.0 * lambda;
    const double shift = std::round(d / period);
    const double d0 = d - shift * period;
    const double norm = 1.0 / std::sqrt(kPi * w);
    double sum = std::exp(-d0 * d0 / w) * norm;
    for (long k = 1; k < ctl.max_terms; ++k) {
        const double a = d0 + k * period, b = d0 - k * period;
        const double ea = a * a / w, eb = b * b / w;
        sum += (std::exp(-ea) + std::exp(-eb)) * norm;
        if (std::min(ea, eb) > kGaussCut) return sum;
    }
    throw SeriesError("periodic image sum did not converge", sum, ctl.max_terms);
}

// The same kernel from its cosine (Poisson-resummed) form.
double periodic_cosine(double d, double lambda, double w, const SeriesControl& ctl) {
    const double rate = kPi * kPi * w / (4.0 * lambda * lambda);
    double sum = 0.5;
    for (long n = 1; n < ctl.max_terms; ++n) {
        const double e = n * n * rate;
        sum += std::cos(n * kPi * d / lambda) * std::exp(-e);
        if (e > kGaussCut) return sum / lambda;
    }
    throw SeriesError("periodic cosine sum did not converge", sum / lambda, ctl.max_terms);
}

double periodic_kernel(double d, double lambda, double w, const SeriesControl& ctl) {
    return w / (lambda * lambda) < kImageSwitch ? periodic_images(d, lambda, w, ctl)
                                                 : periodic_cosine(d, lambda, w, ctl);
}

// int_a^b (y + d)^2 N(y; 0, w/2) dy
double gaussian_second_moment(double a, double b, double d, double w) {
    const double s = std::sqrt(w);
    const double sigma2 = 0.5 * w;
    const double ea = std::isfinite(a) ? std::exp(-a * a / w) : 0.0;
    const double eb = std::isfinite(b) ? std::exp(-b * b / w) : 0.0;
    const double i0 = 0.5 * erf_diff(b / s, a / s);
    const double g = s / (2.0 * kSqrtPi);  // sigma / sqrt(2 pi)
    const double i1 = g * (ea - eb);
    const double i2 = sigma2 * i0 + g * ((std::isfinite(a) ? a * ea : 0.0) - (std::isfinite(b) ? b * eb : 0.0));
    return i2 + 2.0 * d * i1 + d * d * i0;
}

// Breakpoints for integrals against the separation law.
std::vector<double> lambda_points(const BoundaryMoments& m, std::initializer_list<double> extra = {}) {
    const double sigma = std::sqrt(0.5 * m.b);
    const double lo = std::max(0.0, m.lambda_bar - 12.0 * sigma);
    const double hi = m.lambda_bar + 12.0 * sigma;
    std::vector<double> pts{lo, hi};
    if (m.lambda_bar > lo) pts.push_back(m.lambda_bar);
    for (double e : extra)
        if (e > lo && e < hi) pts.push_back(e);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace

void WalkerParams::validate() const {
    if (!(D > 0.0) || !std::isfinite(D)) throw DomainError("walker D must be positive");
    if (!std::isfinite(x0)) throw DomainError("walker x0 must be finite");
}

WalkerParams walker_from_dimensionless(const DimensionlessSet& d, double x0) { return {d.d_prime, x0}; }

double walker_propagator(const WalkerParams& wp, double L1, double L2, double x, double t, const SeriesControl& ctl,
                         PropagatorForm form) {
    wp.validate();
    ctl.validate();
    if (!(L1 < L2)) throw DomainError("walker_propagator: need L1 < L2");
    if (!(t > 0.0)) throw DomainError("walker_propagator: t must be positive");
    if (x < L1 || x > L2) return 0.0;
    const double lambda = L2 - L1;
    const double w = wp.w(t);
    if (form == PropagatorForm::Automatic)
        form = w / (lambda * lambda) < kImageSwitch ? PropagatorForm::Images : PropagatorForm::Eigen;

    if (form == PropagatorForm::Images) {
        // direct images of x0 and of its mirror in L1, period 2 lambda
        return periodic_images(x - wp.x0, lambda, w, ctl) + periodic_images(x - 2.0 * L1 + wp.x0, lambda, w, ctl);
    }
    const double rate = kPi * kPi * w / (4.0 * lambda * lambda);
    double sum = 1.0;
    for (long n = 1; n < ctl.max_terms; ++n) {
        const double e = n * n * rate;
        sum += 2.0 * std::cos(n * kPi * (x - L1) / lambda) * std::cos(n * kPi * (wp.x0 - L1) / lambda) * std::exp(-e);
        if (e > kGaussCut) return sum / lambda;
    }
    throw SeriesError("walker_propagator: eigen-series did not converge", sum / lambda, ctl.max_terms);
}

double marginal_m(const WalkerParams& wp, const BoundaryParams& p, double x, double t, const SeriesControl& ctl) {
    wp.validate();
    ctl.validate();
    if (!(t > 0.0)) throw DomainError("marginal_m: t must be positive");
    const auto m = moments_at(p, t);
    const double w = wp.w(t), c = m.c;
    const double xs = x - m.centroid, x0s = wp.x0 - m.centroid;
    const double sc = std::sqrt(c);
    const double wc = w + 4.0 * c;
    const double swc = std::sqrt(wc);
    const double arg_den = std::sqrt(c * w * wc);

    auto integrand = [&](double lambda) {
        if (lambda <= 0.0) return 0.0;
        const double z = z_weight(m, lambda);
        if (z == 0.0) return 0.0;
        const double direct = erf_diff((xs + 0.5 * lambda) / sc, (xs - 0.5 * lambda) / sc) *
                              periodic_kernel(xs - x0s, lambda, w, ctl);
        // reflected images after the centroid integration
        const double centre = -(xs + x0s) / (2.0 * lambda) - 0.5;
        const long n0 = std::lround(centre);
        double mirror = 0.0;
        for (long k = 0; k < ctl.max_terms; ++k) {
            bool any = false;
            for (int side = 0; side < (k == 0 ? 1 : 2); ++side) {
                const long n = side == 0 ? n0 + k : n0 - k;
                const double A = xs + x0s + (2.0 * n + 1.0) * lambda;
                const double e = A * A / wc;
                if (e > kGaussCut) continue;
                any = true;
                const double up = ((xs + 0.5 * lambda) * wc - 2.0 * A * c) / arg_den;
                const double lo = ((xs - 0.5 * lambda) * wc - 2.0 * A * c) / arg_den;
                mirror += std::exp(-e) / (kSqrtPi * swc) * erf_diff(up, lo);
            }
            if (!any && k > 0) break;
        }
        return 0.5 * z * (direct + mirror);
    };
    const auto pts = lambda_points(m, {2.0 * std::abs(xs)});
    quad::Options opt;
    opt.rel_tol = 1e-11;
    opt.abs_tol = 1e-15 / p.L;
    return quad::integrate(integrand, std::span<const double>(pts), opt).value;
}

double marginal_m_direct(const WalkerParams& wp, const BoundaryParams& p, double x, double t) {
    wp.validate();
    if (!(t > 0.0)) throw DomainError("marginal_m_direct: t must be positive");
    const auto m = moments_at(p, t);
    const double sw = std::sqrt(0.5 * m.c);
    auto outer = [&](double lambda) {
        if (lambda <= 0.0) return 0.0;
        const double z = z_weight(m, lambda);
        if (z == 0.0) return 0.0;
        // box [L - lambda/2, L + lambda/2] contains x iff L in [x - lambda/2, x + lambda/2]
        const double lo = std::max(x - 0.5 * lambda, m.centroid - 12.0 * sw);
        const double hi = std::min(x + 0.5 * lambda, m.centroid + 12.0 * sw);
        if (!(hi > lo)) return 0.0;
        auto inner = [&](double centroid) {
            const double L1 = centroid - 0.5 * lambda, L2 = centroid + 0.5 * lambda;
            const double xc = std::clamp(x, L1, L2);
            return centroid_density(m, centroid) * walker_propagator(wp, L1, L2, xc, t);
        };
        quad::Options in;
        in.rel_tol = 1e-10;
        in.abs_tol = 1e-14;
        const std::array<double, 3> ip{lo, std::clamp(m.centroid, lo, hi), hi};
        return z * quad::integrate(inner, std::span<const double>(ip), in).value;
    };
    quad::Options opt;
    opt.rel_tol = 1e-9;
    opt.abs_tol = 1e-13;
    const auto pts = lambda_points(m, {2.0 * std::abs(x - m.centroid)});
    return quad::integrate(outer, std::span<const double>(pts), opt).value;
}

double msd_lambda_integral(const WalkerParams& wp, const BoundaryParams& p, double t, const SeriesControl& ctl) {
    wp.validate();
    ctl.validate();
    if (!(t > 0.0)) throw DomainError("msd_lambda_integral: t must be positive");
    const auto m = moments_at(p, t);
    const double w = wp.w(t), c = m.c, s = c + w;
    const double x0e = wp.x0 - m.centroid;
    const bool centred = x0e == 0.0;

    auto series = [&](double lambda) {
        const double l2 = lambda * lambda;
        const double even_rate = kPi * kPi * s / l2;
        const double odd_rate = 0.25 * even_rate;
        double sum = 0.0;
        ConvergenceTracker conv(ctl.rel_tol);
        const double scale = l2 / 12.0 + c;
        for (long n = 1; n < ctl.max_terms; ++n) {
            const double sign = (n % 2 == 0) ? 1.0 : -1.0;
            const double o = 2.0 * n - 1.0;
            const double e_even = std::exp(-n * n * even_rate);
            const double e_odd = std::exp(-o * o * odd_rate);
            const double even = l2 * sign / (kPi * kPi * n * n) * e_even;
            const double odd_pref = 4.0 * sign / (kPi * o) * e_odd;
            double term;
            if (centred) {
                term = even + odd_pref * c;
            } else {
                const double ph = o * kPi * x0e / lambda;
                term = even * std::cos(2.0 * n * kPi * x0e / lambda) +
                       odd_pref * (c * std::cos(ph) + 2.0 * lambda * x0e / (kPi * o) * std::sin(ph));
            }
            sum += term;
            // feed the envelope so accidental zeros of the trig factors cannot stop the sum
            const double envelope = std::abs(even) + std::abs(odd_pref) * (c + 2.0 * lambda * std::abs(x0e) / (kPi * o));
            if (conv.update(envelope, sum, scale)) return sum;
        }
        throw SeriesError("msd_lambda_integral: n-series did not converge", sum, ctl.max_terms);
    };
    auto integrand = [&](double lambda) {
        if (lambda <= 0.0) return 0.0;
        const double z = z_weight(m, lambda);
        return z == 0.0 ? 0.0 : z * series(lambda);
    };
    const double base = x0e * x0e + m.lambda_bar * m.lambda_bar / 12.0 + m.b / 24.0 + 0.5 * c;
    const auto pts = lambda_points(m);
    quad::Options opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-14 * base;
    return base + quad::integrate(integrand, std::span<const double>(pts), opt).value;
}

double conditional_msd_series(const WalkerParams& wp, double lambda, double centroid, double t,
                              const SeriesControl& ctl) {
    wp.validate();
    ctl.validate();
    if (!(lambda > 0.0)) throw DomainError("conditional_msd: lambda must be positive");
    if (!(t > 0.0)) throw DomainError("conditional_msd: t must be positive");
    const double w = wp.w(t);
    const double d = centroid - wp.x0;
    const double l2 = lambda * lambda;
    const double rate = kPi * kPi * w / (4.0 * l2);
    const double scale = l2 / 12.0 + d * d;
    double sum = 0.0;
    for (long n = 1; n < ctl.max_terms; ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        const double o = 2.0 * n - 1.0;
        const double ee = std::exp(-4.0 * n * n * rate), eo = std::exp(-o * o * rate);
        const double even = 4.0 * l2 * sign / (4.0 * n * n * kPi * kPi) * ee;
        const double odd = 8.0 * lambda * d * sign / (o * o * kPi * kPi) * eo;
        sum += even * std::cos(2.0 * n * kPi * d / lambda) + odd * std::sin(o * kPi * d / lambda);
        if (std::abs(even) + std::abs(odd) < ctl.rel_tol * scale * 1e-3 && o * o * rate > kGaussCut)
            return d * d + l2 / 12.0 + sum;
    }
    throw SeriesError("conditional_msd: cosine series did not converge", d * d + l2 / 12.0 + sum, ctl.max_terms);
}

double conditional_msd(const WalkerParams& wp, double lambda, double centroid, double t, const SeriesControl& ctl) {
    wp.validate();
    if (!(lambda > 0.0)) throw DomainError("conditional_msd: lambda must be positive");
    if (!(t > 0.0)) throw DomainError("conditional_msd: t must be positive");
    const double w = wp.w(t);
    if (w / (lambda * lambda) >= kImageSwitch) return conditional_msd_series(wp, lambda, centroid, t, ctl);
    // image form: every image is a Gaussian restricted to the box
    const double L1 = centroid - 0.5 * lambda, L2 = centroid + 0.5 * lambda;
    const double x0 = wp.x0;
    double total = 0.0;
    for (long k = 0; k < ctl.max_terms; ++k) {
        bool any = false;
        for (int side = 0; side < (k == 0 ? 1 : 2); ++side) {
            const long n = side == 0 ? k : -k;
            for (double mu : {x0 - 2.0 * n * lambda, 2.0 * L1 - x0 - 2.0 * n * lambda}) {
                const double dist = std::max({L1 - mu, mu - L2, 0.0});
                if (dist * dist / w > kGaussCut) continue;
                any = true;
                total += gaussian_second_moment(L1 - mu, L2 - mu, mu - x0, w);
            }
        }
        if (!any && k > 0) return total;
    }
    throw SeriesError("conditional_msd: image series did not converge", total, ctl.max_terms);
}

double fixed_box_msd(double D, double width, double t) {
    if (!(D > 0.0 && width > 0.0 && t >= 0.0)) throw DomainError("fixed_box_msd: invalid arguments");
    // walker at the centre of [-width/2, width/2]; only even modes survive
    const double rate = 4.0 * kPi * kPi * D * t / (width * width);
    double sum = 0.0;
    for (long j = 1; j < 100000000; ++j) {
        const double e = j * j * rate;
        const double term = ((j % 2) ? -1.0 : 1.0) / (double(j) * j) * std::exp(-e);
        sum += term;
        if (e > kGaussCut || std::abs(term) < 1e-17 * (std::abs(sum) + 1e-300) * 1e-3) break;
    }
    return width * width * (1.0 / 12.0 + sum / (kPi * kPi));
}

}  // namespace territory
