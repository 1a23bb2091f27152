#include "territory/special_functions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace territory::special {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = std::numbers::pi;

// Crossover between the resummed Poisson-weight series and the large-|z|
// expansion of E_{1,alpha}; at 40 the neglected terms are below 1e-16.
constexpr double kMittagLefflerAsymptotic = 40.0;

using Poly = std::vector<double>;

// Numerators N_r with Li_{-r}(z) = N_r(z) / (1 - z)^(r+1).
std::vector<Poly> build_polylog_numerators() {
    std::vector<Poly> out(kRationalMaxOrder + 1);
    out[0] = {0.0, 1.0};
    for (int r = 0; r < kRationalMaxOrder; ++r) {
        const Poly& n = out[r];
        // N_{r+1} = z [ (1 - z) N_r' + (r + 1) N_r ]
        Poly next(n.size() + 1, 0.0);
        for (std::size_t i = 0; i < n.size(); ++i) {
            if (i > 0) {
                next[i] += i * n[i];      // z * N' contributes i c_i z^i
                next[i + 1] -= i * n[i];  // -z^2 N'
            }
            next[i + 1] += (r + 1) * n[i];
        }
        out[r + 1] = std::move(next);
    }
    return out;
}

// Numerators P_r with sum_n (2n+1)^r z^n = P_r(z) / (1 - z)^(r+1).
std::vector<Poly> build_lerch_numerators() {
    std::vector<Poly> out(kRationalMaxOrder + 1);
    out[0] = {1.0};
    for (int r = 0; r < kRationalMaxOrder; ++r) {
        const Poly& p = out[r];
        // P_{r+1} = 2z(1-z) P' + 2(r+1) z P + (1-z) P
        Poly next(p.size() + 1, 0.0);
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (i > 0) {
                next[i] += 2.0 * i * p[i];
                next[i + 1] -= 2.0 * i * p[i];
            }
            next[i + 1] += 2.0 * (r + 1) * p[i];
            next[i] += p[i];
            next[i + 1] -= p[i];
        }
        out[r + 1] = std::move(next);
    }
    return out;
}

const std::vector<Poly>& polylog_numerators() {
    static const std::vector<Poly> table = build_polylog_numerators();
    return table;
}

const std::vector<Poly>& lerch_numerators() {
    static const std::vector<Poly> table = build_lerch_numerators();
    return table;
}

struct Evaluated {
    double value;
    double rel_err;
};

Evaluated horner(const Poly& p, double z) {
    double v = 0.0, mag = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
        v = v * z + *it;
        mag = mag * std::abs(z) + std::abs(*it);
    }
    const double rel = v == 0.0 ? 0.0 : 2.0 * p.size() * kEps * mag / std::abs(v);
    return {v, rel};
}

LogValue from_value(double v, double rel_err) {
    if (v == 0.0) return {0.0, 0, 0.0};
    return {std::log(std::abs(v)), v > 0 ? 1 : -1, rel_err};
}

double dilog_negative(double z) {
    // z in [-1, 0]
    auto direct = [](double x) {
        double sum = 0.0, power = 1.0;
        for (int n = 1; n < 400; ++n) {
            power *= x;
            const double term = power / (double(n) * n);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    };
    if (z >= -0.5) return direct(z);
    const double w = z / (z - 1.0);
    const double l = std::log1p(-z);
    return -direct(w) - 0.5 * l * l;
}

// sum_{n>=n0} (-1)^(n - n0) (n + shift)^r exp(-u (n + shift)), log form.
// Li_{-r}(-e^{-u}) = -S(n0=1, shift=0); e^{-u/2} Phi(-e^{-u}, -r, 1/2) = S(n0=0, shift=1/2).
LogValue alternating_direct(int r, double u, double shift, int sign_first, long max_terms) {
    const double peak = std::max(r / u, 1.0);
    const double ref = r * std::log(peak) - u * peak;
    double sum = 0.0, abs_sum = 0.0;
    double max_log = std::abs(ref);
    int sign = sign_first;
    const long start = shift > 0.0 ? 0 : 1;
    long n = start;
    for (; n < start + max_terms; ++n, sign = -sign) {
        const double x = n + shift;
        const double l = r * std::log(x) - u * x;
        const double t = std::exp(l - ref);
        sum += sign * t;
        abs_sum += t;
        max_log = std::max(max_log, std::abs(l));
        if (x > peak && l - ref < -46.0) break;
    }
    if (n >= start + max_terms || sum == 0.0)
        return {0.0, sum == 0.0 ? 0 : 1, std::numeric_limits<double>::infinity()};
    const double rel = 4.0 * kEps * (abs_sum / std::abs(sum)) + 4.0 * kEps * max_log;
    return {ref + std::log(std::abs(sum)), sum > 0 ? 1 : -1, rel};
}

// Pole (Fourier) expansion: 2 r! sum_j w_j^{-(r+1)} evaluated through its
// real part (polylog) or imaginary part with alternating sign (Lerch).
LogValue pole_expansion(int r, double u, bool lerch) {
    const double p = r + 1.0;
    const double l1 = 0.5 * std::log(u * u + kPi * kPi);
    double sum = 0.0, abs_sum = 0.0, last = 0.0;
    int j = 1;
    constexpr int kMaxPoles = 2000000;
    for (; j < kMaxPoles; ++j) {
        const double im = kPi * (2.0 * j - 1.0);
        const double lj = 0.5 * std::log(u * u + im * im);
        const double weight = std::exp(-p * (lj - l1));
        const double phase = p * std::atan2(im, u);
        double t;
        if (lerch)
            t = (j % 2 == 1 ? 1.0 : -1.0) * weight * std::sin(phase);
        else
            t = weight * std::cos(phase);
        sum += t;
        abs_sum += weight;
        last = weight;
        if (weight < 1e-18 * abs_sum) break;
    }
    if (sum == 0.0 || j >= kMaxPoles) return {0.0, 1, std::numeric_limits<double>::infinity()};
    const double phase_err = kEps * p * kPi;
    const double rel = (4.0 * kEps + phase_err) * abs_sum / std::abs(sum) +
                       (last * j / p) / std::abs(sum) + 4.0 * kEps * std::lgamma(p);
    return {std::log(2.0) + std::lgamma(p) - p * l1 + std::log(std::abs(sum)), sum > 0 ? 1 : -1, rel};
}

LogValue best_of(const LogValue& a, const LogValue& b) { return a.rel_err <= b.rel_err ? a : b; }

LogValue large_order(int r, double u, bool lerch) {
    LogValue pole = pole_expansion(r, u, lerch);
    const double estimated_terms = r / u + std::sqrt(92.0 * r) / u + 64.0;
    if (estimated_terms < 4.0e6) {
        LogValue direct = lerch ? alternating_direct(r, u, 0.5, 1, 4000000)
                                : alternating_direct(r, u, 0.0, -1, 4000000);
        return best_of(pole, direct);
    }
    return pole;
}

}  // namespace

double LogValue::value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

double mittag_leffler_1a(double alpha, double z, const SeriesControl& ctl) {
    ctl.validate();
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("mittag_leffler_1a: alpha must lie in (0, 1]");
    if (!(z <= 0.0)) throw DomainError("mittag_leffler_1a: argument must be <= 0");
    if (alpha == 1.0) return std::exp(z);
    const double x = -z;
    const double gamma_alpha = std::tgamma(alpha);

    if (x <= 1.0) {
        // Defining series; at |z| <= 1 the alternating terms do not cancel.
        double coef = 1.0 / gamma_alpha, power = 1.0, sum = coef;
        ConvergenceTracker conv(ctl.rel_tol);
        for (long n = 0; n < ctl.max_terms; ++n) {
            coef /= (n + alpha);
            power *= z;
            const double term = coef * power;
            sum += term;
            if (conv.update(term, sum)) return sum;
        }
        throw SeriesError("mittag_leffler_1a: defining series did not converge", sum, ctl.max_terms);
    }

    if (x <= kMittagLefflerAsymptotic) {
        // E = [e^{-x} - (1-alpha) sum_{n>=1} Pois(n; x) / (n - 1 + alpha)] / Gamma(alpha)
        double weight = std::exp(-x);
        double sum = 0.0;
        ConvergenceTracker conv(ctl.rel_tol);
        for (long n = 1; n < ctl.max_terms; ++n) {
            weight *= x / n;
            const double term = weight / (n - 1.0 + alpha);
            sum += term;
            if (n > x && conv.update(term, sum)) return (std::exp(-x) - (1.0 - alpha) * sum) / gamma_alpha;
        }
        throw SeriesError("mittag_leffler_1a: Poisson-weighted series did not converge", sum, ctl.max_terms);
    }

    // Large |z|: algebraic tail plus the exponentially small Stokes term.
    double term = 1.0, sum = 0.0, previous = std::numeric_limits<double>::infinity();
    for (long k = 1; k < ctl.max_terms; ++k) {
        term *= (k - alpha) / x;
        if (std::abs(term) > previous) break;  // optimal truncation of the asymptotic series
        sum += term;
        previous = std::abs(term);
        if (std::abs(term) < ctl.rel_tol * std::abs(sum)) break;
    }
    return -std::cos(kPi * alpha) * std::pow(x, 1.0 - alpha) * std::exp(-x) - sum / gamma_alpha;
}

double polylog_int(int order, double z) {
    if (order > 2) throw DomainError("polylog_int: order must be <= 2");
    if (!(z > -1.0 && z <= 0.0)) throw DomainError("polylog_int: z must lie in (-1, 0]");
    if (z == 0.0) return 0.0;
    if (order == 2) return dilog_negative(z);
    if (order == 1) return -std::log1p(-z);
    const int r = -order;
    if (r <= kRationalMaxOrder) {
        const auto e = horner(polylog_numerators()[r], z);
        return e.value / std::pow(1.0 - z, r + 1);
    }
    return large_order(r, -std::log(-z), false).value();
}

double lerch_half(double z, int order) {
    if (order > 1) throw DomainError("lerch_half: order must be <= 1");
    if (!(z > -1.0 && z <= 0.0)) throw DomainError("lerch_half: z must lie in (-1, 0]");
    if (order == 1) {
        if (z == 0.0) return 2.0;
        const double q = std::sqrt(-z);
        return 2.0 * std::atan(q) / q;
    }
    const int r = -order;
    if (z == 0.0) return std::pow(0.5, r);
    if (r <= kRationalMaxOrder) {
        const auto e = horner(lerch_numerators()[r], z);
        return std::ldexp(e.value, -r) / std::pow(1.0 - z, r + 1);
    }
    const double u = -std::log(-z);
    const LogValue scaled = large_order(r, u, true);
    return scaled.sign * std::exp(scaled.log_abs + 0.5 * u);
}

LogValue polylog_neg_exp(int order, double u) {
    if (order > 2) throw DomainError("polylog_neg_exp: order must be <= 2");
    if (!(u > 0.0)) throw DomainError("polylog_neg_exp: u must be positive");
    const double e = std::exp(-u);
    if (order == 2) return from_value(dilog_negative(-e), 8 * kEps);
    if (order == 1) return from_value(-std::log1p(e), 2 * kEps);
    const int r = -order;
    if (e == 0.0 || u > 700.0) {
        // Li_{-r}(z) ~ z (1 + 2^r z + ...): first term of the direct series.
        return alternating_direct(r, u, 0.0, -1, 4000000);
    }
    if (r <= kRationalMaxOrder) {
        const auto ev = horner(polylog_numerators()[r], -e);
        const double v = ev.value / std::pow(1.0 + e, r + 1);
        const LogValue rational = from_value(v, ev.rel_err + 2.0 * (r + 1) * kEps);
        if (rational.rel_err < 1e-13) return rational;
        return best_of(rational, alternating_direct(r, u, 0.0, -1, 4000000));
    }
    return large_order(r, u, false);
}

LogValue lerch_half_neg_exp_scaled(int order, double u) {
    if (order > 1) throw DomainError("lerch_half_neg_exp_scaled: order must be <= 1");
    if (!(u > 0.0)) throw DomainError("lerch_half_neg_exp_scaled: u must be positive");
    const double q = std::exp(-0.5 * u);
    if (order == 1) return from_value(2.0 * std::atan(q), 2 * kEps);
    const int r = -order;
    if (q == 0.0 || u > 700.0) return alternating_direct(r, u, 0.5, 1, 4000000);
    if (r <= kRationalMaxOrder) {
        const double e = q * q;
        const auto ev = horner(lerch_numerators()[r], -e);
        const double v = q * std::ldexp(ev.value, -r) / std::pow(1.0 + e, r + 1);
        const LogValue rational = from_value(v, ev.rel_err + 2.0 * (r + 1) * kEps);
        if (rational.rel_err < 1e-13) return rational;
        return best_of(rational, alternating_direct(r, u, 0.5, 1, 4000000));
    }
    return large_order(r, u, true);
}

double bessel_theta(int m, double z) {
    if (m < 0) throw DomainError("bessel_theta: m must be non-negative");
    if (!(z >= 0.0)) throw DomainError("bessel_theta: z must be non-negative");
    if (m > kBesselThetaMaxOrder)
        throw DomainError("bessel_theta: order exceeds the overflow-safe cap of " +
                          std::to_string(kBesselThetaMaxOrder));
    constexpr int kHornerMax = 20;
    if (m <= kHornerMax) {
        // Coefficient of z^k: 2^(k-m) (2m-k)! / ((m-k)! k!), built by ratios.
        static const auto table = [] {
            std::array<std::array<long double, kHornerMax + 1>, kHornerMax + 1> c{};
            for (int mm = 0; mm <= kHornerMax; ++mm) {
                long double v = 1.0L;  // k = 0: (2m)! / (m! 2^m)
                for (int i = mm + 1; i <= 2 * mm; ++i) v *= i;
                v /= std::pow(2.0L, mm);
                c[mm][0] = v;
                for (int k = 0; k < mm; ++k)
                    c[mm][k + 1] = c[mm][k] * 2.0L * (mm - k) / ((2.0L * mm - k) * (k + 1.0L));
            }
            return c;
        }();
        long double v = 0.0L;
        for (int k = m; k >= 0; --k) v = v * z + table[m][k];
        return static_cast<double>(v);
    }
    // Log-domain accumulation of the defining terms.
    std::vector<double> logs(m + 1);
    double top = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= m; ++k) {
        const double lz = k == 0 ? 0.0 : (z == 0.0 ? -std::numeric_limits<double>::infinity() : k * std::log(z));
        logs[k] = (k - m) * std::log(2.0) + std::lgamma(2.0 * m - k + 1.0) - std::lgamma(m - k + 1.0) -
                  std::lgamma(k + 1.0) + lz;
        top = std::max(top, logs[k]);
    }
    double sum = 0.0;
    for (double l : logs) sum += std::exp(l - top);
    const double result = std::exp(top + std::log(sum));
    if (!std::isfinite(result))
        throw DomainError("bessel_theta: value overflows double precision (order cap " +
                          std::to_string(kBesselThetaMaxOrder) + ")");
    return result;
}

double hyp2f2(double a1, double a2, double b1, double b2, double x, const SeriesControl& ctl) {
    ctl.validate();
    if (!(x >= 0.0)) throw DomainError("hyp2f2: x must be non-negative");
    auto nonpositive_integer = [](double b) { return b <= 0.0 && b == std::floor(b); };
    if (nonpositive_integer(b1) || nonpositive_integer(b2))
        throw DomainError("hyp2f2: lower parameters must not be non-positive integers");
    double term = 1.0, sum = 1.0;
    ConvergenceTracker conv(ctl.rel_tol);
    for (long n = 0; n < ctl.max_terms; ++n) {
        term *= (a1 + n) * (a2 + n) / ((b1 + n) * (b2 + n) * (n + 1.0)) * x;
        sum += term;
        if (!std::isfinite(sum)) throw SeriesError("hyp2f2: overflow", sum, n);
        // Terms keep growing while n is below the peak; only stop past it.
        if (n > x && conv.update(term, sum)) return sum;
        if (term == 0.0) return sum;
    }
    throw SeriesError("hyp2f2: series did not converge", sum, ctl.max_terms);
}

double log_hyp2f2_positive(double a1, double a2, double b1, double b2, double x, const SeriesControl& ctl) {
    ctl.validate();
    if (!(a1 > 0 && a2 > 0 && b1 > 0 && b2 > 0)) throw DomainError("log_hyp2f2_positive: parameters must be positive");
    if (!(x >= 0.0)) throw DomainError("log_hyp2f2_positive: x must be non-negative");
    if (x == 0.0) return 0.0;
    // multiplicative recursion with occasional rescaling; accumulating logs
    // instead would lose ~sqrt(n) eps |log F| over the ~x terms
    constexpr double kRescale = 1e200;
    const double log_rescale = std::log(kRescale);
    double scale_log = 0.0, term = 1.0, sum = 1.0;
    ConvergenceTracker conv(ctl.rel_tol);
    for (long n = 0; n < ctl.max_terms; ++n) {
        term *= (a1 + n) * (a2 + n) / ((b1 + n) * (b2 + n) * (n + 1.0)) * x;
        sum += term;
        if (sum > kRescale) {
            sum /= kRescale;
            term /= kRescale;
            scale_log += log_rescale;
        }
        if (n > x && conv.update(term, sum)) return scale_log + std::log(sum);
    }
    throw SeriesError("log_hyp2f2_positive: series did not converge", scale_log + std::log(sum), ctl.max_terms);
}

}  // namespace territory::special
