#include "territory/msd_closed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "territory/errors.hpp"
#include "territory/special_functions.hpp"

namespace territory {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_closed_setup(const WalkerParams& w, const BoundaryParams& p) {
    if (w.x0 != 0.0)
        throw UnsupportedError("closed MSD forms need x0 = 0; use the lambda-integral representation");
    if (p.initial_separation() != p.L || p.initial_centroid() != 0.0)
        throw UnsupportedError(
            "closed MSD forms need the default initial boundary state; use the lambda-integral representation");
}

// int_c^inf x^k N(x; mu, sigma^2) dx for k = 0, 2
double gauss_tail0(double c, double mu, double sigma) { return 0.5 * std::erfc((c - mu) / (sigma * std::numbers::sqrt2)); }

double gauss_tail2(double c, double mu, double sigma) {
    const double h = (c - mu) / sigma;
    const double phi = std::exp(-0.5 * h * h) / std::sqrt(2.0 * kPi);
    return (mu * mu + sigma * sigma) * gauss_tail0(c, mu, sigma) + sigma * (mu + c) * phi;
}

// Bound on |int Z S1| + |int Z S2| using the first-term bound of each alternating series.
double residual_integral_bound(double L, double b, double c, double s) {
    const double sigma = std::sqrt(0.5 * b);
    const double second = L * L + 0.5 * b;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 120; ++i) {
        const double lc = L + (-6.0 + 0.25 * i) * sigma;
        if (!(lc > 0.0)) continue;
        const double low1 = std::exp(-kPi * kPi * s / (lc * lc)) * second / (kPi * kPi);
        const double low2 = 4.0 * c / kPi * std::exp(-kPi * kPi * s / (4.0 * lc * lc));
        const double high1 = (gauss_tail2(lc, L, sigma) + gauss_tail2(lc, -L, sigma)) / (kPi * kPi);
        const double high2 = 4.0 * c / kPi * (gauss_tail0(lc, L, sigma) + gauss_tail0(lc, -L, sigma));
        best = std::min(best, low1 + low2 + high1 + high2);
    }
    return best;
}

struct Accumulator {
    double sum = 0.0;
    double abs_sum = 0.0;
    double err = 0.0;
    long terms = 0;
    bool overflow = false;

    // adds sign * exp(log_abs) with a relative error estimate
    double add(int sign, double log_abs, double rel_err) {
        if (sign == 0) return 0.0;
        if (log_abs > 700.0) {
            overflow = true;
            return std::numeric_limits<double>::infinity();
        }
        const double v = std::exp(log_abs);
        sum += sign * v;
        abs_sum += v;
        err += v * rel_err;
        ++terms;
        return v;
    }
};

class LogFactorials {
public:
    double operator()(long n) {
        if (n >= static_cast<long>(table_.size())) {
            const long old = static_cast<long>(table_.size());
            table_.resize(std::max<long>(2 * n + 16, 64));
            for (long i = old; i < static_cast<long>(table_.size()); ++i) table_[i] = std::lgamma(double(i) + 1.0);
        }
        return table_[n];
    }

private:
    std::vector<double> table_;
};

// Li_{2-k}(z) and e^{-u/2} Phi(z, 1-k, 1/2) in log form, cached by k.
class OrderCache {
public:
    explicit OrderCache(double u) : u_(u) {}
    const special::LogValue& li(long k) {
        grow(k);
        return li_[k];
    }
    const special::LogValue& phi(long k) {
        grow(k);
        return phi_[k];
    }

private:
    void grow(long k) {
        while (static_cast<long>(li_.size()) <= k) {
            const long j = static_cast<long>(li_.size());
            li_.push_back(special::polylog_neg_exp(2 - static_cast<int>(j), u_));
            phi_.push_back(special::lerch_half_neg_exp_scaled(1 - static_cast<int>(j), u_));
        }
    }
    double u_;
    std::vector<special::LogValue> li_, phi_;
};

ClosedMsd finish(const ClosedParts& parts, const Accumulator& acc, double truncation, const char* name) {
    ClosedMsd r;
    r.terms = acc.terms;
    if (acc.overflow) {
        r.status = std::string(name) + ": term magnitude beyond double range";
        return r;
    }
    r.value = parts.base + acc.sum;
    r.error = acc.err + truncation + 8.0 * kEps * (std::abs(parts.base) + acc.abs_sum);
    if (!(r.error <= kClosedAccuracy * std::abs(r.value))) {
        r.status = std::string(name) + ": error estimate " + std::to_string(r.error / std::abs(r.value)) +
                   " (relative) above target";
        return r;
    }
    r.available = true;
    r.status = "ok";
    return r;
}

ClosedMsd partial_closed(const ClosedParts& parts, const SeriesControl& ctl) {
    const double y = parts.y, X = 2.0 * parts.u;
    const double m_est = y + 12.0 * std::sqrt(y) + 60.0;
    if (0.5 * m_est * m_est > kClosedCostCap) {
        ClosedMsd r;
        r.status = "partial-closed: m-series cost " + std::to_string(0.5 * m_est * m_est) + " above cap";
        return r;
    }
    const long m_cap = static_cast<long>(std::max(200.0, 2.0 * m_est));
    LogFactorials lf;
    OrderCache orders(parts.u);
    const double ly = std::log(y), lX = std::log(X);
    const double pref1 = std::log(parts.b / (4.0 * kPi * kPi)) - y;
    const double pref2 = std::log(2.0 * parts.c / kPi) - y;
    Accumulator acc;
    ConvergenceTracker conv(ctl.rel_tol);
    double envelope = 0.0;
    for (long m = 1; m <= m_cap; ++m) {
        const double head = m * ly - lf(2 * m);
        envelope = 0.0;
        for (long k = 2; k <= m + 1; ++k) {
            const auto& li = orders.li(k);
            const double parts_log = lf(2 * m + 2 - k) - lf(m + 1 - k) - lf(k) + k * lX;
            const double lg = pref1 + head + parts_log + li.log_abs;
            const double mag = std::abs(pref1) + std::abs(head) + std::abs(parts_log) + std::abs(li.log_abs);
            envelope += acc.add(li.sign, lg, li.rel_err + 4.0 * kEps * (mag + 4.0));
        }
        for (long k = 2; k <= m; ++k) {
            const auto& ph = orders.phi(k);
            const double parts_log = lf(2 * m - k) - lf(m - k) - lf(k) + k * lX;
            const double lg = pref2 + head + parts_log + ph.log_abs;
            const double mag = std::abs(pref2) + std::abs(head) + std::abs(parts_log) + std::abs(ph.log_abs);
            envelope += acc.add(-ph.sign, lg, ph.rel_err + 4.0 * kEps * (mag + 4.0));
        }
        if (acc.overflow) break;
        if (m > y && conv.update(envelope, acc.sum, std::abs(parts.base))) return finish(parts, acc, 3.0 * envelope, "partial-closed");
    }
    if (acc.overflow) return finish(parts, acc, 0.0, "partial-closed");
    ClosedMsd r;
    r.terms = acc.terms;
    r.status = "partial-closed: m-series not converged after " + std::to_string(m_cap) + " terms";
    return r;
}

ClosedMsd single_sum_2f2(const ClosedParts& parts, const SeriesControl& ctl) {
    const double y = parts.y, X = 2.0 * parts.u;
    const double lX = std::log(X), ly = std::log(y);
    const double peak = std::sqrt(X * y);
    const long k_safe = static_cast<long>(10.0 + 2.0 * peak);
    const double per_k = 2.0 * y + 200.0;
    const long k_cap = std::max<long>(4 * k_safe, 400);
    if (per_k * k_safe > kClosedCostCap) {
        ClosedMsd r;
        r.status = "2F2 sum: cost " + std::to_string(per_k * k_safe) + " above cap";
        return r;
    }
    SeriesControl hyp = ctl;
    hyp.max_terms = std::max<long>(ctl.max_terms, static_cast<long>(4.0 * y + 2000.0));
    LogFactorials lf;
    OrderCache orders(parts.u);
    const double pref1 = std::log(parts.b / (4.0 * kPi * kPi)) - y;
    const double pref2 = std::log(2.0 * parts.c / kPi) - y;
    Accumulator acc;
    ConvergenceTracker conv(ctl.rel_tol);
    double last = 0.0;
    for (long k = 2; k <= k_cap && !acc.overflow; ++k) {
        const double dk = static_cast<double>(k);
        const double hrel = kEps * (20.0 + 2.0 * std::sqrt(y + dk));
        const auto& li = orders.li(k);
        const double f1 = special::log_hyp2f2_positive(1.0 + 0.5 * dk, 0.5 + 0.5 * dk, dk, dk - 0.5, y, hyp);
        const double lg1 = pref1 + (dk - 1.0) * (lX + ly) + lX - lf(2 * k - 2) + f1 + li.log_abs;
        const double mag1 = std::abs(pref1) + dk * std::abs(lX + ly) + lf(2 * k - 2) + std::abs(f1) + std::abs(li.log_abs);
        double t = acc.add(li.sign, lg1, li.rel_err + hrel + 4.0 * kEps * mag1);

        const auto& ph = orders.phi(k);
        const double f2 = special::log_hyp2f2_positive(1.0 + 0.5 * dk, 0.5 + 0.5 * dk, dk + 1.0, dk + 0.5, y, hyp);
        const double lg2 = pref2 + dk * (lX + ly) - lf(2 * k) + f2 + ph.log_abs;
        const double mag2 = std::abs(pref2) + dk * std::abs(lX + ly) + lf(2 * k) + std::abs(f2) + std::abs(ph.log_abs);
        t += acc.add(-ph.sign, lg2, ph.rel_err + hrel + 4.0 * kEps * mag2);
        last = t;
        if (conv.update(t, acc.sum, std::abs(parts.base)) && k > k_safe) return finish(parts, acc, 3.0 * last, "2F2 sum");
    }
    if (acc.overflow) return finish(parts, acc, 0.0, "2F2 sum");
    ClosedMsd r;
    r.terms = acc.terms;
    r.status = "2F2 sum: k-series not converged after " + std::to_string(k_cap) + " terms";
    return r;
}

}  // namespace

std::string to_string(MsdRepresentation rep) {
    switch (rep) {
        case MsdRepresentation::LambdaIntegral: return "lambda-integral";
        case MsdRepresentation::PartialClosed: return "partial-closed";
        case MsdRepresentation::SingleSum2F2: return "single-sum-2f2";
    }
    return "?";
}

MsdRepresentation msd_representation_from_string(const std::string& name) {
    if (name == "lambda-integral") return MsdRepresentation::LambdaIntegral;
    if (name == "partial-closed") return MsdRepresentation::PartialClosed;
    if (name == "single-sum-2f2") return MsdRepresentation::SingleSum2F2;
    throw DomainError("unknown MSD representation '" + name +
                      "' (expected lambda-integral|partial-closed|single-sum-2f2)");
}

ClosedParts closed_parts(const WalkerParams& w, const BoundaryParams& p, double t) {
    w.validate();
    p.validate();
    require_closed_setup(w, p);
    if (!(t > 0.0)) throw DomainError("closed MSD: t must be positive");
    const auto m = moments_at(p, t);
    ClosedParts r{};
    const double L = p.L;
    r.b = m.b;
    r.c = m.c;
    r.w = w.w(t);
    r.f = (r.c + r.w) / r.b;
    r.y = L * L / r.b;
    const double sf = std::sqrt(r.f);
    r.u = 2.0 * kPi * sf;
    const double q = std::exp(-0.5 * r.u), q2 = q * q;
    const double li2 = special::polylog_int(2, -q2);
    const double ln1 = std::log1p(q2);
    const double k1 = L * L * (li2 / (kPi * kPi) - 2.0 * sf / kPi * ln1) + r.b * (li2 / (2.0 * kPi * kPi) - sf / kPi * ln1);
    const double k2 = r.c * (-4.0 / kPi * std::atan(q) - 4.0 * sf * (-std::expm1(-r.y)) * q / (1.0 + q2));
    r.base = L * L / 12.0 + r.b / 24.0 + 0.5 * r.c + k1 + k2;
    r.tail_bound = residual_integral_bound(L, r.b, r.c, r.c + r.w) + std::abs(k1) + std::abs(k2);
    return r;
}

ClosedMsd msd_closed(const WalkerParams& w, const BoundaryParams& p, double t, MsdRepresentation rep,
                     const SeriesControl& ctl) {
    ctl.validate();
    if (rep == MsdRepresentation::LambdaIntegral) {
        ClosedMsd r;
        r.value = msd_lambda_integral(w, p, t, ctl);
        r.error = 1e-11 * std::abs(r.value);
        r.available = true;
        r.status = "ok";
        return r;
    }
    w.validate();
    p.validate();
    require_closed_setup(w, p);
    if (!(t > 0.0)) throw DomainError("closed MSD: t must be positive");
    if (p.mode == GammaMode::Constant && p.gamma * t <= kClosedTauMin) {
        // term-by-term integration is not justified this close to t = 0
        ClosedMsd r = msd_closed(w, p, t, MsdRepresentation::LambdaIntegral, ctl);
        r.status = "lambda-integral used below the closed-form time floor";
        return r;
    }
    const auto parts = closed_parts(w, p, t);
    if (parts.tail_bound < kTailDrop * std::abs(parts.base)) {
        ClosedMsd r;
        r.available = true;
        r.value = parts.base;
        r.error = parts.tail_bound;
        r.tail_bounded = true;
        r.status = "ok (residual series below analytic bound)";
        return r;
    }
    return rep == MsdRepresentation::PartialClosed ? partial_closed(parts, ctl) : single_sum_2f2(parts, ctl);
}

double msd_value(const WalkerParams& w, const BoundaryParams& p, double t, MsdRepresentation rep,
                 const SeriesControl& ctl) {
    const auto r = msd_closed(w, p, t, rep, ctl);
    if (!r.available) throw SeriesError(to_string(rep) + " unavailable: " + r.status, r.value, r.terms);
    return r.value;
}

}  // namespace territory
