#pragma once

// Special functions needed by the closed-form MSD and the effective
// diffusion coefficient, restricted to the real domains where they occur.

#include "territory/series.hpp"

namespace territory::special {

/// Largest Bessel-polynomial order accepted by bessel_theta.
inline constexpr int kBesselThetaMaxOrder = 150;

/// Largest |order| evaluated through the exact rational forms of
/// Li_{-r} and Phi(z, -r, 1/2); larger orders use series/pole expansions.
inline constexpr int kRationalMaxOrder = 16;

/// E_{1,alpha}(z) = sum_n z^n / Gamma(n + alpha) for alpha in (0,1], z <= 0.
double mittag_leffler_1a(double alpha, double z, const SeriesControl& ctl = {});

/// Li_order(z) for integer order <= 2 and z in (-1, 0].
double polylog_int(int order, double z);

/// Lerch transcendent Phi(z, order, 1/2) = sum_{n>=0} z^n / (n + 1/2)^order
/// for integer order <= 1 and z in (-1, 0].
double lerch_half(double z, int order);

/// Reverse Bessel polynomial Theta_m(z) = 2^-m sum_k (2m-k)! (2z)^k / ((m-k)! k!).
double bessel_theta(int m, double z);

/// Generalized hypergeometric 2F2(a1, a2; b1, b2; x) for x >= 0.
double hyp2f2(double a1, double a2, double b1, double b2, double x, const SeriesControl& ctl = {});

/// A real number stored as sign * exp(log_abs), with an estimate of its
/// relative rounding error. sign == 0 encodes an exact zero.
struct LogValue {
    double log_abs = 0.0;
    int sign = 0;
    double rel_err = 0.0;

    double value() const;
};

/// Li_order(-exp(-u)) in logarithmic form; order <= 2, u > 0.
LogValue polylog_neg_exp(int order, double u);

/// exp(-u/2) * Phi(-exp(-u), order, 1/2) in logarithmic form; order <= 1, u > 0.
LogValue lerch_half_neg_exp_scaled(int order, double u);

/// log 2F2(a1, a2; b1, b2; x) for strictly positive parameters and x >= 0,
/// where every term of the series is positive.
double log_hyp2f2_positive(double a1, double a2, double b1, double b2, double x,
                           const SeriesControl& ctl = {});

}  // namespace territory::special
