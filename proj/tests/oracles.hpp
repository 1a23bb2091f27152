#pragma once

// Brute-force high-precision reference values. Test-only; nothing here is
// reachable from the library.

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <stdexcept>

namespace oracle {

using boost::multiprecision::mpfr_float;

struct Precision {
    explicit Precision(unsigned digits) : saved_(mpfr_float::default_precision()) {
        mpfr_float::default_precision(digits);
    }
    ~Precision() { mpfr_float::default_precision(saved_); }
    Precision(const Precision&) = delete;
    Precision& operator=(const Precision&) = delete;

private:
    unsigned saved_;
};

inline double to_double(const mpfr_float& v) { return v.convert_to<double>(); }

// Magnitude beyond double range: natural log of |v| and its sign.
struct Signed {
    double log_abs;
    int sign;
};

inline Signed to_signed(const mpfr_float& v) {
    if (v == 0) return {0.0, 0};
    return {log(abs(v)).convert_to<double>(), v > 0 ? 1 : -1};
}

// E_{1,alpha}(-x) from the defining series; digits must cover e^x cancellation.
inline double mittag_leffler(double alpha, double x, unsigned digits = 0) {
    if (digits == 0) digits = 60 + static_cast<unsigned>(x / 2.3);
    Precision p(digits);
    const mpfr_float a = alpha;
    const mpfr_float z = -mpfr_float(x);
    mpfr_float coef = 1 / boost::math::tgamma(a);
    mpfr_float power = 1, sum = coef;
    const mpfr_float eps = pow(mpfr_float(10), -int(digits) + 5);
    for (long n = 0; n < 200000; ++n) {
        coef /= (n + a);
        power *= z;
        const mpfr_float term = coef * power;
        sum += term;
        if (n > 2 * x + 10 && abs(term) < eps * abs(sum)) return to_double(sum);
    }
    throw std::runtime_error("oracle::mittag_leffler did not converge");
}

// sum_{n>=1} z^n / n^r, alternating, with z = -exp(-u) given through u.
inline Signed polylog_neg_exp(int r, double u) {
    const double peak = std::max(-r / u, 1.0);
    const unsigned digits = 60 + static_cast<unsigned>(std::max(0.0, -r * std::log10(peak)));
    Precision p(digits);
    const mpfr_float mu = u;
    mpfr_float sum = 0;
    const mpfr_float tiny = pow(mpfr_float(10), -40);
    mpfr_float max_term = 0;
    for (long n = 1; n < 2000000; ++n) {
        const mpfr_float term = pow(mpfr_float(n), -r) * exp(-mu * n);
        if (term > max_term) max_term = term;
        sum += (n % 2 ? -term : term);
        if (n > peak && term < tiny * max_term && term < tiny * abs(sum) * 1e20) return to_signed(sum);
    }
    throw std::runtime_error("oracle::polylog_neg_exp did not converge");
}

// sum_{n>=1} z^n / n^r for z in (-1, 0].
inline double polylog(int r, double z) {
    if (z == 0.0) return 0.0;
    return [&] {
        Precision p(60 + static_cast<unsigned>(std::max(0, -r) * 4));
        const mpfr_float mz = z;
        mpfr_float sum = 0, power = 1, max_term = 0;
        const mpfr_float tiny = pow(mpfr_float(10), -40);
        for (long n = 1; n < 20000000; ++n) {
            power *= mz;
            const mpfr_float term = power / pow(mpfr_float(n), r);
            sum += term;
            if (abs(term) > max_term) max_term = abs(term);
            if (n > 10 && abs(term) < tiny * max_term && abs(term) < tiny * abs(sum) * 1e20) return to_double(sum);
        }
        throw std::runtime_error("oracle::polylog did not converge");
    }();
}

// exp(-u/2) * sum_{n>=0} (-e^{-u})^n (n + 1/2)^{-r}
inline Signed lerch_scaled_neg_exp(int r, double u) {
    const double peak = std::max(-r / u, 1.0);
    const unsigned digits = 60 + static_cast<unsigned>(std::max(0.0, -r * std::log10(peak)));
    Precision p(digits);
    const mpfr_float mu = u;
    const mpfr_float half = mpfr_float(1) / 2;
    mpfr_float sum = 0, max_term = 0;
    const mpfr_float tiny = pow(mpfr_float(10), -40);
    for (long n = 0; n < 2000000; ++n) {
        const mpfr_float x = n + half;
        const mpfr_float term = pow(x, -r) * exp(-mu * x);
        if (term > max_term) max_term = term;
        sum += (n % 2 ? -term : term);
        if (n > peak && term < tiny * max_term && term < tiny * abs(sum) * 1e20) return to_signed(sum);
    }
    throw std::runtime_error("oracle::lerch_scaled_neg_exp did not converge");
}

// sum_{n>=0} z^n / (n + 1/2)^r for z in (-1, 0].
inline double lerch_half(double z, int r) {
    Precision p(60 + static_cast<unsigned>(std::max(0, -r) * 4));
    const mpfr_float mz = z;
    const mpfr_float half = mpfr_float(1) / 2;
    mpfr_float sum = 0, power = 1, max_term = 0;
    const mpfr_float tiny = pow(mpfr_float(10), -40);
    for (long n = 0; n < 20000000; ++n) {
        const mpfr_float term = power / pow(n + half, r);
        sum += term;
        if (abs(term) > max_term) max_term = abs(term);
        if (n > 10 && abs(term) < tiny * max_term && abs(term) < tiny * abs(sum) * 1e20) return to_double(sum);
        power *= mz;
        if (power == 0) return to_double(sum);
    }
    throw std::runtime_error("oracle::lerch_half did not converge");
}

inline double bessel_theta(int m, double z) {
    Precision p(60);
    const mpfr_float mz = z;
    mpfr_float sum = 0;
    for (int k = 0; k <= m; ++k) {
        const mpfr_float num = boost::math::factorial<mpfr_float>(2 * m - k) * pow(2 * mz, k);
        const mpfr_float den = boost::math::factorial<mpfr_float>(m - k) * boost::math::factorial<mpfr_float>(k);
        sum += num / den;
    }
    return to_double(sum / pow(mpfr_float(2), m));
}

inline double hyp2f2(double a1, double a2, double b1, double b2, double x) {
    Precision p(60);
    const mpfr_float A1 = a1, A2 = a2, B1 = b1, B2 = b2, X = x;
    mpfr_float term = 1, sum = 1;
    const mpfr_float tiny = pow(mpfr_float(10), -45);
    for (long n = 0; n < 10000000; ++n) {
        term *= (A1 + n) * (A2 + n) / ((B1 + n) * (B2 + n) * (n + 1)) * X;
        sum += term;
        if (n > x && abs(term) < tiny * abs(sum)) return to_double(sum);
    }
    throw std::runtime_error("oracle::hyp2f2 did not converge");
}

inline double log_hyp2f2(double a1, double a2, double b1, double b2, double x) {
    Precision p(60);
    const mpfr_float A1 = a1, A2 = a2, B1 = b1, B2 = b2, X = x;
    mpfr_float term = 1, sum = 1;
    const mpfr_float tiny = pow(mpfr_float(10), -45);
    for (long n = 0; n < 10000000; ++n) {
        term *= (A1 + n) * (A2 + n) / ((B1 + n) * (B2 + n) * (n + 1)) * X;
        sum += term;
        if (n > x && abs(term) < tiny * abs(sum)) return to_double(log(sum));
    }
    throw std::runtime_error("oracle::log_hyp2f2 did not converge");
}

}  // namespace oracle
