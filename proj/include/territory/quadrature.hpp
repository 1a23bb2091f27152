#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "territory/errors.hpp"

namespace territory::quad {

struct Options {
    double abs_tol = 0.0;
    double rel_tol = 1e-10;
    int max_intervals = 4000;
    bool throw_on_failure = true;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
    bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error, abs_value;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment kronrod15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    double abs_sum = std::abs(kronrod);
    std::array<double, 7> f1{}, f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        kronrod += kKronrodWeights[j] * (f1[j] + f2[j]);
        abs_sum += kKronrodWeights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1[j] + f2[j]);
    }
    const double mean = 0.5 * kronrod;
    double asc = kKronrodWeights[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
        asc += kKronrodWeights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    const double result = kronrod * half;
    double err = std::abs((kronrod - gauss) * half);
    const double res_asc = asc * std::abs(half);
    const double res_abs = abs_sum * std::abs(half);
    if (res_asc != 0.0 && err != 0.0) err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
    const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * res_abs;
    if (roundoff > err) err = roundoff;
    if (!std::isfinite(result)) err = std::numeric_limits<double>::infinity();
    return {a, b, result, err, res_abs};
}

}  // namespace detail

/// Integrates f over [points.front(), points.back()], treating interior points
/// as mandatory subdivision breakpoints. Points must be non-decreasing.
template <class F>
Result integrate(F&& f, std::span<const double> points, const Options& opt = {}) {
    std::priority_queue<detail::Segment> heap;
    double total = 0.0, total_err = 0.0, total_abs = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!(points[i + 1] > points[i])) continue;
        auto seg = detail::kronrod15(f, points[i], points[i + 1]);
        total += seg.value;
        total_err += seg.error;
        total_abs += seg.abs_value;
        heap.push(seg);
    }
    int count = static_cast<int>(heap.size());
    // an error at the rounding level of int |f| is accepted even when the integral cancels to ~0
    auto target = [&] {
        return std::max({opt.abs_tol, opt.rel_tol * std::abs(total),
                         200.0 * std::numeric_limits<double>::epsilon() * total_abs});
    };
    while (!heap.empty() && total_err > target() && count < opt.max_intervals) {
        auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;
        heap.pop();
        auto left = detail::kronrod15(f, worst.a, mid);
        auto right = detail::kronrod15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        total_abs += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(left);
        heap.push(right);
        ++count;
    }
    // Re-sum to shed the drift of incremental updates.
    total = 0.0;
    total_err = 0.0;
    total_abs = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        total_err += heap.top().error;
        total_abs += heap.top().abs_value;
        heap.pop();
    }
    Result r{total, total_err, count, total_err <= target()};
    if (!r.converged && opt.throw_on_failure)
        throw QuadratureError("adaptive quadrature did not converge", r.value, r.error);
    return r;
}

template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
    if (b < a) {
        auto r = integrate(std::forward<F>(f), b, a, opt);
        r.value = -r.value;
        return r;
    }
    const std::array<double, 2> pts{a, b};
    return integrate(std::forward<F>(f), std::span<const double>(pts), opt);
}

}  // namespace territory::quad
