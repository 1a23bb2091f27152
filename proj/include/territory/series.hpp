#pragma once

#include <cmath>

#include "territory/errors.hpp"

namespace territory {

/// Truncation policy shared by the infinite series in the library.
///
/// A series stops once |term| < rel_tol * |partial sum| holds for three
/// consecutive terms, or fails once max_terms terms have been added.
struct SeriesControl {
    double rel_tol = 1e-15;
    long max_terms = 200000;

    void validate() const {
        if (!(rel_tol > 0.0 && rel_tol < 1e-3))
            throw DomainError("SeriesControl: rel_tol must lie in (0, 1e-3)");
        if (max_terms < 64) throw DomainError("SeriesControl: max_terms must be >= 64");
    }
};

/// Three-consecutive-small-terms stopping rule.
///
/// `scale` replaces |sum| as the reference when the partial sum is expected to
/// cancel toward zero (alternating corrections to a larger quantity).
class ConvergenceTracker {
public:
    explicit ConvergenceTracker(double rel_tol) : rel_tol_(rel_tol) {}

    bool update(double term, double sum, double scale = 0.0) {
        const double ref = std::max(std::abs(sum), scale);
        if (term == 0.0 || std::abs(term) < rel_tol_ * ref)
            ++small_;
        else
            small_ = 0;
        return small_ >= 3;
    }

private:
    double rel_tol_;
    int small_ = 0;
};

}  // namespace territory
