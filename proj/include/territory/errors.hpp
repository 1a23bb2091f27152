#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace territory {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Request for a representation or mode the operation does not define.
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A truncated series failed to meet its tolerance within the term cap.
class SeriesError : public std::runtime_error {
public:
    SeriesError(const std::string& what, double partial, long terms)
        : std::runtime_error(what + " (partial=" + std::to_string(partial) +
                             ", terms=" + std::to_string(terms) + ")"),
          partial_(partial),
          terms_(terms) {}

    double partial() const noexcept { return partial_; }
    long terms() const noexcept { return terms_; }

private:
    double partial_;
    long terms_;
};

/// Adaptive quadrature stopped before reaching its error target.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double estimate, double error)
        : std::runtime_error(what + " (estimate=" + std::to_string(estimate) +
                             ", error=" + std::to_string(error) + ")"),
          estimate_(estimate),
          error_(error) {}

    double estimate() const noexcept { return estimate_; }
    double error() const noexcept { return error_; }

private:
    double estimate_;
    double error_;
};

/// A root or extremum search could not bracket its target.
class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The simulation hit a configured resource cap; the result is partial.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A fit was requested before the data reached the regime its model describes.
class RegimeError : public std::runtime_error {
public:
    RegimeError(const std::string& what, std::vector<double> trace)
        : std::runtime_error(what), trace_(std::move(trace)) {}

    const std::vector<double>& trace() const noexcept { return trace_; }

private:
    std::vector<double> trace_;
};

}  // namespace territory
