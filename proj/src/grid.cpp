#include "territory/grid.hpp"

#include <omp.h>

#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>

namespace territory {

namespace {

int g_threads = 0;

int env_cap() {
    const char* v = std::getenv("TERRITORY_MAX_THREADS");
    if (!v || !*v) return 0;
    try {
        return std::max(0, std::stoi(v));
    } catch (...) {
        return 0;
    }
}

// Runs body(i) for i < n in parallel; the first exception is rethrown afterwards.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    std::exception_ptr failure;
    std::mutex lock;
    const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(kernel_threads())
    for (long i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> g(lock);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

double one_msd(const WalkerParams& w, const BoundaryParams& p, double t, MsdRepresentation rep,
               const SeriesControl& ctl) {
    return rep == MsdRepresentation::LambdaIntegral ? msd_lambda_integral(w, p, t, ctl) : msd_value(w, p, t, rep, ctl);
}

}  // namespace

int kernel_threads() {
    int n = g_threads > 0 ? g_threads : omp_get_max_threads();
    const int cap = env_cap();
    if (cap > 0) n = std::min(n, cap);
    return std::max(1, n);
}

void set_kernel_threads(int n) { g_threads = std::max(0, n); }

std::vector<double> msd_grid(const WalkerParams& w, const BoundaryParams& p, std::span<const double> times,
                             MsdRepresentation rep, const SeriesControl& ctl) {
    std::vector<double> out(times.size());
    parallel_for(times.size(), [&](std::size_t i) { out[i] = one_msd(w, p, times[i], rep, ctl); });
    return out;
}

std::vector<double> msd_grid_serial(const WalkerParams& w, const BoundaryParams& p, std::span<const double> times,
                                    MsdRepresentation rep, const SeriesControl& ctl) {
    std::vector<double> out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) out[i] = one_msd(w, p, times[i], rep, ctl);
    return out;
}

std::vector<ClosedMsd> closed_grid(const WalkerParams& w, const BoundaryParams& p, std::span<const double> times,
                                   MsdRepresentation rep, const SeriesControl& ctl) {
    std::vector<ClosedMsd> out(times.size());
    parallel_for(times.size(), [&](std::size_t i) { out[i] = msd_closed(w, p, times[i], rep, ctl); });
    return out;
}

std::vector<double> marginal_grid(const WalkerParams& w, const BoundaryParams& p, std::span<const double> xs, double t,
                                  const SeriesControl& ctl) {
    std::vector<double> out(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) { out[i] = marginal_m(w, p, xs[i], t, ctl); });
    return out;
}

std::vector<double> marginal_grid_serial(const WalkerParams& w, const BoundaryParams& p, std::span<const double> xs,
                                         double t, const SeriesControl& ctl) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = marginal_m(w, p, xs[i], t, ctl);
    return out;
}

}  // namespace territory
