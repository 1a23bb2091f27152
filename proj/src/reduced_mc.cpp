#include "territory/reduced_mc.hpp"

#include <cmath>

#include "territory/errors.hpp"
#include "territory/grid.hpp"
#include "territory/rng.hpp"

namespace territory {

namespace {

constexpr long kBlock = 1024;

struct Sums {
    std::vector<double> s1, s2;
};

void run_block(const WalkerParams& w, const BoundaryParams& p, std::span<const double> times,
               const std::vector<BoundaryMoments>& mom, const std::vector<double>& G, long count,
               std::uint64_t seed, long block, Sums& out) {
    auto rng = stream_rng(seed, static_cast<std::uint64_t>(block));
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t nt = times.size();
    out.s1.assign(nt, 0.0);
    out.s2.assign(nt, 0.0);
    for (long i = 0; i < count; ++i) {
        double X = p.initial_separation(), C = p.initial_centroid();
        double b_prev = 0.0, c_prev = 0.0, g_prev = 0.0;
        for (std::size_t j = 0; j < nt; ++j) {
            const double decay = std::exp(-(G[j] - g_prev));
            const double var_x = 0.5 * std::max(0.0, mom[j].b - decay * decay * b_prev);
            X = p.L + decay * (X - p.L) + std::sqrt(var_x) * normal(rng);
            C += std::sqrt(0.5 * std::max(0.0, mom[j].c - c_prev)) * normal(rng);
            b_prev = mom[j].b;
            c_prev = mom[j].c;
            g_prev = G[j];
            const double lambda = std::abs(X);
            const double free = w.x0 + std::sqrt(0.5 * w.w(times[j])) * normal(rng);
            const double x = lambda > 0.0 ? fold_into_box(free, C - 0.5 * lambda, lambda) : C;
            const double d2 = (x - w.x0) * (x - w.x0);
            out.s1[j] += d2;
            out.s2[j] += d2 * d2;
        }
    }
}

}  // namespace

double fold_into_box(double y, double L1, double lambda) {
    double r = std::fmod(y - L1, 2.0 * lambda);
    if (r < 0.0) r += 2.0 * lambda;
    if (r > lambda) r = 2.0 * lambda - r;
    return L1 + r;
}

std::vector<McMoment> reduced_model_msd(const WalkerParams& w, const BoundaryParams& p, std::span<const double> times,
                                        long paths, std::uint64_t seed, bool parallel) {
    w.validate();
    p.validate();
    if (paths < 2) throw DomainError("reduced_model_msd: need at least 2 paths");
    for (std::size_t i = 0; i < times.size(); ++i)
        if (!(times[i] > 0.0) || (i > 0 && !(times[i] > times[i - 1])))
            throw DomainError("reduced_model_msd: times must be positive and increasing");
    std::vector<BoundaryMoments> mom;
    std::vector<double> G;
    for (double t : times) {
        mom.push_back(moments_at(p, t));
        const double tau = p.gamma * t;
        G.push_back(g_reduced(p.mode, p.phi.alpha, p.gamma * p.phi.zeta, tau));
    }
    const long blocks = (paths + kBlock - 1) / kBlock;
    std::vector<Sums> partial(static_cast<std::size_t>(blocks));
    auto body = [&](long b) {
        const long count = std::min(kBlock, paths - b * kBlock);
        run_block(w, p, times, mom, G, count, seed, b, partial[static_cast<std::size_t>(b)]);
    };
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(kernel_threads())
        for (long b = 0; b < blocks; ++b) body(b);
    } else {
        for (long b = 0; b < blocks; ++b) body(b);
    }
    // block order fixes the summation order
    std::vector<McMoment> out;
    for (std::size_t j = 0; j < times.size(); ++j) {
        double s1 = 0.0, s2 = 0.0;
        for (const auto& ps : partial) {
            s1 += ps.s1[j];
            s2 += ps.s2[j];
        }
        const double n = static_cast<double>(paths);
        const double mean = s1 / n;
        const double var = std::max(0.0, (s2 / n - mean * mean) * n / (n - 1.0));
        out.push_back({times[j], mean, std::sqrt(var / n)});
    }
    return out;
}

}  // namespace territory
