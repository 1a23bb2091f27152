#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "territory/errors.hpp"
#include "territory/rng.hpp"
#include "territory/simulation.hpp"

using namespace territory;
using namespace territory::sim;

namespace {

SimConfig small_config() {
    SimConfig c;
    c.n_sites = 20;
    c.t_as_prime = 50.0;
    c.n_steps = 2000;
    c.n_realizations = 1000;
    c.record_stride = 100;
    c.seed = 11;
    return c;
}

// Straightforward second implementation: one last-visit array per walker and
// boundaries found from offsets measured against the other walker.
struct Reference {
    int n;
    long tas;
    double hop;
    std::vector<long> visit[2];
    long pos[2], unwrapped[2], t = 0;

    explicit Reference(const SimConfig& c) : n(c.n_sites), tas(c.t_as_steps()), hop(c.hop_prob) {
        const int h = n / 2;
        for (int w = 0; w < 2; ++w) {
            visit[w].assign(n, -(1L << 50));
            for (int i = 0; i < h; ++i) {
                const double dmin = h % 2 == 0 ? 0.5 : 0.0;
                const double d = (std::abs(i - 0.5 * (h - 1)) - dmin) / (0.5 * (h - 1) - dmin);
                long age = static_cast<long>(std::floor((tas - 1) * d + 1e-9));
                if (age > tas - 1) age = tas - 1;
                visit[w][w * h + i] = -age;
            }
            pos[w] = unwrapped[w] = w * h + h / 2;
        }
    }
    bool active(int w, long site) const { return t - visit[w][((site % n) + n) % n] < tas; }

    void advance(std::mt19937_64& rng) {
        ++t;
        std::uniform_int_distribution<int> coin(0, 1);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const int first = coin(rng);
        for (int w : {first, 1 - first}) {
            if (u01(rng) < hop) {
                const int dir = coin(rng) ? 1 : -1;
                const long target = ((pos[w] + dir) % n + n) % n;
                if (!active(1 - w, target)) pos[w] = target, unwrapped[w] += dir;
            }
            visit[w][pos[w]] = t;
        }
    }

    void borders(double& left, double& right) const {
        const long p = pos[0], q = pos[1];
        auto mod = [&](long x) { return ((x % n) + n) % n; };
        long omin = n, omax = -1, gmin = n, gmax = -1;
        for (long s = 0; s < n; ++s) {
            if (active(0, s)) {
                const long o = mod(s - q);
                omin = std::min(omin, o), omax = std::max(omax, o);
            }
            if (active(1, s)) {
                const long g = mod(s - p);
                gmin = std::min(gmin, g), gmax = std::max(gmax, g);
            }
        }
        const long op = mod(p - q);
        right = unwrapped[0] + 0.5 * ((omax - op) + gmin);
        left = unwrapped[0] + 0.5 * ((omin - op) + (gmax - n));
    }
};

}  // namespace

TEST_CASE("initial state layout") {
    SimConfig c;
    c.t_as_prime = 3000.0;
    const auto s = init_state(c);
    CHECK(s.pos[0] == 25);
    CHECK(s.pos[1] == 75);
    const long tas = c.t_as_steps();
    CHECK(tas == 6000);
    for (int i = 0; i < 50; ++i) {
        CHECK(s.owner[i] == 0);
        CHECK(s.owner[i + 50] == 1);
        CHECK(s.stamp[i] == s.stamp[i + 50]);
        CHECK(-s.stamp[i] < tas);
        CHECK(s.stamp[i] <= 0);
    }
    CHECK(-s.stamp[0] == tas - 1);
    CHECK(-s.stamp[49] == tas - 1);
    CHECK(s.stamp[24] == 0);
    CHECK(s.stamp[25] == 0);
    const auto b = boundaries(s, c);
    CHECK(b.left == -0.5);
    CHECK(b.right == 49.5);
    CHECK(check_invariants(s, c).empty());

    // territory radius far beyond the active time: ages clamp, all still active
    SimConfig tight;
    tight.t_as_prime = 1.0;
    const auto t = init_state(tight);
    for (int i = 0; i < 100; ++i) CHECK(-t.stamp[i] < tight.t_as_steps());
}

TEST_CASE("configuration validation") {
    SimConfig c;
    c.n_sites = 21;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c.n_sites = 18;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c.n_sites = 100;
    c.hop_prob = 1.5;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c.hop_prob = 1.0;
    c.t_as_prime = 0.2;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c.t_as_prime = 100.0;
    c.hist_steps = {c.n_steps + 1};
    CHECK_THROWS_AS(c.validate(), DomainError);
    c.hist_steps.clear();
    c.n_realizations = 1000000;
    c.max_walker_steps = 1000;
    CHECK_THROWS_AS(run_measurement(c), ResourceError);
}

TEST_CASE("moves into foreign scent are rejected") {
    SimConfig c = small_config();
    c.t_as_prime = 1e6;
    SimState s = init_state(c);
    // walker 0 on site 5 boxed in by walker 1's fresh marks at 4 and 6
    for (int i = 0; i < c.n_sites; ++i) s.owner[i] = 1, s.stamp[i] = 0;
    s.owner[5] = 0;
    s.pos = {5, 15};
    s.unwrapped = {5, 15};
    auto rng = stream_rng(3, 0);
    for (int k = 0; k < 200; ++k) {
        step(s, c, rng);
        CHECK(s.pos[0] == 5);
        CHECK(s.unwrapped[0] == 5);
    }
}

TEST_CASE("invariants hold on every step") {
    for (double tas : {1.0, 3.0, 20.0, 200.0}) {
        for (int sites : {20, 22, 60}) {
            SimConfig c;
            c.n_sites = sites;
            c.t_as_prime = tas;
            SimState s = init_state(c);
            auto rng = stream_rng(5, static_cast<std::uint64_t>(sites));
            for (int k = 0; k < 5000; ++k) {
                step(s, c, rng);
                const auto bad = check_invariants(s, c);
                INFO("tas=", tas, " sites=", sites, " step=", k);
                REQUIRE(bad.empty());
                const auto b = boundaries(s, c);
                REQUIRE(b.left < s.unwrapped[0]);
                REQUIRE(b.right > s.unwrapped[0]);
                REQUIRE(b.separation() < sites);
            }
        }
    }
}

TEST_CASE("scent that never expires pins the territories") {
    SimConfig c = small_config();
    c.t_as_prime = 1e12;
    c.n_realizations = 50;
    c.n_steps = 5000;
    SimState s = init_state(c);
    auto rng = stream_rng(9, 0);
    // only the border sites, initialised as about to expire, lapse (on the first step)
    step(s, c, rng);
    long own = 0;
    for (int i = 0; i < c.n_sites; ++i) own += s.owner[i] == 0 && is_active(s, c, i);
    CHECK(own == c.n_sites / 2 - 2);
    for (int k = 0; k < 5000; ++k) {
        step(s, c, rng);
        long now = 0;
        for (int i = 0; i < c.n_sites; ++i) now += s.owner[i] == 0 && is_active(s, c, i);
        CHECK(now >= own);
        own = now;
    }
    // each freed border pair can shift the separation by at most one site
    const auto res = run_measurement(c);
    for (double v : res.sep_msd) CHECK(v <= 1.0);
    CHECK(estimate_s_star(res, 1.0).s_star <= 1.0 / (c.L() * c.L()));
}

TEST_CASE("frozen walkers give zero MSDs") {
    SimConfig c = small_config();
    c.hop_prob = 0.0;
    c.t_as_prime = 5000.0;  // read in steps when hop_prob = 0
    c.n_steps = 4000;
    c.n_realizations = 20;
    const auto res = run_measurement(c);
    for (std::size_t i = 0; i < res.steps.size(); ++i) {
        CHECK(res.sep_msd[i] == 0.0);
        CHECK(res.centroid_msd[i] == 0.0);
        CHECK(res.boundary_msd[i] == 0.0);
    }
}

TEST_CASE("separation MSD agrees with an independent implementation") {
    const SimConfig c = small_config();
    const auto res = run_measurement(c);
    const double L = c.L();
    std::vector<double> s1(res.steps.size()), s2(res.steps.size()), c1(res.steps.size()), c2(res.steps.size());
    for (long rep = 0; rep < c.n_realizations; ++rep) {
        std::mt19937_64 rng(1000003 * rep + 17);
        Reference r(c);
        double l0, r0;
        r.borders(l0, r0);
        std::size_t i = 0;
        for (long t = 0; t <= c.n_steps; ++t) {
            if (i < res.steps.size() && res.steps[i] == t) {
                double l, rr;
                r.borders(l, rr);
                const double sep = (rr - l - L) * (rr - l - L);
                const double dc = 0.5 * (l + rr) - 0.5 * (l0 + r0);
                s1[i] += sep, s2[i] += sep * sep, c1[i] += dc * dc, c2[i] += dc * dc * dc * dc;
                ++i;
            }
            if (t < c.n_steps) r.advance(rng);
        }
    }
    const double n = static_cast<double>(c.n_realizations);
    for (std::size_t i = 1; i < res.steps.size(); ++i) {
        const double m = s1[i] / n, se = std::sqrt((s2[i] / n - m * m) / n);
        const double mc = c1[i] / n, sec = std::sqrt((c2[i] / n - mc * mc) / n);
        const double tol = 3.0 * std::hypot(se, res.sep_msd_se[i]);
        const double tolc = 3.0 * std::hypot(sec, res.centroid_msd_se[i]);
        INFO("step ", res.steps[i], " lib ", res.sep_msd[i], " ref ", m);
        CHECK(std::abs(res.sep_msd[i] - m) < tol);
        CHECK(std::abs(res.centroid_msd[i] - mc) < tolc);
    }
}

TEST_CASE("mean separation relaxes to half the ring") {
    SimConfig c = small_config();
    c.n_steps = 20000;
    c.n_realizations = 2000;
    c.record_stride = 1000;
    const auto res = run_measurement(c);
    for (std::size_t i = res.steps.size() - 5; i < res.steps.size(); ++i) {
        const double se = std::sqrt(res.sep_msd[i] / c.n_realizations);
        INFO("step ", res.steps[i], " <lambda>=", res.mean_lambda[i], " se=", se);
        CHECK(std::abs(res.mean_lambda[i] - c.L()) < 2.0 * se);
    }
}

TEST_CASE("results are deterministic and independent of threading") {
    SimConfig c;
    c.t_as_prime = 500.0;
    c.n_steps = 10000;
    c.n_realizations = 1;
    c.hist_steps = {5000, 10000};
    const auto a = run_measurement(c), b = run_measurement(c);
    CHECK(a.sep_msd == b.sep_msd);
    CHECK(a.centroid_msd == b.centroid_msd);
    CHECK(a.mean_left == b.mean_left);
    CHECK(a.mean_right == b.mean_right);

    c.n_realizations = 40;
    const auto p = run_measurement(c, true), q = run_measurement(c, false);
    CHECK(p.sep_msd == q.sep_msd);
    CHECK(p.centroid_msd == q.centroid_msd);
    CHECK(p.boundary_msd == q.boundary_msd);
    REQUIRE(p.histograms.size() == 2);
    for (std::size_t h = 0; h < 2; ++h) {
        CHECK(p.histograms[h].counts == q.histograms[h].counts);
        CHECK(p.histograms[h].total() == c.n_realizations);
    }
    for (double v : p.sep_msd) CHECK(v >= 0.0);
}

TEST_CASE("replica k depends only on the seed and k") {
    SimConfig c = small_config();
    c.n_realizations = 5;
    c.n_steps = 500;
    const auto res = run_measurement(c);
    std::vector<double> sum(res.steps.size());
    const SimState start = init_state(c);
    const auto b0 = boundaries(start, c);
    for (long k = c.n_realizations - 1; k >= 0; --k) {  // reverse order on purpose
        auto rng = stream_rng(c.seed, static_cast<std::uint64_t>(k));
        SimState s = start;
        std::size_t i = 0;
        for (long t = 0; t <= c.n_steps; ++t) {
            if (res.steps[i] == t) {
                const auto b = boundaries(s, c);
                sum[i] += (b.centroid() - b0.centroid()) * (b.centroid() - b0.centroid());
                ++i;
            }
            if (t < c.n_steps) step(s, c, rng);
        }
    }
    for (std::size_t i = 0; i < sum.size(); ++i)
        CHECK(res.centroid_msd[i] == doctest::Approx(sum[i] / c.n_realizations).epsilon(1e-14));
}

TEST_CASE("K fit on synthetic data and gauge change") {
    std::vector<double> t, m;
    const double k = 0.0371;
    for (int i = 1; i <= 200; ++i) {
        t.push_back(10.0 * i);
        m.push_back(k * std::sqrt(10.0 * i));
    }
    const auto e = estimate_k(t, m);
    CHECK(std::abs(e.k_over_d - k) < 1e-10 * k);
    CHECK(std::abs(e.loglog_slope - 0.5) < 1e-10);
    CHECK_FALSE(e.slope_trace.empty());
    for (double cgauge : {0.25, 3.0, 40.0}) {
        const auto g = estimate_k(t, m, cgauge);
        CHECK(std::log(g.k_over_d) - std::log(e.k_over_d) == doctest::Approx(-0.5 * std::log(cgauge)).epsilon(1e-12));
    }
    std::vector<double> lin;
    for (double ti : t) lin.push_back(0.1 * ti);
    try {
        estimate_k(t, lin);
        FAIL("expected a regime error");
    } catch (const RegimeError& err) {
        CHECK_FALSE(err.trace().empty());
    }
    CHECK_NOTHROW(estimate_k(t, lin, 1.0, 0.5, 0.0));
}

TEST_CASE("plateau estimate") {
    std::vector<double> t, s;
    const double L = 50.0, plateau = 0.0123456789 * L * L;
    for (int i = 1; i <= 500; ++i) {
        t.push_back(100.0 * i);
        s.push_back(i < 20 ? plateau * i / 20.0 : plateau);
    }
    const auto e = estimate_s_star(t, s, L);
    CHECK(std::abs(e.s_star - 0.0123456789) < 1e-12);
    std::vector<double> grow;
    for (double ti : t) grow.push_back(std::sqrt(ti));
    CHECK_THROWS_AS(estimate_s_star(t, grow, L), RegimeError);
}
