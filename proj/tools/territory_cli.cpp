// territory_cli: analytics, lattice simulation, calibration and figure data.
//
// Exit codes: 0 success, 2 bad usage, 3 domain error, 4 unsupported request,
// 5 numerical failure (series, quadrature, bracketing, regime), 6 resource cap,
// 1 anything else. Failures print {"error": {...}} on stderr.

#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "territory/asymptotics.hpp"
#include "territory/calibration.hpp"
#include "territory/errors.hpp"
#include "territory/experiments.hpp"
#include "territory/grid.hpp"
#include "territory/io.hpp"
#include "territory/msd_closed.hpp"
#include "territory/simulation.hpp"
#include "territory/special_functions.hpp"

namespace fs = std::filesystem;
using namespace territory;
using io::json;

namespace {

// "log:a:b:n", "lin:a:b:n" or a comma separated list
std::vector<double> parse_grid(const std::string& spec) {
    auto fail = [&] { throw DomainError("bad grid '" + spec + "' (expected log:a:b:n, lin:a:b:n or v1,v2,...)"); };
    if (spec.rfind("log:", 0) == 0 || spec.rfind("lin:", 0) == 0) {
        std::vector<std::string> f;
        std::stringstream ss(spec);
        std::string x;
        while (std::getline(ss, x, ':')) f.push_back(x);
        if (f.size() != 4) fail();
        double a, b;
        long n;
        try {
            a = std::stod(f[1]), b = std::stod(f[2]), n = std::stol(f[3]);
        } catch (const std::exception&) {
            fail();
        }
        if (n < 1 || !(b >= a)) fail();
        if (f[0] == "log") {
            if (!(a > 0.0)) fail();
            return log_grid(a, b, static_cast<std::size_t>(n));
        }
        std::vector<double> g;
        for (long i = 0; i < n; ++i) g.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
        return g;
    }
    std::vector<double> g;
    std::stringstream ss(spec);
    std::string x;
    while (std::getline(ss, x, ',')) {
        try {
            g.push_back(std::stod(x));
        } catch (const std::exception&) {
            fail();
        }
    }
    if (g.empty()) fail();
    return g;
}

template <class T>
std::vector<T> parse_list(const std::string& spec) {
    std::vector<T> out;
    for (double v : parse_grid(spec)) out.push_back(static_cast<T>(v));
    return out;
}

struct Context {
    std::vector<std::string> argv;
    std::string out;
    int threads = 0;

    fs::path dir() const { return fs::path(out); }
    void write_spec(const std::string& sub, const json& params) const {
        json spec{{"subcommand", sub},
                  {"argv", argv},
                  {"parameters", params},
                  {"version", io::library_version()},
                  {"regenerate", "territory_cli " + join_args()}};
        io::write_json(dir() / "spec.json", spec);
    }
    std::string join_args() const {
        std::string s;
        for (std::size_t i = 1; i < argv.size(); ++i) s += (i > 1 ? " " : "") + argv[i];
        return s;
    }
};

json dip_json(const std::optional<Dip>& d) {
    if (!d) return {{"present", false}};
    return {{"present", true}, {"tau_max", d->t_max}, {"tau_min", d->t_min}, {"depth", d->depth}};
}

struct Reduced {
    double kprime = 0.01, dprime = 1.0, beta = 0.1, alpha = 0.05, x0 = 0.0;
    std::string mode = "constant";
    void add(CLI::App* app) {
        app->add_option("--kprime", kprime, "K' = K / (gamma L^2)")->capture_default_str();
        app->add_option("--dprime", dprime, "D' = D / (gamma L^2)")->capture_default_str();
        app->add_option("--beta", beta, "beta = gamma zeta")->capture_default_str();
        app->add_option("--alpha", alpha, "exponent of phi")->capture_default_str();
        app->add_option("--x0", x0, "walker start relative to the initial centroid, units of L")->capture_default_str();
        app->add_option("--mode", mode, "subordinated|constant")->capture_default_str();
    }
    DimensionlessSet set() const { return {kprime, dprime, beta, alpha, 1.0}; }
    BoundaryParams boundary() const { return boundary_from_dimensionless(set(), gamma_mode_from_string(mode)); }
    WalkerParams walker() const { return walker_from_dimensionless(set(), x0); }
    json to_json() const {
        return {{"kprime", kprime}, {"dprime", dprime}, {"beta", beta}, {"alpha", alpha}, {"x0", x0}, {"mode", mode}};
    }
};

void cmd_analytic_msd(const Context& ctx, const Reduced& r, const std::string& grid, const std::string& closed) {
    const auto tau = parse_grid(grid);
    const auto p = r.boundary();
    const auto w = r.walker();
    const auto rep = msd_representation_from_string(closed);
    const auto msd = msd_grid(w, p, tau);
    std::vector<double> cl(tau.size(), std::nan(""));
    if (rep != MsdRepresentation::LambdaIntegral && r.x0 == 0.0) {
        const auto c = closed_grid(w, p, tau, rep);
        for (std::size_t i = 0; i < tau.size(); ++i)
            if (c[i].available) cl[i] = c[i].value;
    } else if (rep == MsdRepresentation::LambdaIntegral) {
        cl = msd;
    }
    io::CsvWriter out(ctx.dir() / "msd.csv", {"tau", "msd_L2", "msd_closed", "a_t", "f_t"});
    for (std::size_t i = 0; i < tau.size(); ++i) {
        out << tau[i] << msd[i] << cl[i] << asymptotic_a(p, tau[i]) << f_ratio(w, p, tau[i]);
        out.end_row();
    }
    out.close();
    std::optional<Dip> dip;
    if (tau.size() >= 3) dip = find_dip(tau, msd);
    json params = r.to_json();
    params["tau_grid"] = grid;
    params["closed"] = closed;
    io::write_json(ctx.dir() / "metadata.json",
                   {{"parameters", params}, {"dip", dip_json(dip)}, {"columns", {"tau", "msd_L2", "msd_closed", "a_t", "f_t"}},
                    {"units", "lengths in L, time tau = gamma t"}, {"version", io::library_version()}});
    ctx.write_spec("analytic-msd", params);
    std::cout << json{{"output", ctx.out}, {"points", tau.size()}, {"dip", dip_json(dip)}}.dump() << "\n";
}

void cmd_analytic_marginal(const Context& ctx, const Reduced& r, double tau, const std::string& grid, bool direct) {
    const auto xs = parse_grid(grid);
    const auto p = r.boundary();
    const auto w = r.walker();
    const auto m = marginal_grid(w, p, xs, tau);
    std::vector<std::string> cols{"x", "M"};
    if (direct) cols.push_back("M_direct");
    io::CsvWriter out(ctx.dir() / "marginal.csv", cols);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out << xs[i] << m[i];
        if (direct) out << marginal_m_direct(w, p, xs[i], tau);
        out.end_row();
    }
    out.close();
    json params = r.to_json();
    params["tau"] = tau;
    params["x_grid"] = grid;
    params["direct"] = direct;
    ctx.write_spec("analytic-marginal", params);
    std::cout << json{{"output", ctx.out}, {"points", xs.size()}}.dump() << "\n";
}

void cmd_alpha0(const Context& ctx, double tol) {
    const auto a = alpha0_threshold(tol);
    json j{{"alpha0", a.alpha0},
           {"bracket", {a.lo, a.hi}},
           {"tau_star", a.tau_star},
           {"iterations", a.iterations},
           {"criterion", "max over tau of v_alpha(tau) = 2; v depends on alpha and tau only"}};
    if (!ctx.out.empty()) {
        io::write_json(ctx.dir() / "alpha0.json", j);
        ctx.write_spec("alpha0", {{"tol", tol}});
    }
    std::cout << j.dump() << "\n";
}

void cmd_deff(const Context& ctx, double alpha, const std::string& grid, std::optional<double> kprime,
              std::optional<double> beta) {
    const auto gt = parse_grid(grid);
    const bool full = kprime && beta;
    std::vector<std::string> cols{"gamma_t", "d_eff_separation"};
    if (full) cols.push_back("d_eff");
    io::CsvWriter out(ctx.dir() / "deff.csv", cols);
    BoundaryParams p;
    if (full) p = boundary_from_dimensionless({*kprime, 1.0, *beta, alpha, 1.0}, GammaMode::Constant);
    for (double g : gt) {
        out << g << d_eff_separation(alpha, g);
        if (full) out << d_eff(p, g);
        out.end_row();
    }
    out.close();
    json params{{"alpha", alpha}, {"gamma_t_grid", grid}};
    if (full) params["kprime"] = *kprime, params["beta"] = *beta;
    ctx.write_spec("deff", params);
    std::cout << json{{"output", ctx.out}, {"points", gt.size()}}.dump() << "\n";
}

void cmd_simulate(const Context& ctx, sim::SimConfig c, const std::string& hist, bool serial) {
    c.hist_steps = hist.empty() ? std::vector<long>{c.n_steps} : parse_list<long>(hist);
    const auto res = sim::run_measurement(c, !serial);
    io::write_sim_result(ctx.dir(), res);
    json params = io::to_json(c);
    params["serial"] = serial;
    ctx.write_spec("simulate", params);
    std::cout << json{{"output", ctx.out}, {"records", res.steps.size()},
                      {"final_sep_msd", res.sep_msd.back()}, {"final_centroid_msd", res.centroid_msd.back()}}
                     .dump()
              << "\n";
}

calib::Lines lines_from_json(const json& j) {
    auto line = [](const json& f, calib::Covariate cov) {
        calib::FitLine l;
        l.intercept = f.at("intercept").get<double>();
        l.slope = f.at("slope").get<double>();
        l.covariate = cov;
        l.base = calib::log_base_from_string(f.value("log_base", "10"));
        return l;
    };
    return {line(j.at("k_line"), calib::Covariate::Z), line(j.at("s_line"), calib::Covariate::QuarterRootZ)};
}

void cmd_calibrate(const Context& ctx, const std::vector<std::string>& sims, double tas, double rho, double F,
                   const std::string& base_s, double window, double slope_tol) {
    const auto base = calib::log_base_from_string(base_s);
    calib::Lines lines{calib::printed_k_line(), calib::printed_s_line()};
    json report;
    if (base == calib::LogBase::E && sims.empty()) {
        // reinterpret the printed coefficients as natural logarithms
        lines.k.base = lines.s.base = calib::LogBase::E;
    }
    if (!sims.empty()) {
        std::vector<double> zk, kd, zs, ss;
        json pts = json::array();
        for (const auto& d : sims) {
            const auto r = io::read_sim_result(d);
            const double z = calib::compute_z(r.cfg.t_as_prime, r.cfg.rho_prime());
            const auto k = sim::estimate_k(r, 1.0, window, slope_tol);
            json pt{{"dir", d}, {"Z", z}, {"K_over_D", k.k_over_d}, {"loglog_slope", k.loglog_slope},
                    {"window", {k.t_lo, k.t_hi}}};
            zk.push_back(z), kd.push_back(k.k_over_d);
            try {
                const auto s = sim::estimate_s_star(r);
                pt["s_star"] = s.s_star, pt["s_star_se"] = s.std_error;
                zs.push_back(z), ss.push_back(s.s_star);
            } catch (const RegimeError& e) {
                pt["s_star_error"] = e.what();
            }
            pts.push_back(pt);
        }
        report["points"] = pts;
        lines.k = calib::fit_line(zk, kd, calib::Covariate::Z, base);
        lines.s = calib::fit_line(zs, ss, calib::Covariate::QuarterRootZ, base);
        report["source"] = "fitted";
    } else {
        report["source"] = "printed";
    }
    report["k_line"] = io::to_json(lines.k);
    report["s_line"] = io::to_json(lines.s);
    json cal = json::object();
    for (auto conv : {calib::ZConvention::AsPrinted, calib::ZConvention::Halved})
        cal[calib::to_string(conv)] = io::to_json(calib::invert_params(lines, tas, rho, F, conv));
    report["calibrated"] = cal;
    report["inputs"] = {{"t_as_prime", tas}, {"rho_prime", rho}, {"F", F}, {"log_base", base_s}};
    io::write_json(ctx.dir() / "calibration.json", report);
    ctx.write_spec("calibrate", report["inputs"]);
    std::cout << report["calibrated"].dump() << "\n";
}

void cmd_compare(const Context& ctx, const std::string& sim_dir, long step, const std::string& cal_file, long pad) {
    const auto r = io::read_sim_result(sim_dir);
    if (r.histograms.empty()) throw DomainError("compare: simulation has no histograms");
    const sim::Histogram* h = &r.histograms.back();
    if (step >= 0) {
        h = nullptr;
        for (const auto& x : r.histograms)
            if (x.step == step) h = &x;
        if (!h) throw DomainError("compare: no histogram at step " + std::to_string(step));
    }
    calib::Lines lines{calib::printed_k_line(), calib::printed_s_line()};
    if (!cal_file.empty()) lines = lines_from_json(io::read_json(cal_file));
    const long d_min = h->min_displacement - pad, d_max = h->min_displacement + static_cast<long>(h->counts.size()) - 1 + pad;
    std::vector<long> counts(d_max - d_min + 1, 0);
    for (std::size_t k = 0; k < h->counts.size(); ++k) counts[k + pad] = h->counts[k];
    const auto p = calib::normalise_counts(counts);
    json report{{"sim_dir", sim_dir}, {"step", h->step}, {"tF", h->step * r.cfg.F()}, {"x0", r.x0}};
    std::vector<std::vector<double>> th;
    for (auto conv : {calib::ZConvention::AsPrinted, calib::ZConvention::Halved}) {
        const auto cp = calib::invert_params(lines, r.cfg.t_as_prime, r.cfg.rho_prime(), r.cfg.F(), conv);
        th.push_back(calib::theory_pmf(cp, r.x0, static_cast<double>(h->step), d_min, d_max));
        const auto d = calib::compare_distributions(p, th.back());
        report[calib::to_string(conv)] = {{"params", io::to_json(cp)}, {"total_variation", d.total_variation}, {"l2", d.l2}};
    }
    io::CsvWriter out(ctx.dir() / "compare.csv",
                      {"displacement", "x", "sim_p", "theory_as_printed", "theory_halved", "residual_as_printed", "residual_halved"});
    for (long d = d_min; d <= d_max; ++d) {
        const std::size_t i = d - d_min;
        out << d << r.x0 + d << p[i] << th[0][i] << th[1][i] << p[i] - th[0][i] << p[i] - th[1][i];
        out.end_row();
    }
    out.close();
    io::write_json(ctx.dir() / "report.json", report);
    ctx.write_spec("compare", {{"sim_dir", sim_dir}, {"step", step}, {"calibration", cal_file}, {"pad", pad}});
    std::cout << json{{"as-printed", report["as-printed"]["total_variation"]},
                      {"halved", report["halved"]["total_variation"]}}
                     .dump()
              << "\n";
}

void cmd_special(const Context& ctx, const std::string& fn, const std::string& grid, double alpha, int order,
                 double a1, double a2, double b1, double b2) {
    std::function<double(double)> f;
    if (fn == "mittag-leffler")
        f = [&](double z) { return special::mittag_leffler_1a(alpha, z); };
    else if (fn == "polylog")
        f = [&](double z) { return special::polylog_int(order, z); };
    else if (fn == "lerch")
        f = [&](double z) { return special::lerch_half(z, order); };
    else if (fn == "bessel-theta")
        f = [&](double z) { return special::bessel_theta(order, z); };
    else if (fn == "hyp2f2")
        f = [&](double x) { return special::hyp2f2(a1, a2, b1, b2, x); };
    else if (fn == "v-alpha")
        f = [&](double t) { return v_alpha(alpha, t); };
    else
        throw DomainError("unknown function '" + fn + "' (mittag-leffler|polylog|lerch|bessel-theta|hyp2f2|v-alpha)");
    const auto xs = parse_grid(grid);
    std::vector<double> ys;
    for (double x : xs) ys.push_back(f(x));
    json params{{"fn", fn}, {"grid", grid}, {"alpha", alpha}, {"order", order}, {"a1", a1}, {"a2", a2}, {"b1", b1}, {"b2", b2}};
    if (ctx.out.empty()) {
        std::cout << "x,value\n";
        for (std::size_t i = 0; i < xs.size(); ++i) std::cout << io::fmt(xs[i]) << "," << io::fmt(ys[i]) << "\n";
        return;
    }
    io::CsvWriter out(ctx.dir() / "special.csv", {"x", "value"});
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out << xs[i] << ys[i];
        out.end_row();
    }
    out.close();
    ctx.write_spec("special-eval", params);
    std::cout << json{{"output", ctx.out}, {"points", xs.size()}}.dump() << "\n";
}

void cmd_fig1(const Context& ctx, exp::Fig1Options o) {
    const auto r = exp::run_fig1(o);
    const auto pk = calib::printed_k_line(), ps = calib::printed_s_line();
    io::CsvWriter a(ctx.dir() / "fig1a.csv", {"t_as_prime", "Z", "K_over_D", "printed_line", "loglog_slope", "t_lo", "t_hi"});
    io::CsvWriter b(ctx.dir() / "fig1b.csv", {"t_as_prime", "Z", "Z_quarter", "s_star", "s_star_se", "printed_line"});
    json pts = json::array();
    for (const auto& p : r.points) {
        a << p.t_as_prime << p.z << p.k.k_over_d << pk.predict(p.z) << p.k.loglog_slope << p.k.t_lo << p.k.t_hi;
        a.end_row();
        json pj{{"t_as_prime", p.t_as_prime}, {"Z", p.z}, {"K_over_D", p.k.k_over_d}, {"slope_trace", p.k.slope_trace}};
        if (p.s) {
            b << p.t_as_prime << p.z << std::sqrt(std::sqrt(p.z)) << p.s->s_star << p.s->std_error << ps.predict(p.z);
            b.end_row();
            pj["s_star"] = p.s->s_star;
        } else {
            pj["s_star_error"] = p.s_error;
        }
        pts.push_back(pj);
    }
    a.close(), b.close();
    json fits{{"points", pts}};
    if (r.k_line) fits["k_line"] = io::to_json(*r.k_line);
    if (r.s_line) fits["s_line"] = io::to_json(*r.s_line);
    fits["printed"] = {{"k_line", io::to_json(pk)}, {"s_line", io::to_json(ps)}};
    io::write_json(ctx.dir() / "fits.json", fits);
    json params{{"t_as_primes", o.t_as_primes}, {"n_sites", o.n_sites}, {"hop_prob", o.hop_prob}, {"seed", o.seed},
                {"k_steps", o.k_steps}, {"k_reps", o.k_reps}, {"k_stride", o.k_stride}, {"window_fraction", o.window_fraction},
                {"s_steps", o.s_steps}, {"s_reps", o.s_reps}, {"s_stride", o.s_stride}, {"plateau_slope", o.plateau_slope}};
    ctx.write_spec("fig1", params);
    std::cout << json{{"output", ctx.out}, {"k_slope", r.k_line ? json(r.k_line->slope) : json(nullptr)},
                      {"s_slope", r.s_line ? json(r.s_line->slope) : json(nullptr)}}
                     .dump()
              << "\n";
}

void cmd_fig2(const Context& ctx, const exp::Fig2Options& o) {
    const auto r = exp::run_fig2(o);
    json rep = json::array();
    for (const auto& f : r) {
        std::ostringstream name;
        name << "fig2_tas" << static_cast<long>(std::lround(f.t_as_prime)) << ".csv";
        io::CsvWriter w(ctx.dir() / name.str(), {"displacement", "x", "count", "sim_p", "theory_as_printed", "theory_halved"});
        for (long d = f.d_min; d <= f.d_max; ++d) {
            const std::size_t i = d - f.d_min;
            w << d << f.x0 + d << f.counts[i] << f.sim_pmf[i] << f.theory[0].pmf[i] << f.theory[1].pmf[i];
            w.end_row();
        }
        w.close();
        json e{{"t_as_prime", f.t_as_prime}, {"step", f.step}, {"file", name.str()}};
        for (const auto& t : f.theory)
            e[calib::to_string(t.convention)] = {{"params", io::to_json(t.params)},
                                                 {"total_variation", t.divergence.total_variation},
                                                 {"l2", t.divergence.l2}};
        rep.push_back(e);
    }
    io::write_json(ctx.dir() / "report.json", {{"configs", rep}});
    ctx.write_spec("fig2", {{"t_as_primes", o.t_as_primes}, {"n_sites", o.n_sites}, {"hop_prob", o.hop_prob},
                            {"tF", o.tF}, {"reps", o.reps}, {"seed", o.seed}, {"pad", o.pad}});
    json summary = json::array();
    for (const auto& e : rep)
        summary.push_back({{"t_as_prime", e["t_as_prime"]}, {"tv_as_printed", e["as-printed"]["total_variation"]},
                           {"tv_halved", e["halved"]["total_variation"]}});
    std::cout << summary.dump() << "\n";
}

void cmd_fig3(const Context& ctx, const exp::Fig3Options& o) {
    const auto r = exp::run_fig3(o);
    json dips = json::array();
    for (const std::string sweep : {"alpha", "dprime"}) {
        std::vector<std::string> cols{"tau"};
        std::vector<const exp::Fig3Curve*> cs;
        for (const auto& c : r.curves)
            if (c.sweep == sweep) {
                std::ostringstream n;
                n << "msd_" << sweep << "_" << io::fmt(sweep == "alpha" ? c.params.alpha : c.params.d_prime);
                cols.push_back(n.str());
                cs.push_back(&c);
                dips.push_back({{"sweep", sweep}, {"params", io::to_json(c.params)}, {"dip", dip_json(c.dip)}});
            }
        io::CsvWriter w(ctx.dir() / ("fig3_" + sweep + ".csv"), cols);
        for (std::size_t i = 0; i < r.tau.size(); ++i) {
            w << r.tau[i];
            for (const auto* c : cs) w << c->msd[i];
            w.end_row();
        }
        w.close();
    }
    io::write_json(ctx.dir() / "metadata.json", {{"curves", dips}, {"mode", to_string(o.mode)}});
    ctx.write_spec("fig3", {{"base", io::to_json(o.base)}, {"mode", to_string(o.mode)}, {"alphas", o.alphas},
                            {"dprimes", o.dprimes}, {"tau_min", o.tau_min}, {"tau_max", o.tau_max}, {"points", o.points}});
    std::cout << json{{"output", ctx.out}, {"curves", dips}}.dump() << "\n";
}

int report_error(const std::string& type, const std::string& msg, int code) {
    std::cerr << json{{"error", {{"type", type}, {"message", msg}, {"code", code}}}}.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Territorial boundary and walker model: analytics, lattice simulation and calibration"};
    app.require_subcommand(1);
    Context ctx;
    ctx.argv.assign(argv, argv + argc);
    app.add_option("--threads", ctx.threads, "OpenMP threads (0: default, capped by TERRITORY_MAX_THREADS)");

    std::function<void()> run;

    Reduced red;
    std::string tau_grid = "log:1e-3:1e2:200", closed = "single-sum-2f2";
    auto* s_msd = app.add_subcommand("analytic-msd", "walker MSD on a time grid");
    red.add(s_msd);
    s_msd->add_option("--tau-grid", tau_grid, "time grid")->capture_default_str();
    s_msd->add_option("--closed", closed, "lambda-integral|partial-closed|single-sum-2f2")->capture_default_str();
    s_msd->callback([&] { run = [&] { cmd_analytic_msd(ctx, red, tau_grid, closed); }; });

    double m_tau = 1.0;
    std::string x_grid = "lin:-1:1:201";
    bool m_direct = false;
    auto* s_mar = app.add_subcommand("analytic-marginal", "marginal walker density M(x, t)");
    red.add(s_mar);
    s_mar->add_option("--tau", m_tau, "time")->capture_default_str();
    s_mar->add_option("--x-grid", x_grid, "position grid")->capture_default_str();
    s_mar->add_flag("--direct", m_direct, "also evaluate the nested quadrature reference");
    s_mar->callback([&] { run = [&] { cmd_analytic_marginal(ctx, red, m_tau, x_grid, m_direct); }; });

    double a_tol = 1e-10;
    auto* s_a0 = app.add_subcommand("alpha0", "threshold exponent below which the MSD dips");
    s_a0->add_option("--tol", a_tol, "bisection tolerance")->capture_default_str();
    s_a0->callback([&] { run = [&] { cmd_alpha0(ctx, a_tol); }; });

    double d_alpha = 0.5;
    std::string gt_grid = "log:1e-3:1e3:121";
    std::optional<double> d_k, d_beta;
    auto* s_deff = app.add_subcommand("deff", "effective diffusion coefficient (constant gamma)");
    s_deff->add_option("--alpha", d_alpha)->capture_default_str();
    s_deff->add_option("--gamma-t-grid", gt_grid)->capture_default_str();
    s_deff->add_option("--kprime", d_k, "with --beta: also the full D_eff in units of gamma L^2");
    s_deff->add_option("--beta", d_beta);
    s_deff->callback([&] { run = [&] { cmd_deff(ctx, d_alpha, gt_grid, d_k, d_beta); }; });

    sim::SimConfig sc;
    sc.n_steps = 10500;
    std::string hist;
    bool serial = false;
    auto* s_sim = app.add_subcommand("simulate", "two territorial walkers on a ring");
    s_sim->add_option("--sites", sc.n_sites, "ring size (even, >= 20)")->capture_default_str();
    s_sim->add_option("--tas", sc.t_as_prime, "T_AS' = T_AS F")->capture_default_str();
    s_sim->add_option("--steps", sc.n_steps, "lattice steps")->capture_default_str();
    s_sim->add_option("--reps", sc.n_realizations, "replicas")->capture_default_str();
    s_sim->add_option("--seed", sc.seed)->capture_default_str();
    s_sim->add_option("--hop-prob", sc.hop_prob, "hop attempt probability per step (F = hop_prob/2)")->capture_default_str();
    s_sim->add_option("--stride", sc.record_stride, "record every this many steps")->capture_default_str();
    s_sim->add_option("--hist-steps", hist, "steps with displacement histograms (default: last)");
    s_sim->add_option("--max-walker-steps", sc.max_walker_steps, "resource cap on steps x replicas")->capture_default_str();
    s_sim->add_flag("--serial", serial, "single-threaded reference path");
    s_sim->callback([&] { run = [&] { cmd_simulate(ctx, sc, hist, serial); }; });

    std::vector<std::string> cal_sims;
    double c_tas = 6000.0, c_rho = 0.02, c_F = 0.5, c_window = 0.5, c_slope = 0.0;
    std::string c_base = "10";
    auto* s_cal = app.add_subcommand("calibrate", "reduced parameters from the K/D and s* lines");
    s_cal->add_option("--sim-dirs", cal_sims, "simulate outputs to fit (default: printed lines)");
    s_cal->add_option("--tas", c_tas)->capture_default_str();
    s_cal->add_option("--rho", c_rho, "rho' = 2 / sites")->capture_default_str();
    s_cal->add_option("--F", c_F, "transfer rate per step")->capture_default_str();
    s_cal->add_option("--log-base", c_base, "10|e")->capture_default_str();
    s_cal->add_option("--window", c_window, "log-time fraction used by the K fit")->capture_default_str();
    s_cal->add_option("--slope-tol", c_slope, "enforce |exponent - 1/2| <= tol in the K fit (0: off)")->capture_default_str();
    s_cal->callback([&] { run = [&] { cmd_calibrate(ctx, cal_sims, c_tas, c_rho, c_F, c_base, c_window, c_slope); }; });

    std::string cmp_dir, cmp_cal;
    long cmp_step = -1, cmp_pad = 50;
    auto* s_cmp = app.add_subcommand("compare", "simulated walker histogram against M(x, t) a");
    s_cmp->add_option("--sim-dir", cmp_dir)->required();
    s_cmp->add_option("--step", cmp_step, "histogram step (default: last)");
    s_cmp->add_option("--calibration", cmp_cal, "calibration.json with k_line and s_line");
    s_cmp->add_option("--pad", cmp_pad, "empty bins added on each side")->capture_default_str();
    s_cmp->callback([&] { run = [&] { cmd_compare(ctx, cmp_dir, cmp_step, cmp_cal, cmp_pad); }; });

    std::string sp_fn = "mittag-leffler", sp_grid = "lin:-10:0:11";
    double sp_alpha = 0.5, sp_a1 = 1, sp_a2 = 1, sp_b1 = 1.5, sp_b2 = 2;
    int sp_order = 1;
    auto* s_sp = app.add_subcommand("special-eval", "evaluate a special function on a grid");
    s_sp->add_option("--fn", sp_fn, "mittag-leffler|polylog|lerch|bessel-theta|hyp2f2|v-alpha")->capture_default_str();
    s_sp->add_option("--grid", sp_grid)->capture_default_str();
    s_sp->add_option("--alpha", sp_alpha)->capture_default_str();
    s_sp->add_option("--order", sp_order, "polylog/lerch order or Bessel polynomial degree")->capture_default_str();
    s_sp->add_option("--a1", sp_a1)->capture_default_str();
    s_sp->add_option("--a2", sp_a2)->capture_default_str();
    s_sp->add_option("--b1", sp_b1)->capture_default_str();
    s_sp->add_option("--b2", sp_b2)->capture_default_str();
    s_sp->callback([&] { run = [&] { cmd_special(ctx, sp_fn, sp_grid, sp_alpha, sp_order, sp_a1, sp_a2, sp_b1, sp_b2); }; });

    exp::Fig1Options f1;
    std::string f1_tas;
    auto* s_f1 = app.add_subcommand("fig1", "K/D and s*/L^2 against Z from lattice runs");
    s_f1->add_option("--tas-list", f1_tas, "comma separated T_AS' values");
    s_f1->add_option("--sites", f1.n_sites)->capture_default_str();
    s_f1->add_option("--seed", f1.seed)->capture_default_str();
    s_f1->add_option("--k-steps", f1.k_steps)->capture_default_str();
    s_f1->add_option("--k-reps", f1.k_reps)->capture_default_str();
    s_f1->add_option("--k-stride", f1.k_stride)->capture_default_str();
    s_f1->add_option("--window", f1.window_fraction)->capture_default_str();
    s_f1->add_option("--s-steps", f1.s_steps)->capture_default_str();
    s_f1->add_option("--s-reps", f1.s_reps)->capture_default_str();
    s_f1->add_option("--s-stride", f1.s_stride)->capture_default_str();
    s_f1->callback([&] {
        if (!f1_tas.empty()) f1.t_as_primes = parse_grid(f1_tas);
        run = [&] { cmd_fig1(ctx, f1); };
    });

    exp::Fig2Options f2;
    std::string f2_tas;
    auto* s_f2 = app.add_subcommand("fig2", "walker histograms at tF = 10500 against M(x, t) a");
    s_f2->add_option("--tas-list", f2_tas, "comma separated T_AS' values");
    s_f2->add_option("--sites", f2.n_sites)->capture_default_str();
    s_f2->add_option("--tF", f2.tF)->capture_default_str();
    s_f2->add_option("--reps", f2.reps)->capture_default_str();
    s_f2->add_option("--seed", f2.seed)->capture_default_str();
    s_f2->add_option("--pad", f2.pad)->capture_default_str();
    s_f2->callback([&] {
        if (!f2_tas.empty()) f2.t_as_primes = parse_grid(f2_tas);
        run = [&] { cmd_fig2(ctx, f2); };
    });

    exp::Fig3Options f3;
    std::string f3_alphas, f3_dprimes, f3_mode = "constant";
    auto* s_f3 = app.add_subcommand("fig3", "MSD sweeps over alpha and D' with dip flags");
    s_f3->add_option("--kprime", f3.base.k_prime)->capture_default_str();
    s_f3->add_option("--dprime", f3.base.d_prime)->capture_default_str();
    s_f3->add_option("--beta", f3.base.beta)->capture_default_str();
    s_f3->add_option("--alpha", f3.base.alpha)->capture_default_str();
    s_f3->add_option("--mode", f3_mode, "subordinated|constant")->capture_default_str();
    s_f3->add_option("--alphas", f3_alphas, "alpha sweep");
    s_f3->add_option("--dprimes", f3_dprimes, "D' sweep");
    s_f3->add_option("--points", f3.points)->capture_default_str();
    s_f3->callback([&] {
        f3.mode = gamma_mode_from_string(f3_mode);
        if (!f3_alphas.empty()) f3.alphas = parse_grid(f3_alphas);
        if (!f3_dprimes.empty()) f3.dprimes = parse_grid(f3_dprimes);
        run = [&] { cmd_fig3(ctx, f3); };
    });

    for (auto* s : {s_msd, s_mar, s_deff, s_sim, s_cal, s_cmp, s_sp, s_f1, s_f2, s_f3, s_a0})
        s->add_option("--out", ctx.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("usage", e.what(), 2);
    } catch (const DomainError& e) {
        return report_error("domain", e.what(), 3);
    }
    try {
        if (ctx.threads > 0) set_kernel_threads(ctx.threads);
        const std::string sub = app.get_subcommands().front()->get_name();
        if (ctx.out.empty() && sub != "alpha0" && sub != "special-eval") ctx.out = "results/" + sub;
        run();
    } catch (const DomainError& e) {
        return report_error("domain", e.what(), 3);
    } catch (const UnsupportedError& e) {
        return report_error("unsupported", e.what(), 4);
    } catch (const SeriesError& e) {
        return report_error("series", e.what(), 5);
    } catch (const QuadratureError& e) {
        return report_error("quadrature", e.what(), 5);
    } catch (const BracketError& e) {
        return report_error("bracket", e.what(), 5);
    } catch (const RegimeError& e) {
        return report_error("regime", e.what(), 5);
    } catch (const ResourceError& e) {
        return report_error("resource", e.what(), 6);
    } catch (const std::exception& e) {
        return report_error("internal", e.what(), 1);
    }
    return 0;
}
