#include "territory/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "territory/errors.hpp"

#ifndef TERRITORY_VERSION
#define TERRITORY_VERSION "0.0.0"
#endif

namespace territory::io {

namespace fs = std::filesystem;

std::string library_version() { return TERRITORY_VERSION; }

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
    if (header.empty()) throw DomainError("CsvWriter: empty header");
    for (std::size_t i = 0; i < header.size(); ++i) buffer_ += (i ? "," : "") + header[i];
    buffer_ += '\n';
}

CsvWriter& CsvWriter::operator<<(double v) { return *this << fmt(v); }
CsvWriter& CsvWriter::operator<<(long v) { return *this << std::to_string(v); }

CsvWriter& CsvWriter::operator<<(const std::string& s) {
    if (filled_ == columns_) throw std::logic_error("CsvWriter: row has more fields than the header");
    if (filled_) buffer_ += ',';
    buffer_ += s;
    ++filled_;
    return *this;
}

void CsvWriter::end_row() {
    if (filled_ != columns_) throw std::logic_error("CsvWriter: row has fewer fields than the header");
    buffer_ += '\n';
    filled_ = 0;
}

void CsvWriter::close() {
    if (closed_) return;
    closed_ = true;
    if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
    std::ofstream out(path_, std::ios::binary);
    out << buffer_;
    if (!out) throw std::runtime_error("cannot write " + path_.string());
}

CsvWriter::~CsvWriter() {
    try {
        close();
    } catch (...) {
    }
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw DomainError("CSV has no column '" + name + "'");
}

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path.string());
    CsvTable t;
    std::string line;
    auto split = [](const std::string& l) {
        std::vector<std::string> f;
        std::stringstream ss(l);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        return f;
    };
    if (!std::getline(in, line)) throw DomainError(path.string() + " is empty");
    t.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        t.rows.push_back(split(line));
        if (t.rows.back().size() != t.header.size()) throw DomainError(path.string() + ": ragged row");
    }
    return t;
}

void write_json(const fs::path& path, const json& j) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path.string());
    return json::parse(in);
}

json to_json(const sim::SimConfig& c) {
    return {{"n_sites", c.n_sites},
            {"t_as_prime", c.t_as_prime},
            {"hop_prob", c.hop_prob},
            {"n_steps", c.n_steps},
            {"n_realizations", c.n_realizations},
            {"seed", c.seed},
            {"record_stride", c.record_stride},
            {"hist_steps", c.hist_steps},
            {"max_walker_steps", c.max_walker_steps},
            {"F", c.F()},
            {"t_as_steps", c.t_as_steps()},
            {"rho_prime", c.rho_prime()}};
}

sim::SimConfig sim_config_from_json(const json& j) {
    sim::SimConfig c;
    c.n_sites = j.at("n_sites").get<int>();
    c.t_as_prime = j.at("t_as_prime").get<double>();
    c.hop_prob = j.at("hop_prob").get<double>();
    c.n_steps = j.at("n_steps").get<long>();
    c.n_realizations = j.at("n_realizations").get<long>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.record_stride = j.at("record_stride").get<long>();
    c.hist_steps = j.at("hist_steps").get<std::vector<long>>();
    if (j.contains("max_walker_steps")) c.max_walker_steps = j.at("max_walker_steps").get<long>();
    c.validate();
    return c;
}

json to_json(const calib::FitLine& f) {
    return {{"intercept", f.intercept},   {"slope", f.slope},
            {"intercept_se", f.intercept_se}, {"slope_se", f.slope_se},
            {"covariate", calib::to_string(f.covariate)}, {"log_base", calib::to_string(f.base)},
            {"residuals", f.residuals}};
}

json to_json(const DimensionlessSet& d) {
    return {{"k_prime", d.k_prime}, {"d_prime", d.d_prime}, {"beta", d.beta}, {"alpha", d.alpha}};
}

json to_json(const calib::CalibratedParams& p) {
    return {{"z_convention", calib::to_string(p.convention)},
            {"Z", p.z},
            {"K_over_D", p.k_over_d},
            {"s_star", p.s_star},
            {"K", p.K},
            {"gamma", p.gamma},
            {"D", p.D},
            {"F", p.F},
            {"L", p.L},
            {"zeta", p.zeta},
            {"reduced", to_json(p.reduced)}};
}

void write_sim_result(const fs::path& dir, const sim::SimResult& r) {
    fs::create_directories(dir);
    {
        CsvWriter w(dir / "series.csv", kSeriesColumns);
        for (std::size_t i = 0; i < r.steps.size(); ++i) {
            w << r.steps[i] << r.mean_left[i] << r.mean_right[i] << r.mean_lambda[i] << r.mean_centroid[i]
              << r.sep_msd[i] << r.centroid_msd[i] << r.tF(i) << r.sep_msd_se[i] << r.centroid_msd_se[i]
              << r.boundary_msd[i];
            w.end_row();
        }
    }
    {
        CsvWriter w(dir / "histograms.csv", {"step", "tF", "displacement", "count"});
        for (const auto& h : r.histograms)
            for (std::size_t k = 0; k < h.counts.size(); ++k) {
                w << h.step << h.step * r.cfg.F() << h.min_displacement + static_cast<long>(k) << h.counts[k];
                w.end_row();
            }
    }
    json meta{{"config", to_json(r.cfg)},
              {"boundary_convention", r.convention},
              {"x0", r.x0},
              {"L", r.cfg.L()},
              {"time_unit", "step; tF = step * hop_prob / 2"},
              {"focal_walker", 0},
              {"version", library_version()}};
    write_json(dir / "metadata.json", meta);
}

sim::SimResult read_sim_result(const fs::path& dir) {
    const json meta = read_json(dir / "metadata.json");
    sim::SimResult r;
    r.cfg = sim_config_from_json(meta.at("config"));
    r.convention = meta.at("boundary_convention").get<std::string>();
    r.x0 = meta.at("x0").get<double>();
    const auto s = read_csv(dir / "series.csv");
    auto col = [&](const char* n) { return s.column(n); };
    const std::size_t c_step = col("step"), c_l1 = col("L1"), c_l2 = col("L2"), c_lam = col("lambda"),
                      c_cen = col("centroid"), c_sep = col("sep_msd"), c_cm = col("centroid_msd"),
                      c_sse = col("sep_msd_se"), c_cse = col("centroid_msd_se"), c_b = col("boundary_msd");
    for (const auto& row : s.rows) {
        r.steps.push_back(std::stol(row[c_step]));
        r.mean_left.push_back(std::stod(row[c_l1]));
        r.mean_right.push_back(std::stod(row[c_l2]));
        r.mean_lambda.push_back(std::stod(row[c_lam]));
        r.mean_centroid.push_back(std::stod(row[c_cen]));
        r.sep_msd.push_back(std::stod(row[c_sep]));
        r.centroid_msd.push_back(std::stod(row[c_cm]));
        r.sep_msd_se.push_back(std::stod(row[c_sse]));
        r.centroid_msd_se.push_back(std::stod(row[c_cse]));
        r.boundary_msd.push_back(std::stod(row[c_b]));
    }
    const auto h = read_csv(dir / "histograms.csv");
    const std::size_t h_step = h.column("step"), h_d = h.column("displacement"), h_c = h.column("count");
    for (const auto& row : h.rows) {
        const long step = std::stol(row[h_step]), d = std::stol(row[h_d]), c = std::stol(row[h_c]);
        if (r.histograms.empty() || r.histograms.back().step != step) {
            r.histograms.push_back({});
            r.histograms.back().step = step;
            r.histograms.back().min_displacement = d;
        }
        auto& hist = r.histograms.back();
        if (d != hist.min_displacement + static_cast<long>(hist.counts.size()))
            throw DomainError("histograms.csv: displacements must be consecutive");
        hist.counts.push_back(c);
    }
    return r;
}

}  // namespace territory::io
