#pragma once

// CSV and JSON serialisation. Floats in CSV use 17 significant digits so a
// rerun can be compared byte for byte.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "territory/calibration.hpp"
#include "territory/simulation.hpp"

namespace territory::io {

using nlohmann::json;

std::string library_version();

/// printf("%.17g"); non-finite values print as nan / inf / -inf.
std::string fmt(double v);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    CsvWriter& operator<<(double v);
    CsvWriter& operator<<(long v);
    CsvWriter& operator<<(int v) { return *this << static_cast<long>(v); }
    CsvWriter& operator<<(const std::string& s);
    void end_row();
    void close();
    ~CsvWriter();

private:
    std::filesystem::path path_;
    std::string buffer_;
    std::size_t columns_, filled_ = 0;
    bool closed_ = false;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::size_t column(const std::string& name) const;
};
CsvTable read_csv(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

json to_json(const sim::SimConfig& c);
sim::SimConfig sim_config_from_json(const json& j);
json to_json(const calib::FitLine& f);
json to_json(const calib::CalibratedParams& p);
json to_json(const DimensionlessSet& d);

/// series.csv, histograms.csv and metadata.json in `dir`.
void write_sim_result(const std::filesystem::path& dir, const sim::SimResult& r);
sim::SimResult read_sim_result(const std::filesystem::path& dir);

inline const std::vector<std::string> kSeriesColumns{
    "step", "L1", "L2", "lambda", "centroid", "sep_msd", "centroid_msd",
    "tF", "sep_msd_se", "centroid_msd_se", "boundary_msd"};

}  // namespace territory::io
