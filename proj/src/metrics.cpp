#include "offsim/metrics.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "offsim/config.hpp"

namespace offsim {

std::vector<double> smooth_trailing(const std::vector<double>& raw, int window) {
    if (window < 1) throw std::invalid_argument("smoothing window must be >= 1");
    std::vector<double> out(raw.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        acc += raw[i];
        if (i >= static_cast<std::size_t>(window)) acc -= raw[i - window];
        const std::size_t n = std::min<std::size_t>(i + 1, window);
        out[i] = acc / n;
    }
    return out;
}

std::string metrics_to_csv(const std::vector<MetricsRow>& rows) {
    std::string out = kMetricsHeader;
    out += '\n';
    for (const MetricsRow& r : rows) {
        out += std::to_string(r.round);
        out += ',';
        out += r.mode;
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        out += r.sweep_var;
        out += ',';
        out += r.sweep_value;
        out += ',';
        out += format_double(r.mean_cost);
        out += ',';
        out += format_double(r.smoothed_cost);
        out += '\n';
    }
    return out;
}

void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open metrics file for writing: " + path);
    out << metrics_to_csv(rows);
    if (!out) throw std::runtime_error("write failure on metrics file: " + path);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

[[noreturn]] void format_error(const std::string& path, int line_no, const std::string& what) {
    throw std::runtime_error("metrics format error in " + path + " at line " +
                             std::to_string(line_no) + ": " + what);
}

}  // namespace

std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open metrics file: " + path);

    std::string line;
    if (!std::getline(in, line)) format_error(path, 1, "missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kMetricsHeader) format_error(path, 1, "unexpected header '" + line + "'");

    std::vector<MetricsRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 7) {
            format_error(path, line_no,
                         "expected 7 fields, got " + std::to_string(fields.size()));
        }
        MetricsRow row;
        try {
            row.round = std::stoi(fields[0]);
            row.mode = fields[1];
            row.seed = std::stoull(fields[2]);
            row.sweep_var = fields[3];
            row.sweep_value = fields[4];
            row.mean_cost = std::stod(fields[5]);
            row.smoothed_cost = std::stod(fields[6]);
        } catch (const std::exception& e) {
            format_error(path, line_no, std::string("unparseable field: ") + e.what());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<std::string> emit_plot_data(const std::string& metrics_path,
                                        const std::string& out_dir) {
    const std::vector<MetricsRow> rows = read_metrics_csv(metrics_path);
    if (rows.empty()) {
        throw std::runtime_error("metrics file has no data rows: " + metrics_path);
    }

    // group -> series -> round -> smoothed values across seeds
    std::map<std::string, std::map<std::string, std::map<int, std::vector<double>>>> groups;
    for (const MetricsRow& r : rows) {
        const std::string group = r.sweep_var.empty() ? "none" : r.sweep_var;
        std::string series;
        if (group == "none") {
            series = r.mode;
        } else {
            series = group + "=" + r.sweep_value;
        }
        groups[group][series][r.round].push_back(r.smoothed_cost);
    }

    std::filesystem::create_directories(out_dir);
    std::vector<std::string> written;
    for (auto& [group, series_map] : groups) {
        const std::string name = group == "none" ? "modes" : group;
        std::string body = "round,series,smoothed_cost\n";
        for (auto& [series, by_round] : series_map) {
            for (auto& [round, values] : by_round) {
                std::sort(values.begin(), values.end());
                const double median = values[(values.size() - 1) / 2];  // lower median
                body += std::to_string(round) + "," + series + "," + format_double(median) + "\n";
            }
        }
        const std::string path = (std::filesystem::path(out_dir) / ("plot_" + name + ".csv")).string();
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open plot file for writing: " + path);
        out << body;
        if (!out) throw std::runtime_error("write failure on plot file: " + path);
        written.push_back(path);
    }
    return written;
}

}  // namespace offsim
