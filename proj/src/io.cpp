#include "hypdiff/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hypdiff {

namespace {

constexpr const char* kSeriesHeader = "tau,x,u";
constexpr const char* kDiagHeader =
    "tau,mass,mean,variance,median,negative_mass_fraction";

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

double parse_double(const std::string& s, const std::string& path) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size())
        throw std::runtime_error(path + ": malformed number '" + s + "'");
    return v;
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> SeriesTable::snapshot_times() const {
    std::vector<double> times;
    for (double t : tau)
        if (times.empty() || t != times.back()) times.push_back(t);
    return times;
}

void Summary::add(const std::string& key, double value) {
    entries.emplace_back(key, format_double(value));
}

void Summary::add(const std::string& key, const std::string& value) {
    entries.emplace_back(key, value);
}

const std::string* Summary::find(const std::string& key) const {
    for (const auto& [k, v] : entries)
        if (k == key) return &v;
    return nullptr;
}

SeriesTable to_series_table(const DensitySeries& series) {
    SeriesTable t;
    for (int s = 0; s < series.size(); ++s) {
        const Field& f = series.density(s);
        for (int i = 0; i < f.size(); ++i) {
            t.tau.push_back(series.times()[static_cast<std::size_t>(s)]);
            t.x.push_back(f.grid.coordinate(i));
            t.u.push_back(f[i]);
        }
    }
    return t;
}

void write_series_csv(const std::string& path, const SeriesTable& table) {
    auto out = open_out(path);
    out << kSeriesHeader << '\n';
    for (std::size_t i = 0; i < table.tau.size(); ++i)
        out << format_double(table.tau[i]) << ',' << format_double(table.x[i])
            << ',' << format_double(table.u[i]) << '\n';
}

SeriesTable read_series_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line != kSeriesHeader)
        throw std::runtime_error(path + ": expected header '" +
                                 kSeriesHeader + "', got '" + line + "'");
    SeriesTable t;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 3)
            throw std::runtime_error(path + ": expected 3 columns, got " +
                                     std::to_string(fields.size()));
        t.tau.push_back(parse_double(fields[0], path));
        t.x.push_back(parse_double(fields[1], path));
        t.u.push_back(parse_double(fields[2], path));
    }
    return t;
}

void write_diag_csv(const std::string& path, const DiagTable& table) {
    auto out = open_out(path);
    out << kDiagHeader << '\n';
    for (std::size_t i = 0; i < table.tau.size(); ++i) {
        const auto& s = table.stats[i];
        out << format_double(table.tau[i]) << ',' << format_double(s.mass) << ','
            << format_double(s.mean) << ',' << format_double(s.variance) << ','
            << format_double(s.median) << ','
            << format_double(s.negative_mass_fraction) << '\n';
    }
}

DiagTable read_diag_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line != kDiagHeader)
        throw std::runtime_error(path + ": expected header '" + kDiagHeader +
                                 "', got '" + line + "'");
    DiagTable t;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 6)
            throw std::runtime_error(path + ": expected 6 columns, got " +
                                     std::to_string(fields.size()));
        t.tau.push_back(parse_double(fields[0], path));
        SnapshotStats s;
        s.mass = parse_double(fields[1], path);
        s.mean = parse_double(fields[2], path);
        s.variance = parse_double(fields[3], path);
        s.median = parse_double(fields[4], path);
        s.negative_mass_fraction = parse_double(fields[5], path);
        t.stats.push_back(s);
    }
    return t;
}

void write_summary(const std::string& path, const Summary& summary, bool csv) {
    auto out = open_out(path);
    if (csv) {
        out << "key,value\n";
        for (const auto& [k, v] : summary.entries) out << k << ',' << v << '\n';
    } else {
        for (const auto& [k, v] : summary.entries) out << k << " = " << v << '\n';
    }
}

Summary read_summary(const std::string& path) {
    auto in = open_in(path);
    Summary s;
    std::string line;
    bool first = true;
    bool csv = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line == "key,value") {
                csv = true;
                continue;
            }
        }
        if (csv) {
            const auto comma = line.find(',');
            if (comma == std::string::npos)
                throw std::runtime_error(path + ": malformed summary row '" + line + "'");
            s.entries.emplace_back(line.substr(0, comma), line.substr(comma + 1));
        } else {
            const auto sep = line.find(" = ");
            if (sep == std::string::npos)
                throw std::runtime_error(path + ": malformed summary row '" + line + "'");
            s.entries.emplace_back(line.substr(0, sep), line.substr(sep + 3));
        }
    }
    return s;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
    const auto dot = path.rfind('.');
    const auto slash = path.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
}

} // namespace hypdiff
