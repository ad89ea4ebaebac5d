#pragma once

#include "hypdiff/measures.hpp"

#include <string>
#include <utility>
#include <vector>

namespace hypdiff {

/// Long-format series table: one row per (tau, x) pair.
struct SeriesTable {
    std::vector<double> tau;
    std::vector<double> x;
    std::vector<double> u;

    /// Distinct tau values in file order.
    std::vector<double> snapshot_times() const;
};

/// Diagnostics table: one row per snapshot.
struct DiagTable {
    std::vector<double> tau;
    std::vector<SnapshotStats> stats;
};

/// Ordered key/value scalar report.
struct Summary {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(const std::string& key, double value);
    void add(const std::string& key, const std::string& value);
    const std::string* find(const std::string& key) const;
};

/// Fixed-format double serialisation (%.17g): reparses to the same bits.
std::string format_double(double v);

SeriesTable to_series_table(const DensitySeries& series);

void write_series_csv(const std::string& path, const SeriesTable& table);
SeriesTable read_series_csv(const std::string& path);

void write_diag_csv(const std::string& path, const DiagTable& table);
DiagTable read_diag_csv(const std::string& path);

/// `key = value` lines when csv == false, a two-column key,value CSV
/// otherwise.
void write_summary(const std::string& path, const Summary& summary, bool csv);
Summary read_summary(const std::string& path);

/// Insert a suffix before the extension: ("out.csv", "_diag") ->
/// "out_diag.csv".
std::string with_suffix(const std::string& path, const std::string& suffix);

} // namespace hypdiff
