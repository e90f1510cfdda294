#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cavistim/dynamics.hpp"
#include "cavistim/sweep.hpp"

namespace cavistim::io {

/// %.17g with a '.' decimal point regardless of locale.
std::string format_number(double x);

// Column order: t, channels in series order, trace_err.
void write_timeseries_csv(std::ostream& out, const TimeSeries& ts);
void write_timeseries_csv(const std::filesystem::path& path, const TimeSeries& ts);

// key,value rows: crossing_time, asymptotic_diff, converged, drift, sink totals.
void write_metrics_csv(std::ostream& out, const Metrics& m);
void write_metrics_csv(const std::filesystem::path& path, const Metrics& m);

// One row per cell: axis values, crossing_time (empty if absent),
// asymptotic_diff, converged, oscillations, t_max_used, error.
void write_sweep_csv(std::ostream& out, const SweepTable& table);
void write_sweep_csv(const std::filesystem::path& path, const SweepTable& table);

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> column_index(const std::string& name) const;
    /// Numeric column; empty cells become NaN. Throws CsvError naming a missing column.
    std::vector<double> numeric_column(const std::string& name) const;
};

CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace cavistim::io
