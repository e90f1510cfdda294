#include "cavistim/io/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace cavistim::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CsvError("cannot write " + path.string());
    return out;
}

std::string quote(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += (c == '\n' || c == '\r') ? ' ' : c;
    }
    return q + '"';
}

}  // namespace

std::string format_number(double x)
{
    char buf[64];
    // to_chars is locale-independent; general format with 17 significant digits matches %.17g
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, end);
}

void write_timeseries_csv(std::ostream& out, const TimeSeries& ts)
{
    out << "t";
    for (const auto& c : ts.channels) out << ',' << c.name;
    out << ",trace_err\n";
    for (std::size_t i = 0; i < ts.times.size(); ++i) {
        out << format_number(ts.times[i]);
        for (const auto& c : ts.channels) out << ',' << format_number(c.values[i]);
        out << ',' << format_number(i < ts.trace_error.size() ? ts.trace_error[i] : 0.0) << '\n';
    }
}

void write_timeseries_csv(const std::filesystem::path& path, const TimeSeries& ts)
{
    auto out = open_out(path);
    write_timeseries_csv(out, ts);
}

void write_metrics_csv(std::ostream& out, const Metrics& m)
{
    out << "key,value\n";
    out << "crossing_time," << (m.crossing_time ? format_number(*m.crossing_time) : "") << '\n';
    out << "asymptotic_diff," << format_number(m.asymptotic_difference.value) << '\n';
    out << "converged," << (m.asymptotic_difference.converged ? 1 : 0) << '\n';
    out << "drift," << format_number(m.asymptotic_difference.drift) << '\n';
    for (const auto& [label, total] : m.sink_totals) out << "sink_" << label << "_total," << format_number(total) << '\n';
}

void write_metrics_csv(const std::filesystem::path& path, const Metrics& m)
{
    auto out = open_out(path);
    write_metrics_csv(out, m);
}

void write_sweep_csv(std::ostream& out, const SweepTable& table)
{
    for (const auto& a : table.axes) out << a.name << ',';
    out << "crossing_time,asymptotic_diff,converged,oscillations,t_max_used,error\n";
    for (const auto& cell : table.cells) {
        for (double c : cell.coords) out << format_number(c) << ',';
        if (cell.metrics) {
            const auto& m = *cell.metrics;
            out << (m.crossing_time ? format_number(*m.crossing_time) : "") << ','
                << format_number(m.asymptotic_difference.value) << ',' << (m.asymptotic_difference.converged ? 1 : 0);
        } else {
            out << ",,";
        }
        out << ',' << cell.oscillations << ',' << format_number(cell.t_max_used) << ',' << quote(cell.error) << '\n';
    }
}

void write_sweep_csv(const std::filesystem::path& path, const SweepTable& table)
{
    auto out = open_out(path);
    write_sweep_csv(out, table);
}

std::optional<std::size_t> CsvTable::column_index(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    return std::nullopt;
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const
{
    const auto idx = column_index(name);
    if (!idx) throw CsvError("missing column '" + name + "'");
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        const std::string& cell = *idx < row.size() ? row[*idx] : std::string();
        double v = std::nan("");
        if (!cell.empty()) {
            auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || p != cell.data() + cell.size()) {
                throw CsvError("column '" + name + "': not a number: " + cell);
            }
        }
        out.push_back(v);
    }
    return out;
}

CsvTable parse_csv(std::istream& in)
{
    CsvTable table;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    auto end_row = [&] {
        row.push_back(std::move(field));
        field.clear();
        if (table.header.empty()) {
            table.header = std::move(row);
        } else {
            table.rows.push_back(std::move(row));
        }
        row.clear();
        any = false;
    };
    for (char c; in.get(c);) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field += '"';
                    in.get();
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"': quoted = true; any = true; break;
        case ',': row.push_back(std::move(field)); field.clear(); any = true; break;
        case '\r': break;
        case '\n': end_row(); break;
        default: field += c; any = true;
        }
    }
    if (any || !field.empty() || !row.empty()) end_row();
    return table;
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError("cannot open " + path.string());
    return parse_csv(in);
}

}  // namespace cavistim::io
