#pragma once

#include <string>
#include <vector>

#include "kinchem/profile.hpp"

namespace kinchem {

/// Shortest decimal form that round-trips the double exactly.
std::string format_double(double value);

/// CSV time-series writer: header "t,<columns...>", one row per time.
/// All numbers use format_double, so identical data gives identical bytes.
void write_series_csv(const std::string& path, const std::vector<std::string>& columns,
                      const std::vector<double>& times,
                      const std::vector<std::vector<double>>& rows);

/// Two-column table (e.g. order, critical mass).
void write_table_csv(const std::string& path, const std::string& col_a,
                     const std::string& col_b, const std::vector<double>& a,
                     const std::vector<double>& b);

struct SeriesData {
    std::vector<std::string> columns; // excludes the leading "t"
    std::vector<double> times;
    std::vector<std::vector<double>> rows;
};
SeriesData read_series_csv(const std::string& path);

struct TableData {
    std::string col_a;
    std::string col_b;
    std::vector<double> a;
    std::vector<double> b;
};
TableData read_table_csv(const std::string& path);

/// Profile snapshot: "# half_width=<L> count=<n>" header, then x,value rows.
void write_profile(const std::string& path, const DensityProfile& profile);
DensityProfile read_profile(const std::string& path);

/// Field snapshot: "# L=<> n_x=<> V=<> n_v=<>" header, then one row-major
/// CSV line of f(x_i, .) per spatial node.
void write_field(const std::string& path, const PhaseField& field);
PhaseField read_field(const std::string& path);

} // namespace kinchem
