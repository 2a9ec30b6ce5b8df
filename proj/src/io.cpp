#include "kinchem/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kinchem {

std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf, ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary); // binary: no newline translation
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

std::vector<double> parse_csv_line(const std::string& line) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= line.size()) {
        std::size_t end = line.find(',', start);
        if (end == std::string::npos) end = line.size();
        out.push_back(std::stod(line.substr(start, end - start)));
        start = end + 1;
        if (end == line.size()) break;
    }
    return out;
}

} // namespace

void write_series_csv(const std::string& path, const std::vector<std::string>& columns,
                      const std::vector<double>& times,
                      const std::vector<std::vector<double>>& rows) {
    if (times.size() != rows.size())
        throw std::invalid_argument("series times and rows differ in length");
    std::ofstream out = open_out(path);
    out << "t";
    for (const auto& c : columns) out << "," << c;
    out << "\n";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out << format_double(times[r]);
        for (double v : rows[r]) out << "," << format_double(v);
        out << "\n";
    }
}

void write_table_csv(const std::string& path, const std::string& col_a,
                     const std::string& col_b, const std::vector<double>& a,
                     const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("table columns differ in length");
    std::ofstream out = open_out(path);
    out << col_a << "," << col_b << "\n";
    for (std::size_t i = 0; i < a.size(); ++i)
        out << format_double(a[i]) << "," << format_double(b[i]) << "\n";
}

SeriesData read_series_csv(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("empty series file " + path);
    SeriesData data;
    std::size_t start = header.find(',');
    if (header.substr(0, start) != "t")
        throw std::runtime_error("series header must start with t in " + path);
    while (start != std::string::npos) {
        std::size_t end = header.find(',', start + 1);
        data.columns.push_back(header.substr(
            start + 1, end == std::string::npos ? end : end - start - 1));
        start = end;
    }
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> vals = parse_csv_line(line);
        if (vals.size() != data.columns.size() + 1)
            throw std::runtime_error("malformed series row in " + path);
        data.times.push_back(vals.front());
        vals.erase(vals.begin());
        data.rows.push_back(std::move(vals));
    }
    return data;
}

TableData read_table_csv(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("empty table file " + path);
    const std::size_t comma = header.find(',');
    if (comma == std::string::npos) throw std::runtime_error("malformed table header in " + path);
    TableData data;
    data.col_a = header.substr(0, comma);
    data.col_b = header.substr(comma + 1);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<double> vals = parse_csv_line(line);
        if (vals.size() != 2) throw std::runtime_error("malformed table row in " + path);
        data.a.push_back(vals[0]);
        data.b.push_back(vals[1]);
    }
    return data;
}

void write_profile(const std::string& path, const DensityProfile& profile) {
    std::ofstream out = open_out(path);
    out << "# half_width=" << format_double(profile.grid().half_width())
        << " count=" << profile.size() << "\n";
    for (int i = 0; i < profile.size(); ++i)
        out << format_double(profile.grid().node(i)) << "," << format_double(profile[i])
            << "\n";
}

DensityProfile read_profile(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string header;
    std::getline(in, header);
    double L = 0.0;
    int n = 0;
    if (std::sscanf(header.c_str(), "# half_width=%lf count=%d", &L, &n) != 2)
        throw std::runtime_error("malformed profile header in " + path);
    DensityProfile p(SpatialGrid(L, n));
    std::string line;
    for (int i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw std::runtime_error("truncated profile in " + path);
        const std::vector<double> vals = parse_csv_line(line);
        if (vals.size() != 2) throw std::runtime_error("malformed profile row in " + path);
        p[i] = vals[1];
    }
    return p;
}

void write_field(const std::string& path, const PhaseField& field) {
    std::ofstream out = open_out(path);
    out << "# L=" << format_double(field.xgrid().half_width()) << " n_x=" << field.nx()
        << " V=" << format_double(field.vgrid().half_width()) << " n_v=" << field.nv()
        << "\n";
    for (int i = 0; i < field.nx(); ++i) {
        for (int j = 0; j < field.nv(); ++j) {
            if (j) out << ",";
            out << format_double(field(i, j));
        }
        out << "\n";
    }
}

PhaseField read_field(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string header;
    std::getline(in, header);
    double L = 0.0, V = 0.0;
    int nx = 0, nv = 0;
    if (std::sscanf(header.c_str(), "# L=%lf n_x=%d V=%lf n_v=%d", &L, &nx, &V, &nv) != 4)
        throw std::runtime_error("malformed field header in " + path);
    PhaseField f(SpatialGrid(L, nx), VelocityGrid(V, nv));
    std::string line;
    for (int i = 0; i < nx; ++i) {
        if (!std::getline(in, line)) throw std::runtime_error("truncated field in " + path);
        const std::vector<double> vals = parse_csv_line(line);
        if (static_cast<int>(vals.size()) != nv)
            throw std::runtime_error("malformed field row in " + path);
        for (int j = 0; j < nv; ++j) f(i, j) = vals[j];
    }
    return f;
}

} // namespace kinchem
