#include "atomlaser/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "atomlaser/errors.hpp"

namespace atomlaser {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace

const std::vector<double>& SeriesTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return data[i];
    throw InvalidParameter("SeriesTable: no column '" + name + "'");
}

void write_series_csv(const std::filesystem::path& path, const SeriesTable& table,
                      const std::vector<std::string>& meta_lines) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    for (const auto& line : meta_lines)
        out << "# " << line << "\n";
    if (!table.units.empty()) {
        out << "# units:";
        for (std::size_t c = 0; c < table.units.size(); ++c)
            out << (c ? "," : " ") << table.units[c];
        out << "\n";
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << (c ? "," : "") << table.columns[c];
    out << "\n";
    std::size_t n = table.rows();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < table.data.size(); ++c)
            out << (c ? "," : "") << format_double(table.data[c][r]);
        out << "\n";
    }
    if (!out)
        throw IoError("failed writing " + path.string());
}

SeriesTable read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read " + path.string());
    SeriesTable table;
    std::string line;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.front() == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        if (!header_done) {
            while (std::getline(ss, cell, ','))
                table.columns.push_back(cell);
            table.data.resize(table.columns.size());
            header_done = true;
            continue;
        }
        std::size_t c = 0;
        while (std::getline(ss, cell, ',')) {
            if (c >= table.data.size())
                throw IoError(path.string() + ": row wider than header");
            table.data[c++].push_back(std::strtod(cell.c_str(), nullptr));
        }
        if (c != table.data.size())
            throw IoError(path.string() + ": row narrower than header");
    }
    if (!header_done)
        throw IoError(path.string() + ": no column header found");
    return table;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << j.dump(2) << "\n";
    if (!out)
        throw IoError("failed writing " + path.string());
}

nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    return j;
}

void dump_wavefunction(const std::filesystem::path& path, const WaveField& field,
                       const nlohmann::json& header) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    nlohmann::json h = header;
    h["n_points"] = field.grid.n_points;
    h["x_min"] = field.grid.x_min;
    h["x_max"] = field.grid.x_max;
    h["t"] = field.t;
    h["n_components"] = field.n_components;
    out << "# " << h.dump() << "\n";
    out << "x";
    for (int c = 0; c < field.n_components; ++c) {
        int m = c - 1;
        out << ",re_m" << m << ",im_m" << m;
    }
    out << "\n";
    for (int i = 0; i < field.grid.n_points; ++i) {
        out << format_double(field.grid.x[i]);
        for (int c = 0; c < field.n_components; ++c)
            out << "," << format_double(field.psi[c][std::size_t(i)].real()) << ","
                << format_double(field.psi[c][std::size_t(i)].imag());
        out << "\n";
    }
    if (!out)
        throw IoError("failed writing " + path.string());
}

} // namespace atomlaser
