#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "atomlaser/wavefield.hpp"

namespace atomlaser {

// Column-oriented numeric table, written as CSV behind a '#' metadata block.
struct SeriesTable {
    std::vector<std::string> columns;
    std::vector<std::string> units;
    std::vector<std::vector<double>> data; // data[col][row]

    std::size_t rows() const { return data.empty() ? 0 : data[0].size(); }
    const std::vector<double>& column(const std::string& name) const;
};

// One completed experiment: manifest (full resolved config), summary
// scalars, and the time-series table, mirrored on disk.
struct RunReport {
    nlohmann::json manifest;
    nlohmann::json summary;
    SeriesTable series;
    std::filesystem::path out_dir;
};

void write_series_csv(const std::filesystem::path& path, const SeriesTable& table,
                      const std::vector<std::string>& meta_lines);
SeriesTable read_series_csv(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

// Wavefunction snapshot: '#'-prefixed JSON header (grid, time, parameters)
// followed by rows of x and Re/Im of every component.
void dump_wavefunction(const std::filesystem::path& path, const WaveField& field,
                       const nlohmann::json& header);

} // namespace atomlaser
