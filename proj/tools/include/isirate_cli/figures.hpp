#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace isirate::cli {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Full double precision, one header line.
void write_csv(std::ostream& out, const Table& table);

struct FigureOptions {
    /// Long Monte-Carlo profile instead of the desk profile.
    bool full = false;
    std::uint64_t seed = 1;
    std::optional<std::vector<double>> snr_db;
    std::optional<std::size_t> n_symbols;
    std::optional<std::size_t> n_seeds;
    std::optional<std::size_t> mc_samples;
};

struct FigureResult {
    std::string name;
    Table table;
    nlohmann::json manifest;
};

const std::vector<std::string>& figure_names();

/// Throws ConfigError for an unknown name.
FigureResult run_figure(const std::string& name, const FigureOptions& options = {});

/// Writes <dir>/<name>.csv and <dir>/<name>.json.
void write_figure(const FigureResult& result, const std::filesystem::path& dir);

} // namespace isirate::cli
