#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace magsim {

/// Empty cells are written as an empty field.
struct Empty {
    friend bool operator==(Empty, Empty) { return true; }
};

using Cell = std::variant<Empty, double, std::int64_t, std::uint64_t, std::string>;

struct Table {
    std::string name; // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
    std::size_t column(const std::string& name) const;
    /// CSV with a header line, LF endings and 17 significant digits.
    std::string to_csv() const;
};

/// 17 significant digits; non-finite values as nan, inf, -inf.
std::string format_double(double v);

struct RunMetadata {
    std::string command;
    std::string config_hash;
    std::string version = MAGSIM_VERSION;
    std::string timestamp; // UTC, ISO 8601
    std::uint64_t seed = 0;
    double wall_time_s = 0.0;
    nlohmann::json summary = nlohmann::json::object();

    nlohmann::json to_json() const;
};

std::string utc_timestamp();

/// Writes <dir>/<table>.csv for each table and <dir>/<command>.metadata.json.
/// Returns the paths written.
std::vector<std::filesystem::path> write_outputs(const std::vector<Table>& tables,
                                                 const RunMetadata& metadata,
                                                 const std::filesystem::path& dir);

} // namespace magsim
