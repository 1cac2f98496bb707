#include "magsim/table.hpp"

#include "magsim/error.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fmt/format.h>
#include <fstream>

namespace magsim {

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
        throw Error("internal", fmt::format("table {}: row has {} cells, expected {}", name,
                                            row.size(), columns.size()));
    rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& col) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == col) return i;
    throw Error("internal", fmt::format("table {}: no column {}", name, col));
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", v);
}

std::string Table::to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += columns[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            std::visit(
                [&out](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, Empty>) {
                    } else if constexpr (std::is_same_v<T, double>) {
                        out += format_double(v);
                    } else if constexpr (std::is_same_v<T, std::string>) {
                        out += v;
                    } else {
                        out += fmt::format("{}", v);
                    }
                },
                row[i]);
        }
        out += '\n';
    }
    return out;
}

nlohmann::json RunMetadata::to_json() const {
    return {{"command", command},       {"config_hash", config_hash}, {"version", version},
            {"timestamp", timestamp},   {"seed", seed},               {"wall_time_s", wall_time_s},
            {"summary", summary}};
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot open {} for writing", path.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError(fmt::format("write to {} failed", path.string()));
}

} // namespace

std::vector<std::filesystem::path> write_outputs(const std::vector<Table>& tables,
                                                 const RunMetadata& metadata,
                                                 const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));

    std::vector<std::filesystem::path> written;
    for (const auto& t : tables) {
        const auto path = dir / (t.name + ".csv");
        write_file(path, t.to_csv());
        written.push_back(path);
    }
    const auto meta_path = dir / (metadata.command + ".metadata.json");
    write_file(meta_path, metadata.to_json().dump(2) + "\n");
    written.push_back(meta_path);
    return written;
}

} // namespace magsim
