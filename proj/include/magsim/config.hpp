#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "magsim/detection.hpp"
#include "magsim/optics.hpp"
#include "magsim/pbs_crosstalk.hpp"
#include "magsim/spin_dynamics.hpp"

namespace magsim {

struct SweepAxis {
    enum class Scale { Linear, Log };

    std::string name;
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 2;
    Scale scale = Scale::Linear;

    /// Grid points in ascending order, endpoints included exactly.
    std::vector<double> values() const;
};

struct SpinSection {
    spin::RateParams rates;
    spin::FieldConfig fields;
    spin::SlowingFactorMode q_mode;
    spin::BlochVector p0;
    double t_end = 0.0;
    double dt = 0.0;
    double transient_multiplier = 5.0;
    std::size_t output_stride = 1;
};

struct MziSection {
    std::vector<double> betas; // rad
    double p_min = 1e-15;
};

/// Parameters of the saturation study that are not sweep axes.
struct StudySection {
    double theta = 0.0;
    double beta = 0.0;
    std::size_t trials = 100;
};

struct RunConfig {
    std::optional<SpinSection> spin;
    std::optional<optics::OpticalParams> optics;
    std::optional<MziSection> mzi;
    std::optional<detection::DetectorConfig> detector;
    std::optional<StudySection> study;
    std::vector<pbs::PbsParams> splitters;
    std::map<std::string, SweepAxis> sweeps;
    std::string output_dir = "out";
    std::uint64_t seed = 0;

    std::string source_text; // raw bytes of the file the config came from
};

enum class ConfigFormat { Toml, Json };

/// Parse the TOML subset used by the presets: [section] and [a.b] headers,
/// key = value with numbers, strings, booleans and single-line arrays.
nlohmann::json parse_toml(std::string_view text);

/// Build and validate a RunConfig. Unknown sections or keys are rejected.
RunConfig config_from_json(const nlohmann::json& doc);

RunConfig parse_config(std::string_view text, ConfigFormat format);

/// Reads the file; ".json" selects JSON, anything else the TOML subset.
RunConfig load_config(const std::filesystem::path& path);

/// Hex SHA-256 of the config text.
std::string config_hash(std::string_view text);

} // namespace magsim
