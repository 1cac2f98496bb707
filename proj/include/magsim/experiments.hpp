#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "magsim/config.hpp"
#include "magsim/table.hpp"

namespace magsim {

struct ExperimentResult {
    std::vector<Table> tables;
    nlohmann::json summary = nlohmann::json::object();
    std::vector<std::string> warnings;
};

/// fig2a, fig2b, fig3, fig6, snr, saturation.
const std::vector<std::string>& command_names();

/// Throws ValidationError naming the first section or sweep axis the
/// command needs but the config lacks.
void require_sections(const std::string& command, const RunConfig& cfg);

ExperimentResult run_fig2a(const RunConfig& cfg);
ExperimentResult run_fig2b(const RunConfig& cfg);
ExperimentResult run_fig3(const RunConfig& cfg);
ExperimentResult run_fig6(const RunConfig& cfg);
ExperimentResult run_snr(const RunConfig& cfg);
ExperimentResult run_saturation(const RunConfig& cfg);

ExperimentResult run_command(const std::string& command, const RunConfig& cfg);

} // namespace magsim
