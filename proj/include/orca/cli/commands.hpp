#pragma once

#include <json.hpp>

#include "orca/cli/config.hpp"
#include "orca/cli/output.hpp"

namespace orca::cli {

// Each command takes a resolved config, writes its tables and `report.json` into the sink directory and
// returns the report body.
json cmd_lifetime(const json& config, const OutputSink& sink);
json cmd_efficiency_sweep(const json& config, const OutputSink& sink);
json cmd_counts(const json& config, const OutputSink& sink);
json cmd_absorption(const json& config, const OutputSink& sink);

json run_command(Command c, const json& config, const OutputSink& sink);

}  // namespace orca::cli
