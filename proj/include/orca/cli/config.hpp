#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "orca/mbsolver/memory.hpp"
#include "orca/photonstats/models.hpp"

namespace orca::cli {

using nlohmann::json;

enum class Command { Lifetime, Efficiency, Counts, Absorption };

std::string to_string(Command c);
Command command_from_string(const std::string& s);

// Every key a command understands, with its default value.
json default_config(Command c);

// Defaults overlaid with `user` (JSON merge patch). Keys that the command does not know and values of the wrong
// type are configuration errors; the typed models are built once so that bad values fail here too.
json resolve_config(Command c, const json& user);

json load_config_file(const std::filesystem::path& path);

// Lower-case hex SHA-256 of the compact dump of the resolved config.
std::string config_hash(const json& resolved);

// A list of numbers, or {"start", "stop", "count"} for an evenly spaced axis.
std::vector<double> axis(const json& spec, const std::string& name);

mbsolver::MemorySetup memory_setup(const json& c);
mbsolver::ProtocolSchedule memory_schedule(const json& c, const atomphys::SpeciesRecord& species);

photonstats::PairSourceModel source_model(const json& c);
photonstats::MemoryChannelModel memory_channel(const json& c);
photonstats::GateSpec gate_spec(const json& c);

}  // namespace orca::cli
