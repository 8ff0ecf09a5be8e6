#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace orca::cli {

using nlohmann::json;

enum class TableFormat { Csv, Json };

// Where a run writes and what it stamps on every file.
struct OutputSink {
    std::filesystem::path dir;
    std::string command;
    std::string config_hash;
    TableFormat format = TableFormat::Csv;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string format_number(double x);

// `<name>.csv` with a header comment carrying tool version and config hash, or `<name>.json` when the sink
// asks for JSON tables. Returns the file name written.
std::string write_table(const OutputSink& sink, const std::string& name, const Table& t);

// Writes `<name>.json`: {tool, version, command, config_sha256, ...body}.
std::string write_report(const OutputSink& sink, const std::string& name, const json& body);

json table_to_json(const Table& t);

const char* tool_version();

}  // namespace orca::cli
