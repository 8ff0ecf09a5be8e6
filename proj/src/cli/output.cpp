#include "orca/cli/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "orca/errors.hpp"

namespace orca::cli {

const char* tool_version() { return ORCA_VERSION; }

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

json table_to_json(const Table& t) {
    json cols = json::object();
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        json col = json::array();
        for (const auto& r : t.rows) col.push_back(std::isfinite(r[c]) ? json(r[c]) : json(nullptr));
        cols[t.columns[c]] = col;
    }
    return cols;
}

static std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + p.string());
    return os;
}

static json stamped(const OutputSink& sink, const json& body) {
    json j = {{"tool", "orca"}, {"version", tool_version()}, {"command", sink.command}, {"config_sha256", sink.config_hash}};
    for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
    return j;
}

std::string write_table(const OutputSink& sink, const std::string& name, const Table& t) {
    std::filesystem::create_directories(sink.dir);
    if (sink.format == TableFormat::Json) {
        const std::string file = name + ".json";
        auto os = open_out(sink.dir / file);
        os << stamped(sink, {{"table", name}, {"columns", table_to_json(t)}}).dump(2) << '\n';
        return file;
    }
    const std::string file = name + ".csv";
    auto os = open_out(sink.dir / file);
    os << "# orca " << tool_version() << ' ' << sink.command << " config_sha256=" << sink.config_hash << '\n';
    for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
    os << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << format_number(r[c]);
        os << '\n';
    }
    return file;
}

std::string write_report(const OutputSink& sink, const std::string& name, const json& body) {
    std::filesystem::create_directories(sink.dir);
    const std::string file = name + ".json";
    auto os = open_out(sink.dir / file);
    os << stamped(sink, body).dump(2) << '\n';
    return file;
}

}  // namespace orca::cli
