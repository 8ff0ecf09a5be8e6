#include "orca/photonstats/events.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "orca/errors.hpp"

namespace orca::photonstats {

bool record_order(const EventRecord& a, const EventRecord& b) {
    if (a.trigger != b.trigger) return a.trigger < b.trigger;
    if (a.time_ps != b.time_ps) return a.time_ps < b.time_ps;
    return a.detector < b.detector;
}

std::int64_t EventStream::count(Detector d) const {
    return std::count_if(records.begin(), records.end(), [d](const EventRecord& r) { return r.detector == d; });
}

void validate(const EventStream& s) {
    if (s.trigger_period_ps <= 0) throw ConfigError("event stream: trigger period must be > 0");
    if (s.total_triggers <= 0) throw ConfigError("event stream: total triggers must be > 0");
    for (std::size_t k = 0; k < s.records.size(); ++k) {
        const auto& r = s.records[k];
        if (r.time_ps < 0 || r.time_ps >= s.trigger_period_ps) throw ConfigError("event stream: time outside trigger frame");
        if (r.trigger < 0 || r.trigger >= s.total_triggers) throw ConfigError("event stream: trigger index out of range");
        if (k > 0 && record_order(r, s.records[k - 1])) throw ConfigError("event stream: records not sorted");
    }
}

void sort_records(EventStream& s) { std::sort(s.records.begin(), s.records.end(), record_order); }

void write_stream(std::ostream& os, const EventStream& s) {
    os << "#trigger_period_ps " << s.trigger_period_ps << '\n';
    os << "#total_triggers " << s.total_triggers << '\n';
    os << "#config " << to_string(s.config) << '\n';
    for (const auto& r : s.records) os << to_string(r.detector) << ' ' << r.trigger << ' ' << r.time_ps << '\n';
}

EventStream read_stream(std::istream& is) {
    EventStream s;
    s.trigger_period_ps = 0;
    bool have_period = false, have_total = false, have_config = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (line[0] == '#') {
            std::string key;
            ls >> key;
            if (key == "#trigger_period_ps") {
                have_period = static_cast<bool>(ls >> s.trigger_period_ps);
            } else if (key == "#total_triggers") {
                have_total = static_cast<bool>(ls >> s.total_triggers);
            } else if (key == "#config") {
                std::string c;
                ls >> c;
                s.config = configuration_from_string(c);
                have_config = true;
            }
            continue;
        }
        std::string det;
        EventRecord r{};
        if (!(ls >> det >> r.trigger >> r.time_ps))
            throw ConfigError("event stream: malformed record on line " + std::to_string(lineno));
        r.detector = detector_from_string(det);
        s.records.push_back(r);
    }
    if (!have_period || !have_total || !have_config) throw ConfigError("event stream: missing header line");
    validate(s);
    return s;
}

void save_stream(const std::string& path, const EventStream& s) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    write_stream(os, s);
}

EventStream load_stream(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path);
    return read_stream(is);
}

}  // namespace orca::photonstats
