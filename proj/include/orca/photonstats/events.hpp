#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "orca/photonstats/models.hpp"

namespace orca::photonstats {

struct EventRecord {
    Detector detector;
    std::int64_t trigger;
    std::int64_t time_ps;  // within the trigger frame

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

bool record_order(const EventRecord& a, const EventRecord& b);

struct EventStream {
    std::vector<EventRecord> records;
    std::int64_t trigger_period_ps = kTriggerPeriodPs;
    std::int64_t total_triggers = 0;
    Configuration config = Configuration::SIG;

    double duration_s() const { return 1e-12 * static_cast<double>(trigger_period_ps * total_triggers); }
    std::int64_t count(Detector d) const;
    std::int64_t absolute_time(const EventRecord& r) const { return r.trigger * trigger_period_ps + r.time_ps; }
};

void validate(const EventStream& s);
void sort_records(EventStream& s);

void write_stream(std::ostream& os, const EventStream& s);
EventStream read_stream(std::istream& is);
void save_stream(const std::string& path, const EventStream& s);
EventStream load_stream(const std::string& path);

}  // namespace orca::photonstats
