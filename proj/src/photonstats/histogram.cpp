#include "orca/photonstats/histogram.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

#include "orca/errors.hpp"

namespace orca::photonstats {

double Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), 0.0); }

Histogram arrival_histogram(const EventStream& s, std::int64_t bin_ps, std::optional<Detector> detector, bool normalize) {
    if (bin_ps <= 0 || s.trigger_period_ps % bin_ps != 0)
        throw ConfigError("arrival_histogram: bin width must divide the trigger period");
    Histogram h;
    h.bin_ps = bin_ps;
    h.counts.assign(static_cast<std::size_t>(s.trigger_period_ps / bin_ps), 0.0);
    for (const auto& r : s.records) {
        if (detector && r.detector != *detector) continue;
        h.counts[static_cast<std::size_t>(r.time_ps / bin_ps)] += 1.0;
    }
    if (normalize) {
        const double dur = s.duration_s();
        for (auto& c : h.counts) c /= dur;
    }
    return h;
}

static std::vector<std::int64_t> times_of(const EventStream& s, Detector d) {
    std::vector<std::int64_t> t;
    for (const auto& r : s.records)
        if (r.detector == d) t.push_back(s.absolute_time(r));
    return t;  // records are sorted, so these are too
}

Histogram startstop_histogram(const EventStream& s, StopChannel stop, const StartStopOptions& o) {
    if (o.bin_ps <= 0 || o.range_hi_ps <= o.range_lo_ps || (o.range_hi_ps - o.range_lo_ps) % o.bin_ps != 0)
        throw ConfigError("startstop_histogram: range must be a positive whole number of bins");
    if (o.coincidence_window_ps <= 0) throw ConfigError("startstop_histogram: coincidence window must be > 0");
    const auto starts = times_of(s, Detector::I);
    std::vector<std::int64_t> stops;
    if (stop == StopChannel::S1) {
        stops = times_of(s, Detector::S1);
    } else if (stop == StopChannel::S2) {
        stops = times_of(s, Detector::S2);
    } else {
        const auto a = times_of(s, Detector::S1);
        const auto b = times_of(s, Detector::S2);
        std::size_t lo = 0;
        for (const auto t : a) {
            while (lo < b.size() && 2 * (t - b[lo]) > o.coincidence_window_ps) ++lo;
            for (std::size_t k = lo; k < b.size() && 2 * (b[k] - t) <= o.coincidence_window_ps; ++k)
                stops.push_back(std::min(t, b[k]) + std::abs(t - b[k]) / 2);
        }
        std::sort(stops.begin(), stops.end());
    }
    Histogram h;
    h.origin_ps = o.range_lo_ps;
    h.bin_ps = o.bin_ps;
    h.counts.assign(static_cast<std::size_t>((o.range_hi_ps - o.range_lo_ps) / o.bin_ps), 0.0);
    std::size_t first = 0;
    for (const auto t0 : starts) {
        while (first < stops.size() && stops[first] - t0 < o.range_lo_ps) ++first;
        for (std::size_t k = first; k < stops.size(); ++k) {
            const std::int64_t dt = stops[k] - t0;
            if (dt >= o.range_hi_ps) break;
            h.counts[static_cast<std::size_t>((dt - o.range_lo_ps) / o.bin_ps)] += 1.0;
        }
    }
    return h;
}

}  // namespace orca::photonstats
