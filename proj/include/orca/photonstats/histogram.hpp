#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "orca/photonstats/events.hpp"

namespace orca::photonstats {

struct Histogram {
    std::int64_t origin_ps = 0;  // left edge of bin 0
    std::int64_t bin_ps = 0;
    std::vector<double> counts;

    std::int64_t bin_center(std::size_t k) const { return origin_ps + static_cast<std::int64_t>(k) * bin_ps + bin_ps / 2; }
    double total() const;
};

// Arrival times within the trigger frame; `normalize` divides by the acquisition duration (counts -> Hz per bin).
Histogram arrival_histogram(const EventStream& s, std::int64_t bin_ps, std::optional<Detector> detector = std::nullopt,
                            bool normalize = false);

enum class StopChannel { S1, S2, S1S2 };

struct StartStopOptions {
    std::int64_t bin_ps = 100;
    std::int64_t range_lo_ps = -12500;
    std::int64_t range_hi_ps = 37500;
    std::int64_t coincidence_window_ps = 3500;  // s1 & s2 must fire within this full width
};

// Every idler click starts; every stop click with t_stop - t_start in [lo, hi) is histogrammed.
Histogram startstop_histogram(const EventStream& s, StopChannel stop, const StartStopOptions& opts = {});

}  // namespace orca::photonstats
