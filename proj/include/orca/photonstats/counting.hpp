#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orca/photonstats/events.hpp"
#include "orca/photonstats/models.hpp"

namespace orca::photonstats {

struct CountSummary {
    std::int64_t R_T = 0;  // gate instances (one per pulse)
    std::int64_t R_i = 0;
    std::int64_t R_s1 = 0;
    std::int64_t R_s2 = 0;
    std::int64_t R_s1i = 0;
    std::int64_t R_s2i = 0;
    std::int64_t R_trip = 0;

    std::int64_t R_s() const { return R_s1 + R_s2; }
    std::int64_t R_si() const { return R_s1i + R_s2i; }
    CountSummary& operator+=(const CountSummary& o);
    friend bool operator==(const CountSummary&, const CountSummary&) = default;
};

struct CorrelationResult {
    double value = 0.0;
    double sigma = 0.0;
    CountSummary counts;
    double threshold = 0.0;   // 2 for g11 (classical bound), 1 for g2h (Poissonian)
    bool nonclassical = false;
};

// Click flags per pulse: a detector counts once per gate instance, however many records fall inside.
// Idler gate at each pulse, signal gates displaced by slot_delay_ps from the read-in gate.
CountSummary gated_counts(const EventStream& s, const GateSpec& g, std::int64_t slot_delay_ps);

CorrelationResult g11(const CountSummary& c);
CorrelationResult g2h(const CountSummary& c);

struct SlotCorrelation {
    std::int64_t delay_ps;
    CorrelationResult g11;
};

// g11 in successive gates; for a SIG stream only the read-in (12.5 k ns) gates are evaluated.
std::vector<SlotCorrelation> readout_series(const EventStream& s, const GateSpec& g,
                                            const std::vector<std::int64_t>& slots);

}  // namespace orca::photonstats
