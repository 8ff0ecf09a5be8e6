#pragma once

#include <cstdint>

#include "orca/photonstats/models.hpp"

namespace orca::photonstats {

// Per gate instance probabilities for threshold detectors, summed exactly over the truncated pair-number law
// of every pulse that can put light into the gates, with Gaussian jitter acceptance and per-gate dark clicks.
struct ClickProbabilities {
    double p_i = 0, p_s1 = 0, p_s2 = 0, p_s1i = 0, p_s2i = 0, p_trip = 0;
    double truncation_error = 0;

    double g11() const;
    double g2h() const;
};

ClickProbabilities exact_click_probabilities(const PairSourceModel& source, const MemoryChannelModel& memory,
                                             const GateSpec& gates, Configuration config, std::int64_t slot_delay_ps,
                                             double tolerance = 1e-8);

// Heralded photon-number moments of the light in the signal gate that comes from the heralding pulse itself
// (plus added memory noise): g11 = <I S>/(<I><S>), g2h = <I><I S1 S2>/(<I S1><I S2>), I the idler click.
// Both are exactly independent of signal-arm loss; darks and other pulses are left out.
struct HeraldedMoments {
    double g11 = 0;
    double g2h = 0;
    double mean_signal = 0;  // detected signal photons per herald
};

HeraldedMoments heralded_moments(const PairSourceModel& source, const MemoryChannelModel& memory, const GateSpec& gates,
                                 Configuration config, std::int64_t slot_delay_ps);

}  // namespace orca::photonstats
