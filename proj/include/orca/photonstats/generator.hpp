#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "orca/photonstats/counting.hpp"
#include "orca/photonstats/events.hpp"
#include "orca/photonstats/models.hpp"

namespace orca::photonstats {

enum class Execution { Serial, Parallel };

struct GeneratorOptions {
    std::int64_t block_triggers = 100;
    Execution execution = Execution::Parallel;
};

EventStream simulate_event_stream(const PairSourceModel& source, const MemoryChannelModel& memory, const GateSpec& gates,
                                  Configuration config, std::int64_t n_triggers, std::uint64_t seed,
                                  const GeneratorOptions& opts = {});

// One stream per shutter configuration, duration in seconds of acquisition.
std::map<Configuration, EventStream> simulate_event_streams(const PairSourceModel& source, const MemoryChannelModel& memory,
                                                            const GateSpec& gates, double duration_s, std::uint64_t seed,
                                                            const GeneratorOptions& opts = {});

// Streaming variant for long runs: each block is generated, gated and discarded. Records that would spill past
// a block end are dropped, so block edges lose at most the few pulses covered by the longest slot delay.
std::vector<CountSummary> simulate_gated_counts(const PairSourceModel& source, const MemoryChannelModel& memory,
                                                const GateSpec& gates, Configuration config,
                                                const std::vector<std::int64_t>& slots, std::int64_t n_triggers,
                                                std::uint64_t seed, const GeneratorOptions& opts = {});

}  // namespace orca::photonstats
