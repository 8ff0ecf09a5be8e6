#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

namespace orca::photonstats {

enum class Detector : std::uint8_t { I = 0, S1 = 1, S2 = 2 };
enum class Configuration { SIG, MEM, RI, CTRL };

std::string to_string(Detector d);
std::string to_string(Configuration c);
Detector detector_from_string(const std::string& s);
Configuration configuration_from_string(const std::string& s);

inline constexpr std::int64_t kPulsePeriodPs = 12500;  // 80 MHz
inline constexpr std::int64_t kTriggerPeriodPs = 1000000;  // 1 MHz trigger

// Single-mode two-mode-squeezed-vacuum pair source and the loss chain up to the detectors.
struct PairSourceModel {
    double mu = 0.0077;             // mean pair number per pulse
    double eta_i = 0.097;           // idler transmission, source -> idler detector
    double eta_s = 0.38 * 0.128;    // signal transmission, source -> memory input
    double eta_s_post = 0.037 / 0.128;  // memory output -> signal detectors (before the 50/50 split)
    std::array<double, 3> detector_efficiency{0.5, 0.5, 0.5};
    std::array<double, 3> dark_rate_hz{163.0, 296.0, 356.0};
    double pulse_rate_hz = 80e6;
    double trigger_rate_hz = 1e6;
    int n_max = 10;
    double jitter_ps = 350.0;  // Gaussian rms detector timing spread

    double idler_detection() const { return eta_i * detector_efficiency[0]; }
    std::int64_t pulses_per_trigger() const;
};

void validate(const PairSourceModel& s);

// Truncated thermal law P(n) = mu^n / (1 + mu)^(n+1), n <= n_max, renormalised.
std::vector<double> thermal_distribution(double mu, int n_max);
double thermal_truncation_error(double mu, int n_max);

enum class NoiseKind { Poisson, Thermal };

struct MemorySlot {
    std::int64_t delay_ps;  // after the input pulse
    double efficiency;
};

// Phenomenological memory channel: read-in efficiency and the efficiencies with which a stored
// photon leaves at successive control pulses.
struct MemoryChannelModel {
    double eta_in = 0.7;
    std::vector<MemorySlot> slots;  // read-out slots, increasing delay
    double added_noise = 0.0;       // photons per read-out control pulse at the memory output
    NoiseKind noise_kind = NoiseKind::Poisson;
    std::int64_t storage_delay_ps = 3500;

    double total_efficiency() const;
};

void validate(const MemoryChannelModel& m);

// Every control pulse (read-in at 12.5 k ns and read-out at 12.5 k + tau) retrieves a fraction r of what
// is left; the stored excitation decays as exp(-t / lifetime). r is fixed by the first read-out efficiency.
MemoryChannelModel memory_from_lifetime(double eta_in, double eta_first, double lifetime_s, std::int64_t storage_delay_ps,
                                        int n_slots = 8);

struct Gate {
    std::int64_t center_ps;
    std::int64_t width_ps;
    bool contains(std::int64_t t) const { return 2 * std::abs(t - center_ps) <= width_ps; }
};

struct GateSpec {
    std::int64_t idler_center_ps = 4000;   // within each pulse period
    std::int64_t signal_center_ps = 4000;  // read-in gate centre
    std::int64_t read_in_width_ps = 2500;
    std::int64_t read_out_offset_ps = 3500;
    std::int64_t read_out_width_ps = 2500;
    std::int64_t coincidence_window_ps = 3500;
    std::int64_t arrival_bin_ps = 200;
    std::int64_t coincidence_bin_ps = 100;

    Gate idler_gate() const { return {idler_center_ps, read_in_width_ps}; }
    // Signal gate displaced by `delay_ps` from the read-in gate; read-out width when the delay is not a
    // whole number of pulse periods.
    Gate signal_gate(std::int64_t delay_ps) const;
};

void validate(const GateSpec& g);

// Standard readout slots of the successive-readout table: 0, 3.5, 12.5, 16, 25, 28.5 ns.
std::vector<std::int64_t> readout_slots(const GateSpec& g, int periods = 3);

// Where a signal photon ends up: delay after its pulse and the probability of reaching the 50/50 splitter
// in front of the signal detectors at that delay.
struct SignalRoute {
    std::int64_t delay_ps;
    double probability;
};
std::vector<SignalRoute> signal_routes(const PairSourceModel& s, const MemoryChannelModel& m, Configuration c);

bool signal_on(Configuration c);
// Read-out control pulses are applied (and so can add noise) in MEM and CTRL.
bool readout_on(Configuration c);

}  // namespace orca::photonstats
