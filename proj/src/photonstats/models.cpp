#include "orca/photonstats/models.hpp"

#include <cmath>

#include "orca/errors.hpp"

namespace orca::photonstats {

std::string to_string(Detector d) {
    switch (d) {
        case Detector::I: return "i";
        case Detector::S1: return "s1";
        case Detector::S2: return "s2";
    }
    return "?";
}

std::string to_string(Configuration c) {
    switch (c) {
        case Configuration::SIG: return "SIG";
        case Configuration::MEM: return "MEM";
        case Configuration::RI: return "RI";
        case Configuration::CTRL: return "CTRL";
    }
    return "?";
}

Detector detector_from_string(const std::string& s) {
    if (s == "i") return Detector::I;
    if (s == "s1") return Detector::S1;
    if (s == "s2") return Detector::S2;
    throw ConfigError("unknown detector id '" + s + "'");
}

Configuration configuration_from_string(const std::string& s) {
    if (s == "SIG") return Configuration::SIG;
    if (s == "MEM") return Configuration::MEM;
    if (s == "RI") return Configuration::RI;
    if (s == "CTRL") return Configuration::CTRL;
    throw ConfigError("unknown configuration '" + s + "'");
}

static bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

std::int64_t PairSourceModel::pulses_per_trigger() const {
    return static_cast<std::int64_t>(std::llround(pulse_rate_hz / trigger_rate_hz));
}

void validate(const PairSourceModel& s) {
    if (!(s.mu >= 0.0) || !std::isfinite(s.mu)) throw ConfigError("source: mu must be finite and >= 0");
    if (!is_probability(s.eta_i) || !is_probability(s.eta_s) || !is_probability(s.eta_s_post))
        throw ConfigError("source: transmissions must lie in [0, 1]");
    for (int d = 0; d < 3; ++d) {
        if (!is_probability(s.detector_efficiency[d])) throw ConfigError("source: detector efficiency outside [0, 1]");
        if (!(s.dark_rate_hz[d] >= 0.0) || !std::isfinite(s.dark_rate_hz[d]))
            throw ConfigError("source: dark rates must be finite and >= 0");
    }
    if (!(s.pulse_rate_hz > 0) || !(s.trigger_rate_hz > 0) || s.trigger_rate_hz > s.pulse_rate_hz)
        throw ConfigError("source: need pulse rate >= trigger rate > 0");
    const double ratio = s.pulse_rate_hz / s.trigger_rate_hz;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
        throw ConfigError("source: pulse rate must be an integer multiple of the trigger rate");
    if (std::abs(1e12 / s.pulse_rate_hz - static_cast<double>(kPulsePeriodPs)) > 0.5)
        throw ConfigError("source: pulse period must be 12.5 ns");
    if (s.n_max < 1 || s.n_max > 20) throw ConfigError("source: n_max must lie in [1, 20]");
    if (!(s.jitter_ps >= 0.0)) throw ConfigError("source: jitter must be >= 0");
}

std::vector<double> thermal_distribution(double mu, int n_max) {
    if (mu < 0 || n_max < 0) throw DomainError("thermal_distribution: need mu >= 0 and n_max >= 0");
    std::vector<double> p(static_cast<std::size_t>(n_max) + 1);
    const double x = mu / (1.0 + mu);
    double term = 1.0 / (1.0 + mu);
    double sum = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        p[static_cast<std::size_t>(n)] = term;
        sum += term;
        term *= x;
    }
    for (auto& v : p) v /= sum;
    return p;
}

double thermal_truncation_error(double mu, int n_max) { return std::pow(mu / (1.0 + mu), n_max + 1); }

double MemoryChannelModel::total_efficiency() const {
    double s = 0.0;
    for (const auto& sl : slots) s += sl.efficiency;
    return s;
}

void validate(const MemoryChannelModel& m) {
    if (!is_probability(m.eta_in)) throw ConfigError("memory: eta_in must lie in [0, 1]");
    if (m.storage_delay_ps < 0) throw ConfigError("memory: storage delay must be >= 0");
    std::int64_t last = 0;
    for (const auto& s : m.slots) {
        if (s.delay_ps <= last) throw ConfigError("memory: slot delays must be positive and increasing");
        if (!is_probability(s.efficiency)) throw ConfigError("memory: slot efficiency outside [0, 1]");
        last = s.delay_ps;
    }
    if (m.total_efficiency() > m.eta_in + 1e-12) throw ConfigError("memory: read-out efficiencies exceed eta_in");
    if (!(m.added_noise >= 0.0) || !std::isfinite(m.added_noise)) throw ConfigError("memory: added noise must be >= 0");
}

MemoryChannelModel memory_from_lifetime(double eta_in, double eta_first, double lifetime_s, std::int64_t storage_delay_ps,
                                        int n_slots) {
    if (!is_probability(eta_in) || !(eta_first >= 0) || !(lifetime_s > 0) || storage_delay_ps <= 0 ||
        storage_delay_ps >= kPulsePeriodPs || n_slots < 1)
        throw ConfigError("memory_from_lifetime: invalid arguments");
    const double tau_ps = lifetime_s * 1e12;
    MemoryChannelModel m;
    m.eta_in = eta_in;
    m.storage_delay_ps = storage_delay_ps;
    const double r = eta_in > 0 ? eta_first / (eta_in * std::exp(-static_cast<double>(storage_delay_ps) / tau_ps)) : 0.0;
    if (r > 1.0) throw ConfigError("memory_from_lifetime: first read-out efficiency not reachable with this lifetime");
    double left = 1.0;
    for (int k = 0; k < n_slots; ++k) {
        const std::int64_t t = (k % 2 == 0) ? (k / 2) * kPulsePeriodPs + storage_delay_ps : (k / 2 + 1) * kPulsePeriodPs;
        m.slots.push_back({t, eta_in * std::exp(-static_cast<double>(t) / tau_ps) * r * left});
        left *= 1.0 - r;
    }
    return m;
}

Gate GateSpec::signal_gate(std::int64_t delay_ps) const {
    const bool read_in = delay_ps % kPulsePeriodPs == 0;
    return {signal_center_ps + delay_ps, read_in ? read_in_width_ps : read_out_width_ps};
}

void validate(const GateSpec& g) {
    if (g.read_in_width_ps <= 0 || g.read_out_width_ps <= 0 || g.coincidence_window_ps <= 0 || g.arrival_bin_ps <= 0 ||
        g.coincidence_bin_ps <= 0)
        throw ConfigError("gates: widths must be > 0");
    if (g.read_out_offset_ps <= 0 || g.read_out_offset_ps >= kPulsePeriodPs)
        throw ConfigError("gates: read-out offset must lie inside one pulse period");
    const auto in_frame = [](const Gate& x) {
        return 2 * x.center_ps - x.width_ps >= 0 && 2 * x.center_ps + x.width_ps <= 2 * kPulsePeriodPs;
    };
    if (!in_frame(g.idler_gate()) || !in_frame(g.signal_gate(0)))
        throw ConfigError("gates: read-in gates must lie inside the pulse period");
    const Gate in = g.signal_gate(0);
    const Gate out = g.signal_gate(g.read_out_offset_ps);
    if (2 * (out.center_ps - in.center_ps) < in.width_ps + out.width_ps)
        throw ConfigError("gates: read-in and read-out gates overlap");
    const std::int64_t next = kPulsePeriodPs + in.center_ps;
    if (2 * (next - out.center_ps) < in.width_ps + out.width_ps)
        throw ConfigError("gates: read-out gate overlaps the next read-in gate");
}

std::vector<std::int64_t> readout_slots(const GateSpec& g, int periods) {
    std::vector<std::int64_t> out;
    for (int k = 0; k < periods; ++k) {
        out.push_back(k * kPulsePeriodPs);
        out.push_back(k * kPulsePeriodPs + g.read_out_offset_ps);
    }
    return out;
}

bool readout_on(Configuration c) { return c == Configuration::MEM || c == Configuration::CTRL; }
bool signal_on(Configuration c) { return c != Configuration::CTRL; }

std::vector<SignalRoute> signal_routes(const PairSourceModel& s, const MemoryChannelModel& m, Configuration c) {
    std::vector<SignalRoute> out;
    if (!signal_on(c)) return out;
    const double arm = s.eta_s * s.eta_s_post;
    const double prompt = c == Configuration::SIG ? 1.0 : 1.0 - m.eta_in;
    out.push_back({0, arm * prompt});
    if (c == Configuration::MEM)
        for (const auto& sl : m.slots) out.push_back({sl.delay_ps, arm * sl.efficiency});
    return out;
}

}  // namespace orca::photonstats
