#include "orca/photonstats/counting.hpp"

#include <algorithm>
#include <cmath>

#include "orca/errors.hpp"

namespace orca::photonstats {

CountSummary& CountSummary::operator+=(const CountSummary& o) {
    R_T += o.R_T;
    R_i += o.R_i;
    R_s1 += o.R_s1;
    R_s2 += o.R_s2;
    R_s1i += o.R_s1i;
    R_s2i += o.R_s2i;
    R_trip += o.R_trip;
    return *this;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

// Sorted, de-duplicated pulse indices whose gate (centre offset `gate.center_ps` within the pulse) holds a record.
std::vector<std::int64_t> flagged_pulses(const EventStream& s, Detector d, const Gate& gate, std::int64_t n_pulses) {
    std::vector<std::int64_t> out;
    for (const auto& r : s.records) {
        if (r.detector != d) continue;
        const std::int64_t t = s.absolute_time(r);
        const std::int64_t p = floor_div(t - gate.center_ps + kPulsePeriodPs / 2, kPulsePeriodPs);
        if (p < 0 || p >= n_pulses) continue;
        if (!gate.contains(t - p * kPulsePeriodPs)) continue;
        out.push_back(p);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::int64_t> intersect(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    std::vector<std::int64_t> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace

CountSummary gated_counts(const EventStream& s, const GateSpec& g, std::int64_t slot_delay_ps) {
    validate(g);
    if (slot_delay_ps < 0) throw ConfigError("gated_counts: slot delay must be >= 0");
    if (s.trigger_period_ps % kPulsePeriodPs != 0) throw ConfigError("gated_counts: trigger period is not a whole number of pulses");
    const Gate gi = g.idler_gate();
    const Gate gs = g.signal_gate(slot_delay_ps);
    const std::int64_t span = s.trigger_period_ps * s.total_triggers;
    const std::int64_t reach = std::max(2 * gi.center_ps + gi.width_ps, 2 * gs.center_ps + gs.width_ps);
    // Pulses whose gates close before the end of the acquisition.
    const std::int64_t n_pulses = std::max<std::int64_t>(0, floor_div(2 * span - reach, 2 * kPulsePeriodPs) + 1);
    CountSummary c;
    c.R_T = n_pulses;
    const auto pi = flagged_pulses(s, Detector::I, gi, n_pulses);
    const auto p1 = flagged_pulses(s, Detector::S1, gs, n_pulses);
    const auto p2 = flagged_pulses(s, Detector::S2, gs, n_pulses);
    const auto p1i = intersect(p1, pi);
    const auto p2i = intersect(p2, pi);
    c.R_i = static_cast<std::int64_t>(pi.size());
    c.R_s1 = static_cast<std::int64_t>(p1.size());
    c.R_s2 = static_cast<std::int64_t>(p2.size());
    c.R_s1i = static_cast<std::int64_t>(p1i.size());
    c.R_s2i = static_cast<std::int64_t>(p2i.size());
    c.R_trip = static_cast<std::int64_t>(intersect(p1i, p2).size());
    return c;
}

CorrelationResult g11(const CountSummary& c) {
    if (c.R_s() <= 0 || c.R_i <= 0 || c.R_T <= 0) throw UndefinedResultError("g11: zero singles count");
    const double rsi = static_cast<double>(c.R_si());
    const double rs = static_cast<double>(c.R_s());
    const double ri = static_cast<double>(c.R_i);
    const double rt = static_cast<double>(c.R_T);
    CorrelationResult r;
    r.counts = c;
    r.value = rsi * rt / (rs * ri);
    // A zero coincidence count still carries an uncertainty of one count.
    const double scale = rt / (rs * ri);
    r.sigma = std::sqrt(scale * scale * std::max(rsi, 1.0) + r.value * r.value * (1.0 / rs + 1.0 / ri + 1.0 / rt));
    r.threshold = 2.0;
    r.nonclassical = r.value > r.threshold;
    return r;
}

CorrelationResult g2h(const CountSummary& c) {
    if (c.R_s1i <= 0 || c.R_s2i <= 0 || c.R_i <= 0) throw UndefinedResultError("g2h: zero two-fold coincidence count");
    const double r1 = static_cast<double>(c.R_s1i);
    const double r2 = static_cast<double>(c.R_s2i);
    const double ri = static_cast<double>(c.R_i);
    const double rt = static_cast<double>(c.R_trip);
    CorrelationResult r;
    r.counts = c;
    r.value = rt * ri / (r1 * r2);
    const double scale = ri / (r1 * r2);
    r.sigma = std::sqrt(scale * scale * std::max(rt, 1.0) + r.value * r.value * (1.0 / r1 + 1.0 / r2 + 1.0 / ri));
    r.threshold = 1.0;
    r.nonclassical = r.value < r.threshold;
    return r;
}

std::vector<SlotCorrelation> readout_series(const EventStream& s, const GateSpec& g, const std::vector<std::int64_t>& slots) {
    std::vector<SlotCorrelation> out;
    for (const auto d : slots) {
        if (s.config == Configuration::SIG && d % kPulsePeriodPs != 0) continue;
        out.push_back({d, g11(gated_counts(s, g, d))});
    }
    return out;
}

}  // namespace orca::photonstats
