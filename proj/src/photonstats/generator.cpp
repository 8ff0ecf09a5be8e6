#include "orca/photonstats/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "orca/errors.hpp"

namespace orca::photonstats {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    // (0, 1]
    double uniform() { return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53; }
    // failures before the first success
    std::int64_t geometric(double p) {
        if (p >= 1.0) return 0;
        return static_cast<std::int64_t>(std::floor(std::log(uniform()) / std::log1p(-p)));
    }
    double normal() {
        const double u = uniform(), v = uniform();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
    }
    double exponential(double rate) { return -std::log(uniform()) / rate; }
    // Poisson conditioned on >= 1, by inversion; fine for the small means used here.
    std::int64_t poisson_positive(double lambda) {
        const double target = uniform() * -std::expm1(-lambda);
        double p = lambda * std::exp(-lambda), cdf = p;
        std::int64_t k = 1;
        while (cdf < target && k < 1000) {
            ++k;
            p *= lambda / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }

private:
    std::mt19937_64 eng_;
};

struct Plan {
    std::int64_t pulses_per_trigger;
    std::int64_t idler_center, signal_center, readout_offset;
    double jitter;
    // visible pairs
    double pair_start;  // P(a pulse holds >= 1 visible pair)
    double p_both, p_idler_only;  // given visible
    std::vector<SignalRoute> routes;  // cumulative probability in `probability`
    double p_s1;  // given a detected signal photon
    // noise photons detected at the read-out gate
    bool noise = false;
    NoiseKind noise_kind = NoiseKind::Poisson;
    double noise_mean = 0.0, noise_start = 0.0;
    std::array<double, 3> dark_rate_per_ps{};
};

Plan make_plan(const PairSourceModel& s, const MemoryChannelModel& m, const GateSpec& g, Configuration c) {
    validate(s);
    validate(m);
    validate(g);
    Plan p;
    p.pulses_per_trigger = s.pulses_per_trigger();
    p.idler_center = g.idler_center_ps;
    p.signal_center = g.signal_center_ps;
    p.readout_offset = g.read_out_offset_ps;
    p.jitter = s.jitter_ps;
    const double h1 = 0.5 * s.detector_efficiency[1], h2 = 0.5 * s.detector_efficiency[2];
    const double eta_i = s.eta_i * s.detector_efficiency[0];
    double acc = 0.0;
    for (const auto& r : signal_routes(s, m, c)) {
        acc += r.probability * (h1 + h2);
        p.routes.push_back({r.delay_ps, acc});
    }
    const double eta_sig = acc;
    p.p_s1 = (h1 + h2) > 0 ? h1 / (h1 + h2) : 0.5;
    const double vis = 1.0 - (1.0 - eta_i) * (1.0 - eta_sig);
    const double lam = s.mu * vis;
    p.pair_start = lam / (1.0 + lam);
    p.p_both = vis > 0 ? eta_i * eta_sig / vis : 0.0;
    p.p_idler_only = vis > 0 ? eta_i * (1.0 - eta_sig) / vis : 0.0;
    if (readout_on(c) && m.added_noise > 0) {
        p.noise = true;
        p.noise_kind = m.noise_kind;
        p.noise_mean = m.added_noise * s.eta_s_post * (h1 + h2);
        p.noise_start = m.noise_kind == NoiseKind::Poisson ? -std::expm1(-p.noise_mean) : p.noise_mean / (1.0 + p.noise_mean);
    }
    for (int d = 0; d < 3; ++d) p.dark_rate_per_ps[d] = s.dark_rate_hz[d] * 1e-12;
    return p;
}

struct Click {
    Detector d;
    std::int64_t t;  // absolute, ps
};

// Clicks originating in pulses [first_pulse, first_pulse + n_pulses) plus darks over the same time span.
std::vector<Click> generate_block(const Plan& p, std::int64_t first_pulse, std::int64_t n_pulses, std::uint64_t block_seed) {
    Rng rng(block_seed);
    std::vector<Click> out;
    const auto emit = [&](Detector d, std::int64_t pulse, std::int64_t offset) {
        const double jit = p.jitter > 0 ? p.jitter * rng.normal() : 0.0;
        const auto t = pulse * kPulsePeriodPs + offset + static_cast<std::int64_t>(std::llround(jit));
        out.push_back({d, std::max<std::int64_t>(t, 0)});
    };
    const auto signal_detector = [&]() { return rng.uniform() <= p.p_s1 ? Detector::S1 : Detector::S2; };
    const auto signal_click = [&](std::int64_t pulse) {
        const double u = rng.uniform() * p.routes.back().probability;
        auto it = std::lower_bound(p.routes.begin(), p.routes.end(), u,
                                   [](const SignalRoute& r, double x) { return r.probability < x; });
        if (it == p.routes.end()) --it;
        emit(signal_detector(), pulse, p.signal_center + it->delay_ps);
    };

    if (p.pair_start > 0) {
        for (std::int64_t k = rng.geometric(p.pair_start); k < n_pulses; k += 1 + rng.geometric(p.pair_start)) {
            const std::int64_t pulse = first_pulse + k;
            const std::int64_t pairs = 1 + rng.geometric(1.0 - p.pair_start);
            for (std::int64_t q = 0; q < pairs; ++q) {
                const double u = rng.uniform();
                if (u <= p.p_both) {
                    emit(Detector::I, pulse, p.idler_center);
                    signal_click(pulse);
                } else if (u <= p.p_both + p.p_idler_only) {
                    emit(Detector::I, pulse, p.idler_center);
                } else {
                    signal_click(pulse);
                }
            }
        }
    }
    if (p.noise && p.noise_start > 0) {
        for (std::int64_t k = rng.geometric(p.noise_start); k < n_pulses; k += 1 + rng.geometric(p.noise_start)) {
            const std::int64_t pulse = first_pulse + k;
            const std::int64_t n = p.noise_kind == NoiseKind::Poisson ? rng.poisson_positive(p.noise_mean)
                                                                       : 1 + rng.geometric(1.0 - p.noise_start);
            for (std::int64_t q = 0; q < n; ++q) emit(signal_detector(), pulse, p.signal_center + p.readout_offset);
        }
    }
    const double t0 = static_cast<double>(first_pulse * kPulsePeriodPs);
    const double t1 = static_cast<double>((first_pulse + n_pulses) * kPulsePeriodPs);
    for (int d = 0; d < 3; ++d) {
        const double rate = p.dark_rate_per_ps[d];
        if (rate <= 0) continue;
        for (double t = t0 + rng.exponential(rate); t < t1; t += rng.exponential(rate))
            out.push_back({static_cast<Detector>(d), static_cast<std::int64_t>(std::floor(t))});
    }
    return out;
}

std::uint64_t block_seed(std::uint64_t seed, Configuration c, std::int64_t block) {
    return splitmix64(splitmix64(seed ^ (0x51ed2701ULL * (static_cast<std::uint64_t>(c) + 1))) + static_cast<std::uint64_t>(block));
}

void to_records(const std::vector<Click>& clicks, std::int64_t period, std::int64_t origin, std::int64_t end,
                std::vector<EventRecord>& out) {
    for (const auto& c : clicks) {
        const std::int64_t t = c.t - origin;
        if (t < 0 || t >= end) continue;
        out.push_back({c.d, t / period, t % period});
    }
}

void check_common(std::int64_t n_triggers, const GeneratorOptions& opts) {
    if (n_triggers <= 0) throw ConfigError("simulation needs a positive number of triggers");
    if (opts.block_triggers <= 0) throw ConfigError("block size must be positive");
}

}  // namespace

EventStream simulate_event_stream(const PairSourceModel& source, const MemoryChannelModel& memory, const GateSpec& gates,
                                  Configuration config, std::int64_t n_triggers, std::uint64_t seed,
                                  const GeneratorOptions& opts) {
    check_common(n_triggers, opts);
    const Plan plan = make_plan(source, memory, gates, config);
    EventStream s;
    s.trigger_period_ps = plan.pulses_per_trigger * kPulsePeriodPs;
    s.total_triggers = n_triggers;
    s.config = config;
    const std::int64_t n_blocks = (n_triggers + opts.block_triggers - 1) / opts.block_triggers;
    const std::int64_t span = s.trigger_period_ps * n_triggers;
    std::vector<std::vector<EventRecord>> parts(static_cast<std::size_t>(n_blocks));
    const auto run = [&](std::int64_t b) {
        const std::int64_t first = b * opts.block_triggers;
        const std::int64_t count = std::min(opts.block_triggers, n_triggers - first);
        const auto clicks = generate_block(plan, first * plan.pulses_per_trigger, count * plan.pulses_per_trigger,
                                           block_seed(seed, config, b));
        to_records(clicks, s.trigger_period_ps, 0, span, parts[static_cast<std::size_t>(b)]);
    };
    if (opts.execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t b = 0; b < n_blocks; ++b) run(b);
    } else {
        for (std::int64_t b = 0; b < n_blocks; ++b) run(b);
    }
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    s.records.reserve(total);
    for (const auto& p : parts) s.records.insert(s.records.end(), p.begin(), p.end());
    sort_records(s);
    return s;
}

std::map<Configuration, EventStream> simulate_event_streams(const PairSourceModel& source, const MemoryChannelModel& memory,
                                                            const GateSpec& gates, double duration_s, std::uint64_t seed,
                                                            const GeneratorOptions& opts) {
    if (!(duration_s > 0) || !std::isfinite(duration_s)) throw ConfigError("simulation duration must be > 0");
    validate(source);
    const auto n = static_cast<std::int64_t>(std::llround(duration_s * source.trigger_rate_hz));
    std::map<Configuration, EventStream> out;
    for (auto c : {Configuration::SIG, Configuration::MEM, Configuration::CTRL, Configuration::RI})
        out.emplace(c, simulate_event_stream(source, memory, gates, c, std::max<std::int64_t>(n, 1), seed, opts));
    return out;
}

std::vector<CountSummary> simulate_gated_counts(const PairSourceModel& source, const MemoryChannelModel& memory,
                                                const GateSpec& gates, Configuration config,
                                                const std::vector<std::int64_t>& slots, std::int64_t n_triggers,
                                                std::uint64_t seed, const GeneratorOptions& opts) {
    check_common(n_triggers, opts);
    const Plan plan = make_plan(source, memory, gates, config);
    const std::int64_t period = plan.pulses_per_trigger * kPulsePeriodPs;
    const std::int64_t n_blocks = (n_triggers + opts.block_triggers - 1) / opts.block_triggers;
    std::vector<std::vector<CountSummary>> parts(static_cast<std::size_t>(n_blocks));
    const auto run = [&](std::int64_t b) {
        const std::int64_t first = b * opts.block_triggers;
        const std::int64_t count = std::min(opts.block_triggers, n_triggers - first);
        const auto clicks = generate_block(plan, first * plan.pulses_per_trigger, count * plan.pulses_per_trigger,
                                           block_seed(seed, config, b));
        EventStream local;
        local.trigger_period_ps = period;
        local.total_triggers = count;
        local.config = config;
        to_records(clicks, period, first * period, count * period, local.records);
        sort_records(local);
        auto& out = parts[static_cast<std::size_t>(b)];
        for (const auto d : slots) out.push_back(gated_counts(local, gates, d));
    };
    if (opts.execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t b = 0; b < n_blocks; ++b) run(b);
    } else {
        for (std::int64_t b = 0; b < n_blocks; ++b) run(b);
    }
    std::vector<CountSummary> total(slots.size());
    for (const auto& p : parts)
        for (std::size_t k = 0; k < slots.size(); ++k) total[k] += p[k];
    return total;
}

}  // namespace orca::photonstats
