#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gen.hpp"
#include "orca/errors.hpp"
#include "orca/photonstats/budget.hpp"
#include "orca/photonstats/counting.hpp"
#include "orca/photonstats/events.hpp"
#include "orca/photonstats/generator.hpp"
#include "orca/photonstats/histogram.hpp"
#include "orca/photonstats/models.hpp"
#include "orca/photonstats/oracle.hpp"

using namespace orca;
using namespace orca::photonstats;

namespace {

// High-transmission chain so that three-fold coincidences accumulate in seconds.
PairSourceModel desk_source(double mu) {
    PairSourceModel s;
    s.mu = mu;
    s.eta_i = 0.9;
    s.eta_s = 0.9;
    s.eta_s_post = 0.9;
    return s;
}

MemoryChannelModel paper_memory() { return memory_from_lifetime(0.7, 0.1677, 5.4e-9, 3500); }

PairSourceModel silent() {
    PairSourceModel s;
    s.mu = 0;
    s.dark_rate_hz = {0, 0, 0};
    return s;
}

bool within(double est, double sigma, double truth, double k = 3.0) { return std::abs(est - truth) <= k * sigma; }

// Acceptance of a 2.5 ns gate for 350 ps Gaussian jitter.
const double kAcc = std::erf(2500.0 / (2.0 * std::sqrt(2.0) * 350.0));

}  // namespace

TEST_CASE("thermal law and truncation") {
    for (double mu : {0.0, 0.005, 0.05, 0.5}) {
        const auto p = thermal_distribution(mu, 10);
        double sum = 0, mean = 0;
        for (std::size_t n = 0; n < p.size(); ++n) {
            sum += p[n];
            mean += static_cast<double>(n) * p[n];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
        if (mu <= 0.05) {
            CHECK(thermal_truncation_error(mu, 10) < 1e-8);
            CHECK(mean == doctest::Approx(mu).epsilon(1e-8));
        }
    }
    CHECK(thermal_truncation_error(0.5, 10) > 1e-8);
    CHECK_THROWS_AS(thermal_distribution(-0.1, 10), DomainError);
}

TEST_CASE("model validation") {
    PairSourceModel s;
    CHECK_NOTHROW(validate(s));
    s.eta_i = 1.2;
    CHECK_THROWS_AS(validate(s), ConfigError);
    s = PairSourceModel{};
    s.mu = -1;
    CHECK_THROWS_AS(validate(s), ConfigError);
    s = PairSourceModel{};
    s.trigger_rate_hz = 3e6;
    CHECK_THROWS_AS(validate(s), ConfigError);

    GateSpec g;
    CHECK_NOTHROW(validate(g));
    g.read_out_offset_ps = 2000;
    CHECK_THROWS_AS(validate(g), ConfigError);
    g = GateSpec{};
    g.read_in_width_ps = 0;
    CHECK_THROWS_AS(validate(g), ConfigError);

    MemoryChannelModel m;
    m.eta_in = 0.5;
    m.slots = {{3500, 0.4}, {12500, 0.2}};
    CHECK_THROWS_AS(validate(m), ConfigError);
    m.slots = {{12500, 0.1}, {3500, 0.1}};
    CHECK_THROWS_AS(validate(m), ConfigError);
}

TEST_CASE("memory channel from a lifetime") {
    const auto m = paper_memory();
    CHECK(m.slots.front().delay_ps == 3500);
    CHECK(m.slots.front().efficiency == doctest::Approx(0.1677).epsilon(1e-12));
    CHECK(m.total_efficiency() <= m.eta_in);
    const std::vector<std::int64_t> want{3500, 12500, 16000, 25000, 28500};
    for (std::size_t k = 0; k < want.size(); ++k) CHECK(m.slots[k].delay_ps == want[k]);
    // r = eta_first / (eta_in e^{-3.5/5.4}); slot k carries e^{-t/5.4} r (1-r)^k
    const double r = 0.1677 / (0.7 * std::exp(-3.5 / 5.4));
    CHECK(m.slots[2].efficiency == doctest::Approx(0.7 * std::exp(-16.0 / 5.4) * r * (1 - r) * (1 - r)).epsilon(1e-12));
    for (std::size_t k = 1; k < m.slots.size(); ++k) CHECK(m.slots[k].efficiency < m.slots[k - 1].efficiency);
    CHECK_THROWS_AS(memory_from_lifetime(0.2, 0.19, 5.4e-9, 3500), ConfigError);
}

TEST_CASE("zero source and zero darks give empty streams") {
    const auto streams = simulate_event_streams(silent(), paper_memory(), GateSpec{}, 0.01, 1);
    CHECK(streams.size() == 4);
    for (const auto& [c, s] : streams) {
        CHECK(s.records.empty());
        CHECK(s.total_triggers == 10000);
        CHECK(s.config == c);
    }
    CHECK_THROWS_AS(simulate_event_streams(silent(), paper_memory(), GateSpec{}, 0.0, 1), ConfigError);
}

TEST_CASE("generated streams are well formed, seeded and identical serial vs parallel") {
    gen::for_cases(6, 21, [](gen::Rng& r, int) {
        auto s = desk_source(r.log_uniform(1e-3, 0.1));
        s.dark_rate_hz = {r.uniform(0, 1e5), r.uniform(0, 1e5), r.uniform(0, 1e5)};
        auto m = paper_memory();
        m.added_noise = r.uniform(0, 0.05);
        const auto cfg = static_cast<Configuration>(r.integer(0, 3));
        GeneratorOptions par, ser;
        par.block_triggers = r.integer(1, 50);
        ser.block_triggers = par.block_triggers;
        ser.execution = Execution::Serial;
        const auto a = simulate_event_stream(s, m, GateSpec{}, cfg, 2000, 99, par);
        const auto b = simulate_event_stream(s, m, GateSpec{}, cfg, 2000, 99, ser);
        CHECK_NOTHROW(validate(a));
        CHECK(a.records == b.records);
        const auto c = simulate_event_stream(s, m, GateSpec{}, cfg, 2000, 100, par);
        if (!a.records.empty()) CHECK_FALSE(a.records == c.records);
    });
}

TEST_CASE("event file round trip") {
    auto s = simulate_event_stream(desk_source(0.05), paper_memory(), GateSpec{}, Configuration::MEM, 200, 5);
    std::stringstream io;
    write_stream(io, s);
    const auto back = read_stream(io);
    CHECK(back.records == s.records);
    CHECK(back.total_triggers == s.total_triggers);
    CHECK(back.trigger_period_ps == s.trigger_period_ps);
    CHECK(back.config == Configuration::MEM);

    std::stringstream bad1("#trigger_period_ps 1000000\n#total_triggers 3\ns1 0 10\n");
    CHECK_THROWS_AS(read_stream(bad1), ConfigError);
    std::stringstream bad2("#trigger_period_ps 1000000\n#total_triggers 3\n#config MEM\nx 0 10\n");
    CHECK_THROWS_AS(read_stream(bad2), ConfigError);
    std::stringstream bad3("#trigger_period_ps 1000000\n#total_triggers 3\n#config MEM\ns1 1 10\ni 0 10\n");
    CHECK_THROWS_AS(read_stream(bad3), ConfigError);
    std::stringstream bad4("#trigger_period_ps 1000000\n#total_triggers 3\n#config MEM\ns1 0 1000000\n");
    CHECK_THROWS_AS(read_stream(bad4), ConfigError);
}

TEST_CASE("klyshko efficiency reproduces the configured chain") {
    // The paper's transmissions: waveguide 38%, filtering 12.8%, remaining signal path to the detectors
    // 3.7/12.8, detectors 50%.
    PairSourceModel s;
    CHECK(s.eta_s * s.eta_s_post * s.detector_efficiency[1] == doctest::Approx(0.007).epsilon(0.01));

    s.mu = 0.05;
    // idler singles at 30 kHz out of 80 MHz pulses
    const double p_i = 30e3 / 80e6;
    const double b = p_i / (s.mu * (1.0 - p_i));
    s.eta_i = b / (s.detector_efficiency[0] * kAcc);
    GeneratorOptions o;
    o.block_triggers = 2000;
    const auto c = simulate_gated_counts(s, MemoryChannelModel{}, GateSpec{}, Configuration::SIG, {0}, 10'000'000, 3, o)[0];
    const double rate_i = static_cast<double>(c.R_i) / (static_cast<double>(c.R_T) * 12.5e-9);
    CHECK(rate_i == doctest::Approx(30e3).epsilon(0.02));
    // Accidentals removed; the thermal pair law leaves a factor (1 + mu) on the true coincidences.
    const double acc = static_cast<double>(c.R_s()) * static_cast<double>(c.R_i) / static_cast<double>(c.R_T);
    const double eta_k = (static_cast<double>(c.R_si()) - acc) / (static_cast<double>(c.R_i) * (1.0 + s.mu));
    const double sigma = std::sqrt(static_cast<double>(c.R_si())) / static_cast<double>(c.R_i);
    const double chain = s.eta_s * s.eta_s_post * s.detector_efficiency[1] * kAcc;
    CHECK(within(eta_k, sigma, chain));
}

TEST_CASE("CTRL without added noise leaves only dark counts on the signal detectors") {
    PairSourceModel s;
    s.dark_rate_hz = {163, 2e4, 3e4};
    const auto st = simulate_event_stream(s, paper_memory(), GateSpec{}, Configuration::CTRL, 20000, 8);
    const double dur = st.duration_s();
    for (int d = 1; d < 3; ++d) {
        const double n = static_cast<double>(st.count(static_cast<Detector>(d)));
        const double expect = s.dark_rate_hz[d] * dur;
        CHECK(std::abs(n - expect) < 4.0 * std::sqrt(expect));
    }
    // Darks are flat over the frame: the signal gates hold their time share only.
    const auto c = gated_counts(st, GateSpec{}, 3500);
    const double expect_gate = 2e4 * 2500e-12 * static_cast<double>(c.R_T);
    CHECK(std::abs(static_cast<double>(c.R_s1) - expect_gate) < 4.0 * std::sqrt(expect_gate));
    CHECK(st.count(Detector::I) > 0);
}

TEST_CASE("arrival histogram") {
    EventStream one;
    one.total_triggers = 1;
    one.records = {{Detector::S1, 0, 4321}};
    auto h = arrival_histogram(one, 200);
    CHECK(h.counts.size() == 5000);
    CHECK(h.total() == 1.0);
    CHECK(h.counts[21] == 1.0);
    CHECK_THROWS_AS(arrival_histogram(one, 300), ConfigError);

    // uniform synthetic records: every bin within 5 sigma of the mean
    EventStream u;
    u.total_triggers = 2000;
    gen::Rng r(4);
    for (std::int64_t k = 0; k < u.total_triggers; ++k)
        for (int j = 0; j < 100; ++j) u.records.push_back({Detector::I, k, r.integer(0, 999999)});
    sort_records(u);
    h = arrival_histogram(u, 10000);
    const double mean = 2000.0;
    for (const double c : h.counts) CHECK(std::abs(c - mean) < 5.0 * std::sqrt(mean));
    CHECK(h.total() == static_cast<double>(u.records.size()));
    const auto hz = arrival_histogram(u, 10000, Detector::I, true);
    CHECK(hz.total() == doctest::Approx(static_cast<double>(u.records.size()) / u.duration_s()));

    // SIG: one peak per 12.5 ns at the signal time with the configured jitter
    auto s = desk_source(0.05);
    s.dark_rate_hz = {0, 0, 0};
    const auto st = simulate_event_stream(s, MemoryChannelModel{}, GateSpec{}, Configuration::SIG, 5000, 2);
    const auto hs = arrival_histogram(st, 200, Detector::S1);
    double m1 = 0, m2 = 0, n = 0;
    for (const auto& rec : st.records) {
        if (rec.detector != Detector::S1) continue;
        const double x = static_cast<double>(rec.time_ps % kPulsePeriodPs) - 4000.0;
        m1 += x;
        m2 += x * x;
        n += 1;
    }
    CHECK(n > 1000);
    CHECK(std::abs(m1 / n) < 5.0 * 350.0 / std::sqrt(n));
    CHECK(std::sqrt(m2 / n) == doctest::Approx(350.0).epsilon(0.05));
    for (int k = 0; k < 80; ++k) {
        const auto peak = static_cast<std::size_t>((k * kPulsePeriodPs + 4000) / 200);
        CHECK(hs.counts[peak] > 0);
        CHECK(hs.counts[peak + 30] == 0.0);  // 6 ns later: between peaks
    }
}

TEST_CASE("start-stop histograms") {
    auto s = desk_source(0.02);
    s.eta_i = s.eta_s = s.eta_s_post = 1.0;
    s.detector_efficiency = {1.0, 1.0, 1.0};
    s.dark_rate_hz = {0, 0, 0};
    s.jitter_ps = 0;
    const auto st = simulate_event_stream(s, MemoryChannelModel{}, GateSpec{}, Configuration::SIG, 300, 3);
    StartStopOptions o;
    o.range_lo_ps = -6000;
    o.range_hi_ps = 6000;
    const auto h = startstop_histogram(st, StopChannel::S1, o);
    const auto zero = static_cast<std::size_t>(6000 / 100);
    CHECK(h.counts[zero] > 100);
    CHECK(h.total() == h.counts[zero]);
    CHECK(h.bin_center(zero) == 50);

    // independent Poisson streams: flat floor N_start * r_stop * bin
    PairSourceModel dark = silent();
    dark.dark_rate_hz = {2e5, 3e5, 0};
    const auto d = simulate_event_stream(dark, MemoryChannelModel{}, GateSpec{}, Configuration::CTRL, 50000, 4);
    StartStopOptions w;
    w.bin_ps = 1000;
    const auto hd = startstop_histogram(d, StopChannel::S1, w);
    const double floor = static_cast<double>(d.count(Detector::I)) * 3e5 * 1e-9;
    double chi2 = 0;
    for (const double c : hd.counts) chi2 += (c - floor) * (c - floor) / floor;
    const double dof = static_cast<double>(hd.counts.size());
    CHECK(chi2 < dof + 5.0 * std::sqrt(2.0 * dof));
    CHECK(hd.total() / dof == doctest::Approx(floor).epsilon(5.0 / std::sqrt(floor * dof)));

    // MEM: peaks at 0, 3.5, 12.5 and 16 ns above an empty background
    auto sm = desk_source(0.05);
    sm.dark_rate_hz = {0, 0, 0};
    const auto mem = simulate_event_stream(sm, paper_memory(), GateSpec{}, Configuration::MEM, 2000, 5);
    const auto hm = startstop_histogram(mem, StopChannel::S1, {});
    const auto at = [&](std::int64_t t) {
        double c = 0;
        for (std::int64_t x = t - 1000; x < t + 1000; x += 100) c += hm.counts[static_cast<std::size_t>((x + 12500) / 100)];
        return c;
    };
    const double bg = at(-6250);
    CHECK(at(0) > 10 * (bg + 1));
    CHECK(at(3500) > 10 * (bg + 1));
    CHECK(at(12500) > at(25000));
    CHECK(at(16000) > at(28500));
    CHECK(at(3500) > at(16000));

    // three-fold: both signal detectors within the coincidence window
    const auto h3 = startstop_histogram(mem, StopChannel::S1S2, {});
    CHECK(h3.total() <= std::min(hm.total(), startstop_histogram(mem, StopChannel::S2, {}).total()));
    CHECK_THROWS_AS(startstop_histogram(mem, StopChannel::S1, {.bin_ps = 300}), ConfigError);
}

TEST_CASE("gated counts: totals, disjoint gates and order independence") {
    EventStream s;
    s.total_triggers = 2;
    s.config = Configuration::MEM;
    // pulse 0: idler, s1 and s2 in the read-in gate; pulse 3: idler and s1 at read-out
    s.records = {{Detector::I, 0, 4000},   {Detector::S1, 0, 4100},  {Detector::S2, 0, 3900},
                 {Detector::I, 0, 41500},  {Detector::S1, 0, 45000}, {Detector::S1, 1, 4200},
                 {Detector::S1, 1, 4300}};
    sort_records(s);
    const auto c0 = gated_counts(s, GateSpec{}, 0);
    CHECK(c0.R_T == 160);
    CHECK(c0.R_i == 2);
    CHECK(c0.R_s1 == 2);  // two records in one gate count once
    CHECK(c0.R_s2 == 1);
    CHECK(c0.R_s1i == 1);
    CHECK(c0.R_trip == 1);
    const auto c1 = gated_counts(s, GateSpec{}, 3500);
    CHECK(c1.R_s1 == 1);
    CHECK(c1.R_s1i == 1);
    CHECK(c1.R_s2 == 0);
    // a gate far from every record sees nothing
    GateSpec far;
    far.idler_center_ps = far.signal_center_ps = 9000;
    const auto cz = gated_counts(s, far, 0);
    CHECK(cz.R_i + cz.R_s1 + cz.R_s2 + cz.R_trip == 0);

    // permuting records within a trigger changes nothing
    const auto st = simulate_event_stream(desk_source(0.1), paper_memory(), GateSpec{}, Configuration::MEM, 300, 6);
    gen::for_cases(5, 7, [&](gen::Rng& r, int) {
        EventStream p = st;
        auto it = p.records.begin();
        while (it != p.records.end()) {
            auto end = std::find_if(it, p.records.end(), [&](const EventRecord& x) { return x.trigger != it->trigger; });
            std::shuffle(it, end, r.engine());
            it = end;
        }
        for (const std::int64_t d : readout_slots(GateSpec{})) CHECK(gated_counts(p, GateSpec{}, d) == gated_counts(st, GateSpec{}, d));
    });
}

TEST_CASE("read-out gate coincidences follow the memory efficiency") {
    auto s = desk_source(1e-4);
    const auto m = paper_memory();
    GeneratorOptions o;
    o.block_triggers = 2000;
    const auto c = simulate_gated_counts(s, m, GateSpec{}, Configuration::MEM, {3500}, 20'000'000, 9, o)[0];
    const double ratio = static_cast<double>(c.R_si()) / static_cast<double>(c.R_i);
    const double sigma = std::sqrt(static_cast<double>(c.R_si())) / static_cast<double>(c.R_i);
    const double expect = s.eta_s * m.slots[0].efficiency * s.eta_s_post * 0.5 * kAcc;
    CHECK(c.R_si() > 1000);
    CHECK(within(ratio, sigma, expect));
}

TEST_CASE("g11 and g2h estimators") {
    CountSummary c{1000, 10, 0, 0, 0, 0, 0};
    CHECK_THROWS_AS(g11(c), UndefinedResultError);
    CHECK_THROWS_AS(g2h(c), UndefinedResultError);
    c = {1000, 100, 30, 20, 9, 6, 1};
    const auto a = g11(c);
    CHECK(a.value == doctest::Approx(15.0 * 1000 / (50.0 * 100)));
    CHECK(a.sigma > 0);
    CHECK(a.nonclassical);
    const auto b = g2h(c);
    CHECK(b.value == doctest::Approx(1.0 * 100 / (9.0 * 6)));
    CHECK_FALSE(b.nonclassical);

    // independent Poisson streams -> 1
    PairSourceModel dark = silent();
    dark.dark_rate_hz = {2e6, 1e6, 1e6};
    const auto d = simulate_event_stream(dark, MemoryChannelModel{}, GateSpec{}, Configuration::CTRL, 20000, 10);
    const auto gd = g11(gated_counts(d, GateSpec{}, 0));
    CHECK(within(gd.value, gd.sigma, 1.0));

    // heralded coherent state: Poissonian read-out light independent of the herald -> g2h = 1
    PairSourceModel src = desk_source(0.2);
    src.dark_rate_hz = {0, 0, 0};
    MemoryChannelModel noisy;
    noisy.added_noise = 0.5;
    noisy.noise_kind = NoiseKind::Poisson;
    const auto cs = simulate_gated_counts(src, noisy, GateSpec{}, Configuration::CTRL, {3500}, 50000, 11)[0];
    const auto gc = g2h(cs);
    CHECK(within(gc.value, gc.sigma, 1.0));
    noisy.noise_kind = NoiseKind::Thermal;
    const auto ct = simulate_gated_counts(src, noisy, GateSpec{}, Configuration::CTRL, {3500}, 50000, 11)[0];
    CHECK(g2h(ct).value > gc.value);

    // ideal single photons: exactly one signal click per herald
    EventStream one;
    one.total_triggers = 100;
    gen::Rng r(12);
    for (std::int64_t k = 0; k < 100; ++k)
        for (int p = 0; p < 80; p += 2) {
            one.records.push_back({Detector::I, k, p * kPulsePeriodPs + 4000});
            one.records.push_back({r.integer(0, 1) ? Detector::S1 : Detector::S2, k, p * kPulsePeriodPs + 4050});
        }
    sort_records(one);
    CHECK(g2h(gated_counts(one, GateSpec{}, 0)).value == 0.0);
}

TEST_CASE("oracle closed forms and limits") {
    PairSourceModel s = silent();
    s.mu = 1e-12;
    const auto z = exact_click_probabilities(s, MemoryChannelModel{}, GateSpec{}, Configuration::SIG, 0);
    CHECK(z.p_i < 1e-11);
    CHECK(z.p_s1 < 1e-11);
    // a three-fold needs two pairs
    CHECK(z.p_trip > 0.0);
    CHECK(z.p_trip < s.mu * s.mu);

    s.mu = 0.01;
    s.eta_i = s.eta_s = s.eta_s_post = 1;
    s.detector_efficiency = {1, 1, 1};
    s.jitter_ps = 0;
    s.n_max = 20;
    const auto p = exact_click_probabilities(s, MemoryChannelModel{}, GateSpec{}, Configuration::SIG, 0);
    CHECK(p.p_i == doctest::Approx(1.0 - 1.0 / (1.0 + s.mu)).epsilon(1e-14));
    CHECK(p.p_i == doctest::Approx(s.mu).epsilon(0.011));
    // every pair is heralded and lands on s1 or s2
    CHECK(p.p_s1i + p.p_s2i - p.p_trip == doctest::Approx(p.p_i).epsilon(1e-12));

    s.mu = 0.5;
    s.n_max = 10;
    CHECK_THROWS_AS(exact_click_probabilities(s, MemoryChannelModel{}, GateSpec{}, Configuration::SIG, 0), NumericalError);
}

TEST_CASE("oracle matches paper-scale cross-correlation and the low-mu g2h limit") {
    PairSourceModel s;  // shipped A.3 chain and darks, mu = 0.0077
    const auto m = paper_memory();
    const double sig = exact_click_probabilities(s, m, GateSpec{}, Configuration::SIG, 0).g11();
    const double mem = exact_click_probabilities(s, m, GateSpec{}, Configuration::MEM, 3500).g11();
    CHECK(sig > 100);
    CHECK(sig < 160);
    CHECK(mem > 90);
    CHECK(mem < sig);
    s.mu = 0.01;
    const auto h = heralded_moments(s, m, GateSpec{}, Configuration::SIG, 0);
    // thermal heralded g2h = (6 mu^2 + 4 mu) / (2 mu + 1)^2 in the weak-herald limit
    CHECK(h.g2h == doctest::Approx(4 * s.mu).epsilon(0.06));
    const double g2 = exact_click_probabilities(s, m, GateSpec{}, Configuration::SIG, 0).g2h();
    CHECK(g2 == doctest::Approx(h.g2h).epsilon(0.05));
}

TEST_CASE("oracle loss invariance of heralded moments") {
    gen::for_cases(200, 13, [](gen::Rng& r, int) {
        PairSourceModel s;
        s.mu = r.log_uniform(1e-4, 0.1);
        s.eta_i = r.uniform(0.01, 1);
        s.eta_s = r.uniform(0.01, 1);
        s.eta_s_post = r.uniform(0.01, 1);
        s.dark_rate_hz = {0, 0, 0};
        s.n_max = 20;
        const auto m = paper_memory();
        const auto cfg = r.integer(0, 1) ? Configuration::SIG : Configuration::MEM;
        const std::int64_t d = cfg == Configuration::SIG ? 0 : 3500;
        const auto a = heralded_moments(s, m, GateSpec{}, cfg, d);
        PairSourceModel t = s;
        t.eta_s *= r.uniform(1e-3, 1.0);
        const auto b = heralded_moments(t, m, GateSpec{}, cfg, d);
        CHECK(b.g2h == doctest::Approx(a.g2h).epsilon(1e-12));
        CHECK(b.g11 == doctest::Approx(a.g11).epsilon(1e-12));
        CHECK(b.mean_signal < a.mean_signal * (1 + 1e-12));
    });
}

TEST_CASE("dark counts drive both oracle correlations to 1 monotonically") {
    gen::for_cases(20, 14, [](gen::Rng& r, int) {
        PairSourceModel s;
        s.mu = r.log_uniform(1e-3, 0.05);
        double last11 = 1e300, last2 = 1e300;
        for (double rate = 1.0; rate < 3e8; rate *= 3) {
            s.dark_rate_hz = {rate, rate, rate};
            const auto p = exact_click_probabilities(s, paper_memory(), GateSpec{}, Configuration::SIG, 0);
            // distance from 1 shrinks at every step
            CHECK(std::abs(p.g11() - 1) < last11);
            CHECK(std::abs(p.g2h() - 1) < last2);
            last11 = std::abs(p.g11() - 1);
            last2 = std::abs(p.g2h() - 1);
        }
        CHECK(last11 < 1e-3);
        CHECK(last2 < 1e-3);
    });
}

TEST_CASE("noiseless memory preserves heralded statistics, added noise raises g2h") {
    gen::for_cases(100, 15, [](gen::Rng& r, int) {
        PairSourceModel s;
        s.mu = r.log_uniform(1e-4, 0.1);
        s.eta_s = r.uniform(0.05, 1);
        const double eta_in = r.uniform(0.3, 1.0), life = r.uniform(2e-9, 20e-9);
        const double first = r.uniform(0.05, 0.95) * eta_in * std::exp(-3.5e-9 / life);
        const auto m = memory_from_lifetime(eta_in, first, life, 3500);
        const double in = heralded_moments(s, m, GateSpec{}, Configuration::SIG, 0).g2h;
        const double out = heralded_moments(s, m, GateSpec{}, Configuration::MEM, 3500).g2h;
        CHECK(out == doctest::Approx(in).epsilon(1e-12));
        auto noisy = m;
        noisy.noise_kind = r.integer(0, 1) ? NoiseKind::Thermal : NoiseKind::Poisson;
        noisy.added_noise = r.log_uniform(1e-6, 0.1);
        CHECK(heralded_moments(s, noisy, GateSpec{}, Configuration::MEM, 3500).g2h > out);
    });
}

TEST_CASE("estimators agree with the oracle on simulated pulses") {
    GeneratorOptions o;
    o.block_triggers = 5000;
    for (double mu : {0.01, 0.05}) {
        const auto s = desk_source(mu);
        const auto m = paper_memory();
        for (const auto& [cfg, d] : {std::pair{Configuration::SIG, std::int64_t{0}}, std::pair{Configuration::MEM, std::int64_t{3500}}}) {
            const auto c = simulate_gated_counts(s, m, GateSpec{}, cfg, {d}, 4'000'000, 17, o)[0];
            const auto p = exact_click_probabilities(s, m, GateSpec{}, cfg, d);
            const auto a = g11(c), b = g2h(c);
            CAPTURE(mu);
            CAPTURE(d);
            CHECK(within(a.value, a.sigma, p.g11()));
            CHECK(within(b.value, b.sigma, p.g2h()));
            CHECK(c.R_trip > 50);
            const double n = static_cast<double>(c.R_T);
            CHECK(within(static_cast<double>(c.R_i), std::sqrt(p.p_i * n), p.p_i * n));
            CHECK(within(static_cast<double>(c.R_s1i), std::sqrt(p.p_s1i * n), p.p_s1i * n));
        }
    }
}

TEST_CASE("oracle tracks later pulses that share a read-out gate") {
    // the 12.5 ns gate also holds the next pulse's prompt leakage, the 16 ns gate its first read-out
    const auto s = desk_source(0.005);
    const auto m = paper_memory();
    const auto slots = readout_slots(GateSpec{});
    GeneratorOptions o;
    o.block_triggers = 5000;
    const auto counts = simulate_gated_counts(s, m, GateSpec{}, Configuration::MEM, slots, 2'000'000, 23, o);
    for (std::size_t k = 0; k < slots.size(); ++k) {
        const auto a = g11(counts[k]);
        CAPTURE(slots[k]);
        CHECK(within(a.value, a.sigma, exact_click_probabilities(s, m, GateSpec{}, Configuration::MEM, slots[k]).g11()));
    }
}

TEST_CASE("successive read-out series") {
    const auto s = desk_source(0.005);
    auto m = paper_memory();
    const auto slots = readout_slots(GateSpec{});
    // oracle: decreasing with read-out order (slot 0 is the read-in gate)
    double last = 1e300;
    for (const auto d : std::vector<std::int64_t>(slots.begin() + 1, slots.end())) {
        const double g = exact_click_probabilities(s, m, GateSpec{}, Configuration::MEM, d).g11();
        CHECK(g < last);
        last = g;
    }
    const auto mem = simulate_event_stream(s, m, GateSpec{}, Configuration::MEM, 100000, 18);
    const auto series = readout_series(mem, GateSpec{}, slots);
    REQUIRE(series.size() == 6);
    CHECK(series[1].g11.nonclassical);
    CHECK(series[3].g11.value > 2);
    CHECK(series[1].g11.value > series[3].g11.value);

    const auto sig = simulate_event_stream(s, m, GateSpec{}, Configuration::SIG, 20000, 19);
    const auto ss = readout_series(sig, GateSpec{}, slots);
    REQUIRE(ss.size() == 3);
    CHECK(ss[0].delay_ps == 0);
    CHECK(ss[0].g11.value > 100);
    for (std::size_t k = 1; k < 3; ++k) CHECK(within(ss[k].g11.value, ss[k].g11.sigma, 1.0));

    // no residual efficiency beyond the first read-out: later slots sit at the accidental level
    m.slots.resize(1);
    const auto flat = simulate_event_stream(s, m, GateSpec{}, Configuration::MEM, 20000, 20);
    const auto fs = readout_series(flat, GateSpec{}, slots);
    for (std::size_t k = 2; k < fs.size(); ++k) CHECK(within(fs[k].g11.value, fs[k].g11.sigma, 1.0));
}

TEST_CASE("heralding budget") {
    auto b = heralding_budget({{"eta_k", 0.007}, {"eta_det", 0.5}, {"eta_s_add", 0.30}, {"eta_s_total", 0.037}});
    REQUIRE(b.herald);
    REQUIRE(b.waveguide);
    CHECK(*b.herald == doctest::Approx(0.007 / 0.5 / 0.3).epsilon(1e-15));
    CHECK(std::round(*b.herald * 1000) / 10 == 4.7);
    CHECK(std::round(*b.waveguide * 100) == 38);
    CHECK(b.stages.size() == 4);
    b = heralding_budget({{"eta_k", 1}, {"eta_det", 1}, {"eta_s_add", 1}, {"eta_s_total", 1}});
    CHECK(*b.herald == 1.0);
    CHECK(*b.waveguide == 1.0);
    CHECK_FALSE(heralding_budget({{"eta_k", 0.5}, {"eta_det", 1}}).herald);
    CHECK_THROWS_AS(heralding_budget({{"eta_k", 0.0}, {"eta_det", 0.5}}), ConfigError);
    CHECK_THROWS_AS(heralding_budget({{"eta_k", 0.1}, {"eta_det", 1.5}}), ConfigError);
    CHECK_THROWS_AS(heralding_budget({{"eta_det", 0.5}}), ConfigError);
}
