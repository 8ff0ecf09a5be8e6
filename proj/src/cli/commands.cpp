#include "orca/cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "orca/analytic/dephasing.hpp"
#include "orca/atomphys/species.hpp"
#include "orca/atomphys/thermal.hpp"
#include "orca/atomphys/voigt.hpp"
#include "orca/constants.hpp"
#include "orca/errors.hpp"
#include "orca/photonstats/budget.hpp"
#include "orca/photonstats/counting.hpp"
#include "orca/photonstats/events.hpp"
#include "orca/photonstats/generator.hpp"
#include "orca/photonstats/histogram.hpp"
#include "orca/photonstats/oracle.hpp"

namespace orca::cli {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json correlation_json(const photonstats::CorrelationResult& r) {
    const auto& c = r.counts;
    return {{"value", r.value},
            {"sigma", r.sigma},
            {"threshold", r.threshold},
            {"nonclassical", r.nonclassical},
            {"counts",
             {{"R_T", c.R_T},
              {"R_i", c.R_i},
              {"R_s", c.R_s()},
              {"R_si", c.R_si()},
              {"R_s1i", c.R_s1i},
              {"R_s2i", c.R_s2i},
              {"R_trip", c.R_trip}}}};
}

template <class F>
json guarded(F&& f) {
    try {
        return f();
    } catch (const UndefinedResultError& e) {
        return {{"error", e.what()}};
    }
}

analytic::Geometry analytic_geometry(mbsolver::Geometry g) {
    return g == mbsolver::Geometry::CoPropagating ? analytic::Geometry::CoPropagating : analytic::Geometry::CounterPropagating;
}

}  // namespace

json cmd_lifetime(const json& config, const OutputSink& sink) {
    const auto setup = memory_setup(config);
    const auto schedule = memory_schedule(config, setup.species);
    std::vector<double> taus;
    for (double t : axis(config.at("taus_ns"), "taus_ns")) taus.push_back(t * 1e-9);
    std::sort(taus.begin(), taus.end());

    const auto curve = mbsolver::lifetime_curve(setup, schedule, taus);

    const auto deph = analytic::dephasing_model(schedule.signal.wavelength, schedule.controls[0].wavelength,
                                                setup.ensemble.temperature, setup.species, analytic_geometry(schedule.geometry));
    analytic::BeatModel beat;
    if (setup.grid.paths.empty()) {
        beat = analytic::storage_beat_model(setup.species, schedule.detuning, deph.tau_D, setup.options.splitting_scale);
    } else {
        beat.components = {{1.0, 0.0}};
        beat.tau_D = deph.tau_D;
    }
    const auto doppler = [&](double t) { return std::isinf(deph.tau_D) ? 1.0 : std::exp(-std::pow(t / deph.tau_D, 2)); };

    Table t{{"tau_ns", "eta_N", "eta_total", "eta_in", "doppler_overlay", "beat_overlay"}, {}};
    for (const auto& p : curve)
        t.rows.push_back({p.tau * 1e9, p.eta_N, p.eta_total, p.eta_in, doppler(p.tau), analytic::beat_envelope(beat, p.tau)});

    json rep;
    try {
        const auto fit = mbsolver::fit_lifetime(curve);
        rep["fitted_lifetime_s"] = fit.lifetime;
        rep["recrossings_s"] = fit.recrossings;
        rep["oscillatory"] = fit.oscillatory;
    } catch (const OutOfRangeError& e) {
        rep["fitted_lifetime_s"] = nullptr;
        rep["fit_error"] = e.what();
    }
    rep["doppler_lifetime_s"] = finite_or_null(deph.tau_D);
    try {
        rep["beat_lifetime_s"] = analytic::beat_lifetime(beat, taus.back(), config.at("overlay_dt_ps").get<double>() * 1e-12);
    } catch (const OutOfRangeError&) {
        rep["beat_lifetime_s"] = nullptr;
    }
    rep["eta_total_0"] = curve.front().tau == 0.0 ? json(curve.front().eta_total) : json(nullptr);
    rep["eta_in"] = curve.front().eta_in;
    rep["species"] = setup.species.name;
    rep["paths"] = config.at("paths");
    rep["files"] = {write_table(sink, "lifetime_curve", t)};
    write_report(sink, "report", rep);
    return rep;
}

json cmd_efficiency_sweep(const json& config, const OutputSink& sink) {
    const auto setup = memory_setup(config);
    const auto schedule = memory_schedule(config, setup.species);
    std::vector<double> energies;
    for (double e : axis(config.at("energies_nJ"), "energies_nJ")) energies.push_back(e * 1e-9);
    std::sort(energies.begin(), energies.end());
    const auto pts = mbsolver::efficiency_vs_energy(setup, schedule, energies);

    Table t{{"energy_nJ", "eta_total", "eta_in"}, {}};
    std::size_t best = 0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        t.rows.push_back({pts[k].energy * 1e9, pts[k].eta_total, pts[k].eta_in});
        if (pts[k].eta_total > pts[best].eta_total) best = k;
    }

    // Least-squares slope of log(eta_total) against log(energy) over the low-energy points.
    const double limit = config.at("low_energy_limit_nJ").get<double>() * 1e-9;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& p : pts) {
        if (p.energy <= 0 || p.energy > limit || p.eta_total <= 0) continue;
        const double x = std::log(p.energy), y = std::log(p.eta_total);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    json rep;
    rep["low_energy_exponent"] = n >= 2 ? json((n * sxy - sx * sy) / (n * sxx - sx * sx)) : json(nullptr);
    rep["low_energy_points"] = n;
    rep["max_eta_total"] = pts[best].eta_total;
    rep["max_energy_J"] = pts[best].energy;
    rep["max_eta_in"] = pts[best].eta_in;
    // Local log-log slope over the two highest energies; below one means the curve has turned over.
    if (pts.size() >= 2 && pts[pts.size() - 2].energy > 0 && pts[pts.size() - 2].eta_total > 0 && pts.back().eta_total > 0) {
        const auto& a = pts[pts.size() - 2];
        const auto& b = pts.back();
        const double slope = std::log(b.eta_total / a.eta_total) / std::log(b.energy / a.energy);
        rep["high_energy_slope"] = slope;
        rep["saturating"] = slope < 1.0;
    }
    const double e_in = schedule.read_in().energy;
    const auto at = std::find_if(pts.begin(), pts.end(), [&](const auto& p) { return std::abs(p.energy - e_in) < 1e-15; });
    rep["eta_in_at_read_in_energy"] = at != pts.end() ? json(at->eta_in) : json(nullptr);
    rep["zero_energy_eta_total"] = pts.front().energy == 0.0 ? json(pts.front().eta_total) : json(nullptr);
    rep["files"] = {write_table(sink, "efficiency_sweep", t)};
    write_report(sink, "report", rep);
    return rep;
}

json cmd_counts(const json& config, const OutputSink& sink) {
    using namespace photonstats;
    const auto src = source_model(config);
    const auto mem = memory_channel(config);
    const auto gates = gate_spec(config);
    const auto seed = config.at("seed").get<std::uint64_t>();
    GeneratorOptions opts;
    opts.block_triggers = config.at("block_triggers").get<std::int64_t>();
    opts.execution = config.at("execution").get<std::string>() == "serial" ? Execution::Serial : Execution::Parallel;
    const auto n_stream = config.at("stream_triggers").get<std::int64_t>();
    const auto n_total = config.at("triggers").get<std::int64_t>();
    const auto slots = readout_slots(gates, config.at("readout_periods").get<int>());
    const auto readout = gates.read_out_offset_ps;

    json rep;
    json files = json::array();
    const std::vector<Configuration> configs{Configuration::SIG, Configuration::MEM, Configuration::CTRL, Configuration::RI};

    // Recorded streams and their histograms (short acquisition).
    std::filesystem::create_directories(sink.dir / "streams");
    for (const auto c : configs) {
        const auto st = simulate_event_stream(src, mem, gates, c, n_stream, seed, opts);
        const std::string name = "streams/" + to_string(c) + ".txt";
        std::ofstream os(sink.dir / name, std::ios::binary);
        if (!os) throw ConfigError("cannot write " + (sink.dir / name).string());
        os << "# orca " << tool_version() << ' ' << sink.command << " config_sha256=" << sink.config_hash << '\n';
        write_stream(os, st);
        files.push_back(name);
        Table arr{{"t_ps", "i_hz", "s1_hz", "s2_hz"}, {}};
        const auto hi = arrival_histogram(st, gates.arrival_bin_ps, Detector::I, true);
        const auto h1 = arrival_histogram(st, gates.arrival_bin_ps, Detector::S1, true);
        const auto h2 = arrival_histogram(st, gates.arrival_bin_ps, Detector::S2, true);
        for (std::size_t k = 0; k < hi.counts.size(); ++k)
            arr.rows.push_back({static_cast<double>(hi.bin_center(k)), hi.counts[k], h1.counts[k], h2.counts[k]});
        files.push_back(write_table(sink, "arrival_" + to_string(c), arr));
        StartStopOptions so;
        so.bin_ps = gates.coincidence_bin_ps;
        so.coincidence_window_ps = gates.coincidence_window_ps;
        const auto c1 = startstop_histogram(st, StopChannel::S1, so);
        const auto c2 = startstop_histogram(st, StopChannel::S2, so);
        const auto c3 = startstop_histogram(st, StopChannel::S1S2, so);
        Table ss{{"dt_ps", "s1", "s2", "s1s2"}, {}};
        for (std::size_t k = 0; k < c1.counts.size(); ++k)
            ss.rows.push_back({static_cast<double>(c1.bin_center(k)), c1.counts[k], c2.counts[k], c3.counts[k]});
        files.push_back(write_table(sink, "startstop_" + to_string(c), ss));
    }

    // Gated analysis over the long acquisition, streamed block by block.
    std::map<Configuration, std::vector<CountSummary>> counts;
    for (const auto c : configs) counts[c] = simulate_gated_counts(src, mem, gates, c, slots, n_total, seed + 1, opts);
    const auto slot_index = [&](std::int64_t d) {
        return static_cast<std::size_t>(std::find(slots.begin(), slots.end(), d) - slots.begin());
    };

    Table tab{{"delay_ns", "g11_SIG", "sigma_SIG", "g11_MEM", "sigma_MEM", "oracle_SIG", "oracle_MEM"}, {}};
    json series = json::array();
    for (std::size_t k = 0; k < slots.size(); ++k) {
        const std::int64_t d = slots[k];
        const bool sig_defined = d % kPulsePeriodPs == 0;
        double gs = kNaN, ss = kNaN, gm = kNaN, sm = kNaN, os = kNaN, om = kNaN;
        json entry = {{"delay_ps", d}};
        if (sig_defined) {
            entry["SIG"] = guarded([&] {
                const auto r = g11(counts[Configuration::SIG][k]);
                gs = r.value;
                ss = r.sigma;
                return correlation_json(r);
            });
            try {
                os = exact_click_probabilities(src, mem, gates, Configuration::SIG, d).g11();
            } catch (const UndefinedResultError&) {
            }
        }
        entry["MEM"] = guarded([&] {
            const auto r = g11(counts[Configuration::MEM][k]);
            gm = r.value;
            sm = r.sigma;
            return correlation_json(r);
        });
        try {
            om = exact_click_probabilities(src, mem, gates, Configuration::MEM, d).g11();
        } catch (const UndefinedResultError&) {
        }
        entry["oracle_SIG"] = finite_or_null(os);
        entry["oracle_MEM"] = finite_or_null(om);
        series.push_back(entry);
        tab.rows.push_back({static_cast<double>(d) * 1e-3, gs, ss, gm, sm, os, om});
    }
    files.push_back(write_table(sink, "table_A1", tab));
    rep["g11"] = series;

    // Heralded autocorrelation in the read-in gate (SIG, MEM) and the first read-out gate (MEM).
    struct GateCase {
        const char* name;
        Configuration c;
        std::int64_t d;
    };
    const std::vector<GateCase> cases{{"SIG_read_in", Configuration::SIG, 0},
                                      {"MEM_read_in", Configuration::MEM, 0},
                                      {"MEM_read_out", Configuration::MEM, readout}};
    Table g2t{{"gate", "delay_ns", "g2h", "sigma", "R_trip", "oracle_click", "oracle_moment"}, {}};
    json g2 = json::object();
    double v_sig = kNaN, s_sig = kNaN, v_mem = kNaN, s_mem = kNaN;
    for (std::size_t k = 0; k < cases.size(); ++k) {
        const auto& gc = cases[k];
        const auto& cnt = counts[gc.c][slot_index(gc.d)];
        double v = kNaN, s = kNaN, oc = kNaN, om = kNaN;
        json e = guarded([&] {
            const auto r = g2h(cnt);
            v = r.value;
            s = r.sigma;
            return correlation_json(r);
        });
        try {
            oc = exact_click_probabilities(src, mem, gates, gc.c, gc.d).g2h();
        } catch (const UndefinedResultError&) {
        }
        try {
            om = heralded_moments(src, mem, gates, gc.c, gc.d).g2h;
        } catch (const UndefinedResultError&) {
        }
        e["oracle_click"] = finite_or_null(oc);
        e["oracle_moment"] = finite_or_null(om);
        g2[gc.name] = e;
        if (k == 0) v_sig = v, s_sig = s;
        if (k == 2) v_mem = v, s_mem = s;
        g2t.rows.push_back({static_cast<double>(k), static_cast<double>(gc.d) * 1e-3, v, s, static_cast<double>(cnt.R_trip), oc, om});
    }
    const double z = (v_mem - v_sig) / std::sqrt(s_mem * s_mem + s_sig * s_sig);
    g2["MEM_minus_SIG_sigmas"] = finite_or_null(z);
    rep["g2h"] = g2;
    files.push_back(write_table(sink, "g2h", g2t));

    // Noise benchmark from the CTRL read-out gate, without dark-count subtraction.
    const auto& ctrl = counts[Configuration::CTRL][slot_index(readout)];
    const double det = 0.5 * (src.detector_efficiency[1] + src.detector_efficiency[2]);
    const double per_pulse = ctrl.R_T > 0 ? static_cast<double>(ctrl.R_s()) / static_cast<double>(ctrl.R_T) : 0.0;
    const double at_memory = src.eta_s_post * det > 0 ? per_pulse / (src.eta_s_post * det) : kNaN;
    const double eta_mem = mem.slots.empty() ? 0.0 : mem.slots.front().efficiency;
    json noise = {{"detected_per_pulse", per_pulse}, {"photons_at_memory_output", finite_or_null(at_memory)}, {"eta", eta_mem}};
    try {
        noise["mu1"] = analytic::mu1(at_memory, eta_mem);
    } catch (const DomainError& e) {
        noise["mu1"] = nullptr;
        noise["error"] = e.what();
    }
    rep["noise"] = noise;

    // Read-in efficiency from the drop of read-in gate singles between SIG and RI.
    const auto& sig0 = counts[Configuration::SIG][slot_index(0)];
    const auto& ri0 = counts[Configuration::RI][slot_index(0)];
    rep["eta_in_estimate"] = sig0.R_s() > 0 ? json(1.0 - static_cast<double>(ri0.R_s()) / static_cast<double>(sig0.R_s())) : json(nullptr);

    json budget;
    if (sig0.R_i > 0 && sig0.R_si() > 0) {
        const double eta_k = static_cast<double>(sig0.R_si()) / static_cast<double>(sig0.R_i);
        try {
            const auto b = heralding_budget({{"eta_k", eta_k},
                                             {"eta_det", src.detector_efficiency[1]},
                                             {"eta_s_add", src.eta_s_post},
                                             {"eta_s_total", config.at("budget").at("eta_s_total").get<double>()}});
            budget = {{"eta_k", b.klyshko}, {"eta_herald", finite_or_null(b.herald.value_or(kNaN))},
                      {"eta_s_waveguide", finite_or_null(b.waveguide.value_or(kNaN))}};
        } catch (const ConfigError& e) {
            budget = {{"error", e.what()}};
        }
    } else {
        budget = {{"error", "no signal-idler coincidences in the read-in gate"}};
    }
    rep["budget"] = budget;
    rep["pulses_analysed"] = counts[Configuration::SIG][0].R_T;
    rep["files"] = files;
    write_report(sink, "report", rep);
    return rep;
}

json cmd_absorption(const json& config, const OutputSink& sink) {
    const auto sp = atomphys::builtin_species(config.at("species").get<std::string>());
    const double T = config.at("temperature_K").get<double>();
    const double L = config.at("cell_length_m").get<double>();
    const auto ens = atomphys::make_ensemble(sp, T, L);
    std::vector<double> det;
    for (double g : axis(config.at("detuning_GHz"), "detuning_GHz")) det.push_back(phys::two_pi * 1e9 * g);
    auto spectrum = atomphys::transmission_spectrum(det, ens, sp);

    const double noise = config.at("noise_rms").get<double>();
    if (noise > 0) {
        std::mt19937_64 eng(config.at("seed").get<std::uint64_t>());
        const auto uniform = [&] { return (static_cast<double>(eng() >> 11) + 1.0) * 0x1.0p-53; };
        for (auto& p : spectrum) {
            const double u = uniform(), v = uniform();
            p.transmission += noise * std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
        }
    }
    const auto& f = config.at("fit");
    const auto fit = atomphys::fit_temperature(spectrum, sp, L, f.at("T_min").get<double>(), f.at("T_max").get<double>());
    const auto fitted = atomphys::make_ensemble(sp, fit.temperature, L);
    Table t{{"detuning_GHz", "transmission", "model"}, {}};
    for (const auto& p : spectrum)
        t.rows.push_back({p.detuning / (phys::two_pi * 1e9), p.transmission,
                          std::exp(-atomphys::voigt_absorption(p.detuning, fitted, sp) * L)});

    const double F = sp.memory_ground_F();
    const double line = atomphys::component_detuning(sp, atomphys::TransitionPair::Signal, F, F + 1);
    const double probe = line + phys::two_pi * 1e9 * config.at("probe_offset_GHz").get<double>();
    json rep = {{"temperature_K", T},
                {"number_density_m3", ens.number_density},
                {"fitted_temperature_K", fit.temperature},
                {"fitted_number_density_m3", fit.number_density},
                {"rms_residual", fit.rms_residual},
                {"evaluations", fit.evaluations},
                {"probe_detuning_GHz", probe / (phys::two_pi * 1e9)},
                {"probe_transmission", std::exp(-atomphys::voigt_absorption(probe, ens, sp) * L)}};
    rep["files"] = {write_table(sink, "absorption_spectrum", t)};
    write_report(sink, "report", rep);
    return rep;
}

json run_command(Command c, const json& config, const OutputSink& sink) {
    switch (c) {
        case Command::Lifetime: return cmd_lifetime(config, sink);
        case Command::Efficiency: return cmd_efficiency_sweep(config, sink);
        case Command::Counts: return cmd_counts(config, sink);
        case Command::Absorption: return cmd_absorption(config, sink);
    }
    throw ConfigError("unknown command");
}

}  // namespace orca::cli
