#include <algorithm>
#include <cmath>

#include "orca/constants.hpp"
#include "orca/errors.hpp"
#include "orca/mbsolver/memory.hpp"

namespace orca::mbsolver {

MemoryModel build_model(const MemorySetup& setup, const ProtocolSchedule& schedule) {
    return build_model(setup.species, setup.ensemble, schedule, setup.grid, setup.calibration, setup.options);
}

static double pulse_reach(const MemoryModel& m, double fwhm) { return 3.0 * fwhm + m.length / phys::c; }

Window read_in_window(const MemoryModel& m, const ProtocolSchedule& s) {
    const auto& sig = s.signal;
    const auto& ri = s.read_in();
    const double start = std::min(sig.center - 3.0 * sig.fwhm, ri.center - pulse_reach(m, ri.fwhm));
    const double end = std::max(sig.center + 3.0 * sig.fwhm, ri.center + pulse_reach(m, ri.fwhm)) + m.window_margin;
    return {start, end};
}

Window read_out_window(const MemoryModel& m, const ProtocolSchedule& s) {
    const auto& ro = s.read_out();
    return {ro.center - pulse_reach(m, ro.fwhm), ro.center + pulse_reach(m, ro.fwhm) + m.window_margin};
}

namespace {

// Exact free propagator; negative durations run the dark evolution backwards, which lets the
// read-out window overlap the read-in window for very short storage times.
void free_propagate(EnsembleState& st, const MemoryModel& m, double d) {
    for (int j = 0; j < m.nz; ++j)
        for (int v = 0; v < m.nv; ++v) {
            cplx* a = st.amplitudes.data() + m.p_index(j, v, 0);
            for (int e = 0; e < m.ne; ++e) a[e] *= std::exp(-m.rate_p[static_cast<std::size_t>(v) * m.ne + e] * d);
            for (int s = 0; s < m.ns; ++s) a[m.ne + s] *= std::exp(-m.rate_s[static_cast<std::size_t>(v) * m.ns + s] * d);
        }
    st.time += d;
}

ControlEnvelope envelope_for(const MemorySetup& setup, const ControlPulse& p) {
    return build_control_envelope(p, setup.species, setup.calibration.control_dipole_scale);
}

}  // namespace

StorageRun propagate_storage(const MemorySetup& setup, const MemoryModel& m, const ProtocolSchedule& s) {
    validate(s);
    const Window w = read_in_window(m, s);
    const auto env = envelope_for(setup, s.read_in());
    const auto sig = s.signal;
    const Drive drive = make_drive(m, {env}, [sig](double t) { return cplx(signal_amplitude(sig, t), 0.0); });
    StorageRun run{EnsembleState::zeros(m, w.start), {}};
    const auto wr = integrate_window(m, run.state, w.end, drive, env.peak_rabi, setup.execution);
    auto& r = run.result;
    r.input_energy = wr.input_energy;
    r.transmitted_time = wr.time;
    r.transmitted = wr.output;
    for (std::size_t i = 0; i < wr.time.size(); ++i)
        r.spin_wave_norm.emplace_back(wr.time[i], wr.spin_norm[i] / wr.input_energy);
    r.transmitted_fraction = wr.output_energy / wr.input_energy;
    r.stored_fraction = wr.excitation.back() / wr.input_energy;
    r.decayed_fraction = wr.decayed / wr.input_energy;
    r.bookkeeping_residual = std::abs(1.0 - r.transmitted_fraction - r.stored_fraction - r.decayed_fraction);
    r.eta_in = std::clamp(1.0 - r.transmitted_fraction, 0.0, 1.0);
    r.steps = wr.steps;
    r.stability_number = wr.stability_number;
    return run;
}

EnsembleState evolve_dark(const EnsembleState& state, const MemoryModel& m, double duration) {
    if (duration < 0) throw DomainError("evolve_dark: duration must be non-negative");
    EnsembleState out = state;
    free_propagate(out, m, duration);
    return out;
}

MemoryResult propagate_retrieval(const MemorySetup& setup, const MemoryModel& m, const StorageRun& stored,
                                 const ProtocolSchedule& s) {
    validate(s);
    if (!s.has_read_out()) throw ConfigError("retrieval needs a read-out control pulse");
    const Window w = read_out_window(m, s);
    EnsembleState st = stored.state;
    free_propagate(st, m, w.start - st.time);
    const auto env = envelope_for(setup, s.read_out());
    const Drive drive = make_drive(m, {env}, [](double) { return cplx(0.0); });
    const auto wr = integrate_window(m, st, w.end, drive, env.peak_rabi, setup.execution);
    MemoryResult r = stored.result;
    r.recalled_time = wr.time;
    r.recalled = wr.output;
    for (std::size_t i = 0; i < wr.time.size(); ++i)
        r.spin_wave_norm.emplace_back(wr.time[i], wr.spin_norm[i] / r.input_energy);
    r.eta_total = std::clamp(wr.output_energy / r.input_energy, 0.0, r.eta_in);
    r.eta_out = r.eta_in > 0 ? r.eta_total / r.eta_in : 0.0;
    r.steps += wr.steps;
    r.stability_number = std::max(r.stability_number, wr.stability_number);
    return r;
}

MemoryResult run_memory(const MemorySetup& setup, const ProtocolSchedule& s) {
    const auto m = build_model(setup, s);
    const auto stored = propagate_storage(setup, m, s);
    return propagate_retrieval(setup, m, stored, s);
}

}  // namespace orca::mbsolver
