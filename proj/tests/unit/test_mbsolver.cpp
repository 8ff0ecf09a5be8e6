#include <doctest.h>

#include <cmath>
#include <complex>

#include "gen.hpp"
#include "orca/atomphys/species.hpp"
#include "orca/atomphys/thermal.hpp"
#include "orca/constants.hpp"
#include "orca/errors.hpp"
#include "orca/mbsolver/memory.hpp"

using namespace orca;
using namespace orca::mbsolver;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;
const double kCellT = 364.15, kCellL = 0.072;
const double kSignalScale = 0.557;  // shipped Cs calibration

MemorySetup cs_setup(int nz, int nv, Execution ex = Execution::Serial) {
    const auto cs = atomphys::builtin_species("cs");
    MemorySetup s{cs, atomphys::make_ensemble(cs, kCellT, kCellL), {}, {}, {}, ex};
    s.grid.nz = nz;
    s.grid.nv = nv;
    return s;
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return acc * h / 3.0;
}

double retrievable(const MemoryModel& m, const EnsembleState& st, int j) {
    cplx acc = 0.0;
    for (int v = 0; v < m.nv; ++v)
        for (int s = 0; s < m.ns; ++s) acc += m.weight[v] * st.amplitudes[m.s_index(j, v, s)];
    return std::norm(acc);
}

}  // namespace

TEST_CASE("control envelope from pulse energy") {
    const auto cs = atomphys::builtin_species("cs");
    ControlPulse p;
    p.wavelength = cs.control.wavelength;
    p.energy = 0.97e-9;

    // hand chain: peak intensity -> field -> Rabi frequency
    const double tau_eff = 500e-12 * std::sqrt(std::numbers::pi / (4 * std::log(2.0)));
    const double I = 0.97e-9 / (0.5 * std::numbers::pi * 300e-6 * 300e-6 * tau_eff);
    const double E = std::sqrt(2 * I / (299792458.0 * 8.8541878128e-12));
    const double d = 5.149e-29 / std::sqrt(12.0);
    const double hand = d * E / (6.62607015e-34 / kTwoPi);
    const auto env = build_control_envelope(p, cs);
    CHECK(env.peak_rabi == doctest::Approx(hand).epsilon(1e-12));
    CHECK(env.peak_rabi == doctest::Approx(1.389e10).epsilon(1e-3));

    // time-integrated intensity returns the pulse energy
    const auto intensity = [&](double t) {
        const double field = (6.62607015e-34 / kTwoPi) * env(t) / d;
        return 0.5 * 299792458.0 * 8.8541878128e-12 * field * field;
    };
    const double energy = simpson(intensity, -10e-9, 10e-9, 40000) * 0.5 * std::numbers::pi * 300e-6 * 300e-6;
    CHECK(energy == doctest::Approx(0.97e-9).epsilon(1e-6));
    CHECK(envelope_energy(env, p, cs) == doctest::Approx(0.97e-9).epsilon(1e-6));

    ControlPulse twice = p;
    twice.energy *= 2;
    CHECK(build_control_envelope(twice, cs).peak_rabi == doctest::Approx(std::sqrt(2.0) * env.peak_rabi).epsilon(1e-14));
    p.energy = 0;
    CHECK(build_control_envelope(p, cs).peak_rabi == 0.0);
    p.energy = -1;
    CHECK_THROWS_AS(build_control_envelope(p, cs), DomainError);

    SignalPulse sig;
    CHECK(simpson([&](double t) { return std::pow(signal_amplitude(sig, t), 2); }, -5e-9, 5e-9, 20000) ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("schedule validation") {
    const auto cs = atomphys::builtin_species("cs");
    auto s = default_schedule(cs);
    CHECK(s.read_out().center - s.read_in().center == doctest::Approx(3.5e-9));
    CHECK_NOTHROW(validate(s));
    auto bad = s;
    bad.controls[1].center += 1e-9;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = s;
    bad.signal.fwhm = 0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = s;
    bad.controls.clear();
    CHECK_THROWS_AS(validate(bad), ConfigError);
    CHECK_THROWS_AS(validate(s.with_storage_time(-1e-9)), ConfigError);
}

TEST_CASE("hyperfine path set") {
    const auto cs = atomphys::builtin_species("cs");
    const auto paths = all_paths(cs);
    // F = 4 -> F' = 3,4,5 -> F'' = F' - 1 .. F' + 1
    CHECK(paths.size() == 9);
    for (const auto& p : paths) {
        CHECK(p.F_g == 4);
        CHECK(std::abs(p.F_e - p.F_g) <= 1);
        CHECK(std::abs(p.F_s - p.F_e) <= 1);
    }
    auto s = cs_setup(11, 4);
    s.grid.paths = {{4, 5, 3}};
    CHECK_THROWS_AS(build_model(s, default_schedule(cs)), ConfigError);
    s.grid.paths = {{3, 4, 5}};
    CHECK_THROWS_AS(build_model(s, default_schedule(cs)), ConfigError);
    s.grid.paths = {};
    s.grid.nz = 3;
    CHECK_THROWS_AS(build_model(s, default_schedule(cs)), ConfigError);
}

TEST_CASE("no control field leaves only the far-detuned linear absorption") {
    auto s = cs_setup(41, 64);
    const auto sch = default_schedule(s.species).with_energies(0.0, 0.0);
    const auto m = build_model(s, sch);
    const auto r = propagate_storage(s, m, sch).result;
    CHECK(r.eta_in < 0.05);
    CHECK(r.eta_in >= 0.0);
}

TEST_CASE("adiabatic two-photon absorption with constant control") {
    auto s = cs_setup(4, 1);
    s.grid.paths = pumped_path(s.species);
    s.options.storage_linewidth_scale = 0.0;
    auto sch = default_schedule(s.species);
    sch.detuning = kTwoPi * 50e9;
    sch.signal.fwhm = 3e-9;
    const double Omega = 2e10;

    auto m0 = build_model_single_class(s.species, s.ensemble, sch, s.grid, s.calibration, s.options);
    const double X = 0.5 * Omega * m0.c[0];
    const cplx kappa(0.5 * m0.gamma_e, sch.detuning);
    sch.two_photon_detuning = X * X * sch.detuning / std::norm(kappa);  // cancels the light shift
    const auto m = build_model_single_class(s.species, s.ensemble, sch, s.grid, s.calibration, s.options);
    REQUIRE(m.ne == 1);
    REQUIRE(m.ns == 1);

    const double t1 = 6 * sch.signal.fwhm;
    Drive d{[&](double t) { return cplx(signal_amplitude(sch.signal, t)); }, [&](double, double) { return Omega; }};
    auto st = EnsembleState::zeros(m, -t1);
    integrate_window(m, st, t1, d, Omega, Execution::Serial);

    // S(t) = -(X g / kappa) int exp(-gamma (t - t')) A(t') dt' with A Gaussian of rms width sigma
    const double sigma = sch.signal.fwhm / (2 * std::sqrt(std::log(2.0)));
    const double a = signal_amplitude(sch.signal, 0.0);
    const double gamma = X * X * m.gamma_e / (2 * std::norm(kappa));
    const double integral = a * sigma * std::sqrt(std::numbers::pi / 2) *
                            std::exp(gamma * gamma * sigma * sigma / 2 - gamma * t1) *
                            std::erfc((gamma * sigma * sigma - t1) / (sigma * std::sqrt(2.0)));
    const cplx expected = -(X * m.g[0] / kappa) * integral;
    const cplx got = st.amplitudes[m.s_index(0, 0, 0)];
    CHECK(std::abs(got - expected) / std::abs(expected) < 1e-3);
}

TEST_CASE("linearity in the signal amplitude") {
    auto s = cs_setup(11, 8);
    const auto sch = default_schedule(s.species);
    const auto m = build_model(s, sch);
    const auto env = build_control_envelope(sch.read_in(), s.species);
    const auto w = read_in_window(m, sch);
    gen::for_cases(3, 5, [&](gen::Rng& r, int) {
        const double scale = r.log_uniform(1e-3, 1e3);
        auto run = [&](double k) {
            auto st = EnsembleState::zeros(m, w.start);
            const auto d = make_drive(m, {env}, [&](double t) { return cplx(k * signal_amplitude(sch.signal, t)); });
            auto wr = integrate_window(m, st, w.end, d, env.peak_rabi, Execution::Serial);
            return std::make_pair(wr, st);
        };
        const auto [w1, s1] = run(1.0);
        const auto [wk, sk] = run(scale);
        double worst = 0.0, ref = 0.0;
        for (std::size_t i = 0; i < w1.output.size(); ++i) {
            worst = std::max(worst, std::abs(wk.output[i] - scale * w1.output[i]));
            ref = std::max(ref, std::abs(scale * w1.output[i]));
        }
        for (std::size_t i = 0; i < s1.amplitudes.size(); ++i) {
            worst = std::max(worst, std::abs(sk.amplitudes[i] - scale * s1.amplitudes[i]));
            ref = std::max(ref, std::abs(scale * s1.amplitudes[i]));
        }
        CHECK(worst / ref < 1e-10);
    });
}

TEST_CASE("read-in bookkeeping with the shipped calibration") {
    auto s = cs_setup(41, 64);
    s.calibration.signal_dipole_scale = kSignalScale;
    const auto sch = default_schedule(s.species);
    const auto r = run_memory(s, sch);
    CHECK(r.bookkeeping_residual < 1e-3);
    CHECK(r.transmitted_fraction + r.stored_fraction + r.decayed_fraction == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(r.eta_total >= 0.0);
    CHECK(r.eta_total <= r.eta_in);
    CHECK(r.eta_in <= 1.0);
    CHECK(r.eta_out == doctest::Approx(r.eta_total / r.eta_in));
    CHECK(r.stability_number <= kStabilityBound);
}

TEST_CASE("lossless single class conserves the photon number") {
    auto s = cs_setup(41, 1);
    s.options.storage_linewidth_scale = 0.0;
    s.options.intermediate_linewidth_scale = 0.0;
    s.calibration.signal_dipole_scale = 0.3;
    const auto sch = default_schedule(s.species).with_storage_time(0.0);
    const auto m = build_model_single_class(s.species, s.ensemble, sch, s.grid, s.calibration, s.options);
    const auto stored = propagate_storage(s, m, sch);
    const auto& r = stored.result;
    CHECK(r.decayed_fraction == 0.0);
    CHECK(std::abs(r.transmitted_fraction + r.stored_fraction - 1.0) < 1e-3);

    // retrieval: the excitation leaving the atoms re-appears in the recalled field
    const double before = excitation_norm(m, stored.state);
    auto sch_out = default_schedule(s.species).with_storage_time(6e-9);
    const auto w = read_out_window(m, sch_out);
    auto st = evolve_dark(stored.state, m, w.start - stored.state.time);
    const auto env = build_control_envelope(sch_out.read_out(), s.species);
    const auto wr = integrate_window(m, st, w.end, make_drive(m, {env}, [](double) { return cplx(0.0); }),
                                     env.peak_rabi, Execution::Serial);
    const double after = excitation_norm(m, st);
    REQUIRE(before - after > 1e-3);
    CHECK(wr.output_energy / (before - after) >= 0.99);
    CHECK(wr.output_energy / (before - after) <= 1.01);
}

TEST_CASE("zero spin wave retrieves nothing") {
    auto s = cs_setup(11, 8);
    const auto sch = default_schedule(s.species);
    const auto m = build_model(s, sch);
    auto stored = propagate_storage(s, m, sch);
    for (auto& a : stored.state.amplitudes) a = 0.0;
    const auto r = propagate_retrieval(s, m, stored, sch);
    CHECK(r.eta_total == 0.0);
    for (const auto& a : r.recalled) CHECK(a == cplx(0.0));
}

TEST_CASE("dark evolution") {
    auto s = cs_setup(4, 1);
    s.options.storage_linewidth_scale = 0.0;
    s.grid.paths = {{4, 5, 5}, {4, 5, 6}};
    const auto sch = default_schedule(s.species);
    const auto m = build_model_single_class(s.species, s.ensemble, sch, s.grid, s.calibration, s.options);
    REQUIRE(m.ns == 2);
    auto st = EnsembleState::zeros(m, 0.0);
    for (int j = 0; j < m.nz; ++j) st.amplitudes[m.s_index(j, 0, 0)] = st.amplitudes[m.s_index(j, 0, 1)] = 0.5;
    st.amplitudes[m.p_index(0, 0, 0)] = 0.3;

    const auto same = evolve_dark(st, m, 0.0);
    CHECK(same.amplitudes == st.amplitudes);
    CHECK_THROWS_AS(evolve_dark(st, m, -1e-9), DomainError);

    const double w = m.detuning_s[1] - m.detuning_s[0];
    gen::for_cases(40, 8, [&](gen::Rng& r, int) {
        const double d = r.uniform(0, 30e-9);
        const auto out = evolve_dark(st, m, d);
        CHECK(retrievable(m, out, 1) == doctest::Approx(std::pow(std::cos(0.5 * w * d), 2)).epsilon(1e-9));
        // phase follows the equations of motion: S -> S exp(-i d_s t)
        const cplx s0 = out.amplitudes[m.s_index(0, 0, 0)];
        CHECK(std::abs(s0 - 0.5 * std::exp(cplx(0.0, -m.detuning_s[0] * d))) < 1e-12);
        CHECK(std::abs(out.amplitudes[m.p_index(0, 0, 0)]) ==
              doctest::Approx(0.3 * std::exp(-0.5 * m.gamma_e * d)).epsilon(1e-12));
    });

    // thermal ensemble, single path: Gaussian characteristic function of the velocity distribution
    auto t = cs_setup(4, 64);
    t.options.storage_linewidth_scale = 0.0;
    t.grid.paths = pumped_path(t.species);
    const auto mt = build_model(t, sch);
    auto sv = EnsembleState::zeros(mt, 0.0);
    for (int v = 0; v < mt.nv; ++v) sv.amplitudes[mt.s_index(2, v, 0)] = 1.0;
    const double tauD = 1.0 / (std::abs(mt.k_r) * t.ensemble.thermal_speed);
    for (double d : {0.0, 0.3 * tauD, tauD, 1.7 * tauD, 2.0 * tauD}) {
        const auto out = evolve_dark(sv, mt, d);
        CHECK(retrievable(mt, out, 2) == doctest::Approx(std::exp(-(d / tauD) * (d / tauD))).epsilon(1e-8));
    }
}

TEST_CASE("fit_lifetime") {
    std::vector<std::pair<double, double>> c;
    for (double t = 0; t <= 20e-9; t += 0.5e-9) c.emplace_back(t, std::exp(-t / 5e-9));
    auto f = fit_lifetime(c);
    CHECK(f.lifetime == doctest::Approx(5e-9).epsilon(0.01));
    CHECK_FALSE(f.oscillatory);

    const double tauD = 12.7e-9;
    c.clear();
    for (double t = 0; t <= 30e-9; t += 0.5e-9) c.emplace_back(t, std::exp(-(t / tauD) * (t / tauD)));
    CHECK(fit_lifetime(c).lifetime == doctest::Approx(tauD).epsilon(0.01));

    // beats: period 2.5 ns inside a 12.7 ns Doppler envelope
    const double w = kTwoPi / 2.5e-9;
    auto beat = [&](double t) { return std::pow(std::cos(0.5 * w * t), 2) * std::exp(-(t / tauD) * (t / tauD)); };
    c.clear();
    for (double t = 0; t <= 30e-9; t += 0.05e-9) c.emplace_back(t, beat(t));
    f = fit_lifetime(c);
    double lo = 0, hi = 1.25e-9;  // dense root find on the closed form
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (beat(mid) > std::exp(-1.0) ? lo : hi) = mid;
    }
    CHECK(f.lifetime == doctest::Approx(lo).epsilon(0.01));
    CHECK(f.lifetime < tauD);
    CHECK(f.oscillatory);
    CHECK(f.recrossings.size() >= 3);

    c = {{0, 1.0}, {1e-9, 0.9}, {2e-9, 0.8}};
    CHECK_THROWS_AS(fit_lifetime(c), OutOfRangeError);
    c = {{0, 1.0}, {0, 0.2}};
    CHECK_THROWS_AS(fit_lifetime(c), DomainError);
}

TEST_CASE("serial and parallel kernels agree bitwise") {
    auto a = cs_setup(13, 8, Execution::Serial);
    auto b = cs_setup(13, 8, Execution::Parallel);
    const auto sch = default_schedule(a.species);
    const auto m = build_model(a, sch);
    const auto ra = propagate_storage(a, m, sch);
    const auto rb = propagate_storage(b, m, sch);
    CHECK(ra.state.amplitudes == rb.state.amplitudes);
    CHECK(ra.result.transmitted == rb.result.transmitted);
}

TEST_CASE("stability bound is enforced") {
    auto s = cs_setup(11, 8);
    s.grid.dt = 200e-12;
    const auto sch = default_schedule(s.species);
    const auto m = build_model(s, sch);
    CHECK_THROWS_AS(propagate_storage(s, m, sch), InstabilityError);
}

TEST_CASE("co-propagating geometry dephases faster") {
    auto s = cs_setup(21, 32);
    s.grid.paths = pumped_path(s.species);
    s.calibration.signal_dipole_scale = kSignalScale;
    auto counter = default_schedule(s.species);
    auto co = counter;
    co.geometry = Geometry::CoPropagating;
    const std::vector<double> taus{0.0, 0.25e-9, 0.5e-9, 1e-9, 2e-9};
    const auto a = lifetime_curve(s, counter, taus);
    const auto b = lifetime_curve(s, co, taus);
    CHECK(b[3].eta_N < a[3].eta_N);
    CHECK(fit_lifetime(b).lifetime < 1e-9);
    CHECK(a[0].eta_N == 1.0);
    CHECK(b[0].eta_N == 1.0);
}

TEST_CASE("efficiency is quadratic in the control energy at small energy") {
    auto s = cs_setup(21, 32);
    s.calibration.signal_dipole_scale = kSignalScale;
    const auto sch = default_schedule(s.species);
    const auto pts = efficiency_vs_energy(s, sch, {0.005e-9, 0.01e-9});
    const double slope = std::log(pts[1].eta_total / pts[0].eta_total) / std::log(2.0);
    CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
    CHECK_THROWS_AS(efficiency_vs_energy(s, sch, {-1.0}), DomainError);
}

TEST_CASE("lifetime curve input checks") {
    auto s = cs_setup(11, 8);
    const auto sch = default_schedule(s.species);
    CHECK_THROWS_AS(lifetime_curve(s, sch, {}), DomainError);
    CHECK_THROWS_AS(lifetime_curve(s, sch, {0.0, -1e-9}), DomainError);
}

TEST_CASE("grid convergence at the default resolution") {
    auto s = cs_setup(41, 64);
    s.calibration.signal_dipole_scale = kSignalScale;
    const auto sch = default_schedule(s.species);
    const auto coarse = run_memory(s, sch);
    s.grid.nz = 81;
    s.grid.dt *= 0.5;
    const auto fine = run_memory(s, sch);
    CHECK(std::abs(fine.eta_total - coarse.eta_total) / fine.eta_total < 0.005);
    CHECK(std::abs(fine.eta_in - coarse.eta_in) / fine.eta_in < 0.005);
}
