#include <cmath>

#include "orca/constants.hpp"
#include "orca/errors.hpp"
#include "orca/mbsolver/schedule.hpp"

namespace orca::mbsolver {

using atomphys::Manifold;

ProtocolSchedule ProtocolSchedule::with_storage_time(double tau) const {
    ProtocolSchedule out = *this;
    out.storage_time = tau;
    if (out.controls.size() > 1) out.controls[1].center = out.controls[0].center + tau;
    return out;
}

ProtocolSchedule ProtocolSchedule::with_energies(double e_in, double e_out) const {
    ProtocolSchedule out = *this;
    out.controls.at(0).energy = e_in;
    if (out.controls.size() > 1) out.controls[1].energy = e_out;
    return out;
}

void validate(const ProtocolSchedule& s) {
    if (!(s.signal.fwhm > 0)) throw ConfigError("signal duration must be positive");
    if (!(s.signal.wavelength > 0)) throw ConfigError("signal wavelength must be positive");
    if (s.signal.mean_photons < 0) throw ConfigError("mean photon number must be non-negative");
    if (s.controls.empty()) throw ConfigError("memory schedule needs at least a read-in control pulse");
    for (const auto& c : s.controls) {
        if (!(c.fwhm > 0)) throw ConfigError("control duration must be positive");
        if (c.energy < 0) throw ConfigError("control energy must be non-negative");
        if (!(c.waist > 0)) throw ConfigError("control waist must be positive");
        if (!(c.wavelength > 0)) throw ConfigError("control wavelength must be positive");
    }
    if (s.storage_time < 0) throw ConfigError("storage time must be non-negative");
    if (s.controls.size() > 1 &&
        std::abs(s.controls[1].center - s.controls[0].center - s.storage_time) > 1e-15 + 1e-9 * s.storage_time)
        throw ConfigError("read-out centre must equal read-in centre + storage time");
}

ProtocolSchedule default_schedule(const atomphys::SpeciesRecord& sp) {
    ProtocolSchedule s;
    s.signal.wavelength = sp.signal.wavelength;
    ControlPulse c;
    c.wavelength = sp.control.wavelength;
    c.energy = 0.21e-9;
    s.controls.push_back(c);
    c.energy = 0.97e-9;
    s.controls.push_back(c);
    s.detuning = phys::two_pi * 6e9;
    return s.with_storage_time(3.5e-9);
}

double ControlEnvelope::operator()(double t) const {
    const double x = (t - center) / fwhm;
    return peak_rabi * std::exp(-2.0 * std::numbers::ln2 * x * x);
}

double effective_control_dipole(const atomphys::SpeciesRecord& s) {
    const double Je = s.manifold(Manifold::Intermediate).J;
    return s.control.reduced_dipole / std::sqrt(3.0 * (2 * Je + 1));
}

static double pulse_area_time(double fwhm) { return fwhm * std::sqrt(phys::pi / (4.0 * std::numbers::ln2)); }

double peak_intensity(const ControlPulse& p) {
    return p.energy / (0.5 * phys::pi * p.waist * p.waist * pulse_area_time(p.fwhm));
}

ControlEnvelope build_control_envelope(const ControlPulse& p, const atomphys::SpeciesRecord& s, double dipole_scale) {
    if (p.energy < 0) throw DomainError("control energy must be non-negative");
    if (!(p.waist > 0)) throw DomainError("control waist must be positive");
    if (!(p.fwhm > 0)) throw DomainError("control duration must be positive");
    const double field = std::sqrt(2.0 * peak_intensity(p) / (phys::c * phys::eps0));
    return {p.center, p.fwhm, dipole_scale * effective_control_dipole(s) * field / phys::hbar};
}

double envelope_energy(const ControlEnvelope& env, const ControlPulse& beam, const atomphys::SpeciesRecord& s,
                       double dipole_scale) {
    // I(t) = (c eps0 / 2) (hbar Omega / d)^2 ; trapezoid over +-8 FWHM
    const double d = dipole_scale * effective_control_dipole(s);
    const int n = 20000;
    const double a = env.center - 8 * env.fwhm, b = env.center + 8 * env.fwhm, h = (b - a) / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double field = phys::hbar * env(a + i * h) / d;
        acc += (i == 0 || i == n ? 0.5 : 1.0) * 0.5 * phys::c * phys::eps0 * field * field;
    }
    return acc * h * 0.5 * phys::pi * beam.waist * beam.waist;
}

double signal_amplitude(const SignalPulse& p, double t) {
    const double x = (t - p.center) / p.fwhm;
    const double norm = std::sqrt(4.0 * std::numbers::ln2 / phys::pi) / p.fwhm;
    return std::sqrt(norm) * std::exp(-2.0 * std::numbers::ln2 * x * x);
}

}  // namespace orca::mbsolver
