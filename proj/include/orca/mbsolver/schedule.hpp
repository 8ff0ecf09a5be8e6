#pragma once

#include <vector>

#include "orca/atomphys/species.hpp"

namespace orca::mbsolver {

enum class Geometry { CounterPropagating, CoPropagating };

struct SignalPulse {
    double center = 0.0;      // s, local (co-moving) time at the cell entrance
    double fwhm = 540e-12;    // s, intensity FWHM
    double wavelength = 0.0;  // m
    double mean_photons = 1.0;
};

struct ControlPulse {
    double center = 0.0;    // s, local time of the pulse centre at mid-cell
    double fwhm = 500e-12;  // s, intensity FWHM
    double energy = 0.0;    // J
    double wavelength = 0.0;
    double waist = 300e-6;  // m, 1/e^2 intensity radius
};

// Detuning convention: Delta = omega_(F -> F'max) - omega_signal, positive when the signal sits red of the
// cycling line (towards the ground state). delta2 is the two-photon detuning from the F -> F''max resonance,
// same sign convention.
struct ProtocolSchedule {
    SignalPulse signal;
    std::vector<ControlPulse> controls;  // [0] read-in, [1] read-out (centre = read-in centre + storage_time)
    double detuning = 0.0;               // rad/s
    double two_photon_detuning = 0.0;    // rad/s
    double storage_time = 0.0;           // s, read-in to read-out centre separation
    Geometry geometry = Geometry::CounterPropagating;

    const ControlPulse& read_in() const { return controls.at(0); }
    const ControlPulse& read_out() const { return controls.at(1); }
    bool has_read_out() const { return controls.size() > 1; }
    ProtocolSchedule with_storage_time(double tau) const;
    ProtocolSchedule with_energies(double read_in, double read_out) const;
};

void validate(const ProtocolSchedule& s);

// Default single-photon-experiment schedule for a species: 540 ps signal, 500 ps controls,
// 300 um waist, 6 GHz detuning, read-in 0.21 nJ / read-out 0.97 nJ, 3.5 ns storage.
ProtocolSchedule default_schedule(const atomphys::SpeciesRecord& s);

// Gaussian Rabi-frequency envelope Omega(t) = peak * exp(-2 ln2 (t - center)^2 / fwhm^2).
struct ControlEnvelope {
    double center = 0.0;
    double fwhm = 1.0;
    double peak_rabi = 0.0;  // rad/s

    double operator()(double t) const;
};

// Isotropically averaged dipole for the intermediate -> storage transition, C m.
double effective_control_dipole(const atomphys::SpeciesRecord& s);

ControlEnvelope build_control_envelope(const ControlPulse& p, const atomphys::SpeciesRecord& s, double dipole_scale = 1.0);

// On-axis peak intensity of a Gaussian pulse/beam, W/m^2.
double peak_intensity(const ControlPulse& p);

// Energy carried by an envelope (inverse of build_control_envelope), J.
double envelope_energy(const ControlEnvelope& env, const ControlPulse& beam, const atomphys::SpeciesRecord& s,
                       double dipole_scale = 1.0);

// Unit-energy signal amplitude, |A|^2 integrates to one over t.
double signal_amplitude(const SignalPulse& p, double t);

}  // namespace orca::mbsolver
