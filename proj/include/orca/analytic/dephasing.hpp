#pragma once

#include <complex>
#include <vector>

#include "orca/atomphys/species.hpp"

namespace orca::analytic {

enum class Geometry { CounterPropagating, CoPropagating };

struct DephasingModel {
    double k_r = 0.0;  // m^-1, signed residual wavevector
    double v_s = 0.0;  // m/s
    double tau_D = 0.0;  // s, +inf when k_r = 0
};

DephasingModel dephasing_model(double lambda_s, double lambda_c, double T, const atomphys::SpeciesRecord& s,
                               Geometry g = Geometry::CounterPropagating);

// 1/e time of exp(-(k_r v_s tau)^2).
double doppler_lifetime(double lambda_s, double lambda_c, double T, const atomphys::SpeciesRecord& s,
                        Geometry g = Geometry::CounterPropagating);

struct BeatComponent {
    std::complex<double> amplitude;
    double frequency;  // rad/s
};

// Retrieval amplitude sum_F c_F exp(i w_F tau), normalised so that the c_F add up to one.
struct BeatModel {
    std::vector<BeatComponent> components;
    double tau_D = 0.0;  // s, +inf switches the Doppler envelope off
};

void normalize(BeatModel& m);

double beat_envelope(const BeatModel& m, double tau);

// Storage-manifold components of a species: weights from the far-detuned two-photon amplitudes
// a_F'' = sum_F' c(F, F') c(F', F'') / (Delta + offset_F'), c_F'' proportional to a_F''^2.
// Frequencies are the hyperfine offsets (scaled by splitting_scale).
BeatModel storage_beat_model(const atomphys::SpeciesRecord& s, double detuning, double tau_D,
                             double splitting_scale = 1.0);

// First time at which beat_envelope drops below 1/e (bisection on a sampled bracket).
double beat_lifetime(const BeatModel& m, double t_max, double dt = 1e-11);

double mu1(double noise_photons, double eta);

}  // namespace orca::analytic
