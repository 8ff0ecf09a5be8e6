#pragma once

#include <complex>
#include <vector>

#include "orca/atomphys/species.hpp"
#include "orca/atomphys/thermal.hpp"

namespace orca::atomphys {

// Faddeeva function w(z) = exp(-z^2) erfc(-iz) for Im z >= 0 (Weideman rational expansion).
std::complex<double> faddeeva(std::complex<double> z);

// Area-normalised Voigt line shape in angular frequency: Gaussian rms width sigma (rad/s)
// convolved with a Lorentzian of FWHM gamma (rad/s).
double voigt_profile(double detuning, double sigma, double gamma);

enum class TransitionPair { Signal, Control };

struct AbsorptionComponent {
    double F_lower;
    double F_upper;
    double center;                // rad/s, detuning at which the component is resonant
    double population;            // thermal fraction of atoms in F_lower
    double strength;              // squared relative line strength
    double cross_section_integral;  // m^2 rad/s, per atom in F_lower
};

// Detuning convention shared with the solver: Delta = omega_transition - omega_laser,
// measured from the fine-structure centroid line (positive = red of resonance).
// The lower manifold is assumed thermally populated (meaningful for the signal pair).
std::vector<AbsorptionComponent> absorption_components(const SpeciesRecord& s, TransitionPair pair);

// Absorption coefficient alpha(Delta), m^-1.
double voigt_absorption(double detuning, const ThermalEnsemble& ensemble, const SpeciesRecord& s,
                        TransitionPair pair = TransitionPair::Signal);

// n * sum of component cross-section integrals, m^-1 rad/s (the exact value of the alpha integral).
double integrated_absorption(const ThermalEnsemble& ensemble, const SpeciesRecord& s,
                             TransitionPair pair = TransitionPair::Signal);

// Detuning (centroid frame) at which the laser is resonant with F_lower -> F_upper.
double component_detuning(const SpeciesRecord& s, TransitionPair pair, double F_lower, double F_upper);

struct SpectrumPoint {
    double detuning;      // rad/s
    double transmission;  // exp(-alpha L)
};

std::vector<SpectrumPoint> transmission_spectrum(const std::vector<double>& detunings, const ThermalEnsemble& ensemble,
                                                 const SpeciesRecord& s);

struct TemperatureFit {
    double temperature;
    double number_density;
    double rms_residual;
    int evaluations;
};

// Least-squares fit of T (density tied to T by the vapour-pressure model).
TemperatureFit fit_temperature(const std::vector<SpectrumPoint>& spectrum, const SpeciesRecord& s, double cell_length,
                               double T_min = 200.0, double T_max = 700.0);

}  // namespace orca::atomphys
