#pragma once

#include <complex>
#include <vector>

#include "orca/atomphys/species.hpp"
#include "orca/atomphys/thermal.hpp"
#include "orca/mbsolver/schedule.hpp"

namespace orca::mbsolver {

using cplx = std::complex<double>;

struct HyperfinePath {
    double F_g;
    double F_e;
    double F_s;
};

// Every |dF| <= 1 chain from the memory ground level.
std::vector<HyperfinePath> all_paths(const atomphys::SpeciesRecord& s);
// Stretched chain F -> F+1 -> F+2 (optically pumped memory).
std::vector<HyperfinePath> pumped_path(const atomphys::SpeciesRecord& s);

struct SolverGrid {
    int nz = 41;
    int nv = 64;
    double dt = 2e-12;            // s
    double window_margin = 1e-9;  // s, extra time after the last pulse for in-flight light
    std::vector<HyperfinePath> paths;  // empty -> all_paths
};

// The two free parameters the model is fitted with: scale factors on the signal and control dipoles.
struct Calibration {
    double signal_dipole_scale = 1.0;
    double control_dipole_scale = 1.0;
};

// RK4 is stable on the imaginary axis up to |lambda dt| = 2 sqrt(2); the grid is accepted while the
// largest mode rate times dt stays below this bound.
inline constexpr double kStabilityBound = 2.0;

// Precomputed coefficients of the linearised ladder equations
//   dP_e/dt = -(G_e/2 + i(D_e + k_s v)) P_e + i g_e A + i (Omega/2) sum_s c_es S_s
//   dS_s/dt = -(G_s/2 + i(d_s + k_r v)) S_s + i (Omega/2) sum_e c_es P_e
//   dA/dz   = i beta sum_v w_v sum_e g_e P_e
// with Omega(z, t) the control Rabi envelope and A normalised to unit input energy.
struct MemoryModel {
    int nz = 0, nv = 0, ne = 0, ns = 0;
    double length = 0.0;
    double dz = 0.0;
    double dt = 0.0;
    double window_margin = 0.0;
    std::vector<double> velocity, weight;
    std::vector<double> Fe, Fs;         // component quantum numbers
    std::vector<double> g;              // [ne] signal couplings
    std::vector<double> c;              // [ne * ns] control couplings, zero where no path
    std::vector<double> detuning_e;     // [ne] rad/s
    std::vector<double> detuning_s;     // [ns] rad/s
    std::vector<cplx> rate_p;           // [nv * ne] G_e/2 + i(D_e + k_s v)
    std::vector<cplx> rate_s;           // [nv * ns] G_s/2 + i(d_s + k_r v)
    double gamma_e = 0.0, gamma_s = 0.0;
    double k_s = 0.0, k_c = 0.0, k_r = 0.0;
    double beta = 0.0;                  // 1/(m s)
    Geometry geometry = Geometry::CounterPropagating;
    std::vector<HyperfinePath> paths;

    std::size_t state_size() const { return static_cast<std::size_t>(nz) * nv * (ne + ns); }
    std::size_t p_index(int z, int v, int e) const { return (static_cast<std::size_t>(z) * nv + v) * (ne + ns) + e; }
    std::size_t s_index(int z, int v, int s) const { return p_index(z, v, ne + s); }
    double z_at(int j) const { return j * dz; }
    std::vector<double> z_weight;       // [nz] quadrature weights matching the field march
    double quadrature_weight(int j) const { return z_weight[static_cast<std::size_t>(j)]; }
    // Largest |rate| the time stepper must resolve for a given peak Rabi frequency.
    double max_rate(double peak_rabi) const;
};

struct ModelOptions {
    double splitting_scale = 1.0;         // multiplies every hyperfine splitting
    double storage_linewidth_scale = 1.0;  // multiplies G_s (0 switches off spontaneous decay of |s>)
    double intermediate_linewidth_scale = 1.0;  // multiplies G_e
};

MemoryModel build_model(const atomphys::SpeciesRecord& species, const atomphys::ThermalEnsemble& ensemble,
                        const ProtocolSchedule& schedule, const SolverGrid& grid, const Calibration& cal,
                        const ModelOptions& opts = {});

// Single velocity class at rest (tests and analytic comparisons).
MemoryModel build_model_single_class(const atomphys::SpeciesRecord& species, const atomphys::ThermalEnsemble& ensemble,
                                     const ProtocolSchedule& schedule, SolverGrid grid, const Calibration& cal,
                                     const ModelOptions& opts = {});

// beta for the unscaled species data and ensemble (per-F-level signal coupling constant).
double coupling_beta(const atomphys::SpeciesRecord& species, const atomphys::ThermalEnsemble& ensemble,
                     double signal_dipole_scale);

}  // namespace orca::mbsolver
