#pragma once

#include <utility>
#include <vector>

#include "orca/mbsolver/integrator.hpp"

namespace orca::mbsolver {

// Everything needed besides the pulse schedule.
struct MemorySetup {
    atomphys::SpeciesRecord species;
    atomphys::ThermalEnsemble ensemble;
    SolverGrid grid;
    Calibration calibration;
    ModelOptions options;
    Execution execution = Execution::Parallel;
};

MemoryModel build_model(const MemorySetup& setup, const ProtocolSchedule& schedule);

struct MemoryResult {
    double eta_in = 0.0;
    double eta_total = 0.0;
    double eta_out = 0.0;
    double input_energy = 0.0;
    std::vector<double> transmitted_time;
    std::vector<cplx> transmitted;
    std::vector<double> recalled_time;
    std::vector<cplx> recalled;
    std::vector<std::pair<double, double>> spin_wave_norm;  // (t, beta int |S|^2) relative to the input
    // Read-in bookkeeping, fractions of the input energy.
    double transmitted_fraction = 0.0;
    double stored_fraction = 0.0;
    double decayed_fraction = 0.0;
    double bookkeeping_residual = 0.0;
    int steps = 0;
    double stability_number = 0.0;
};

struct StorageRun {
    EnsembleState state;  // at the end of the read-in window
    MemoryResult result;  // read-in part
};

struct Window {
    double start;
    double end;
};
Window read_in_window(const MemoryModel& m, const ProtocolSchedule& s);
Window read_out_window(const MemoryModel& m, const ProtocolSchedule& s);

StorageRun propagate_storage(const MemorySetup& setup, const MemoryModel& m, const ProtocolSchedule& s);

// Free evolution of the stored amplitudes (no light present). duration >= 0.
EnsembleState evolve_dark(const EnsembleState& state, const MemoryModel& m, double duration);

// Read-out after the configured storage time (measured between the read-in and read-out centres).
MemoryResult propagate_retrieval(const MemorySetup& setup, const MemoryModel& m, const StorageRun& stored,
                                 const ProtocolSchedule& s);

MemoryResult run_memory(const MemorySetup& setup, const ProtocolSchedule& s);

struct LifetimePoint {
    double tau;
    double eta_total;
    double eta_in;
    double eta_N;
};

// eta_N(tau) = eta_total(tau) / eta_total(0) from one read-in and one read-out per storage time.
std::vector<LifetimePoint> lifetime_curve(const MemorySetup& setup, const ProtocolSchedule& schedule,
                                          const std::vector<double>& taus);

struct EfficiencyPoint {
    double energy;
    double eta_total;
    double eta_in;
};

// Equal read-in and read-out energies.
std::vector<EfficiencyPoint> efficiency_vs_energy(const MemorySetup& setup, const ProtocolSchedule& schedule,
                                                  const std::vector<double>& energies);

struct LifetimeFit {
    double lifetime;                  // first 1/e crossing, s
    std::vector<double> recrossings;  // later times where eta_N climbs back above 1/e
    bool oscillatory = false;
};

LifetimeFit fit_lifetime(const std::vector<std::pair<double, double>>& curve);
LifetimeFit fit_lifetime(const std::vector<LifetimePoint>& curve);

}  // namespace orca::mbsolver
