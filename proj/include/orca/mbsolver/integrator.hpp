#pragma once

#include <functional>
#include <vector>

#include "orca/mbsolver/model.hpp"

namespace orca::mbsolver {

// Atomic amplitudes at one instant; layout follows MemoryModel::p_index / s_index.
struct EnsembleState {
    double time = 0.0;
    std::vector<cplx> amplitudes;

    static EnsembleState zeros(const MemoryModel& m, double t);
};

// beta * int dz sum_v w |S|^2 (spin wave) and the same including P (total excitation).
double spin_wave_norm(const MemoryModel& m, const EnsembleState& st);
double excitation_norm(const MemoryModel& m, const EnsembleState& st);

struct Drive {
    std::function<cplx(double t)> input;          // A(z = 0, t)
    std::function<double(double z, double t)> control;  // Omega(z, t), rad/s
};

// Control drive from Gaussian envelopes with the geometric arrival delay of the chosen geometry.
Drive make_drive(const MemoryModel& m, std::vector<ControlEnvelope> pulses, std::function<cplx(double)> input);

enum class Execution { Serial, Parallel };

// Right-hand side of the ladder equations. `control` holds Omega at every z node, `field` receives A(z).
// Serial and OpenMP variants perform identical arithmetic in identical order.
void rhs_serial(const MemoryModel& m, const cplx* y, const double* control, cplx input, cplx* dy, cplx* field,
                cplx* source);
void rhs_parallel(const MemoryModel& m, const cplx* y, const double* control, cplx input, cplx* dy, cplx* field,
                  cplx* source);

struct WindowResult {
    std::vector<double> time;
    std::vector<cplx> input;   // A(0, t)
    std::vector<cplx> output;  // A(L, t)
    std::vector<double> spin_norm;
    std::vector<double> excitation;
    double input_energy = 0.0;
    double output_energy = 0.0;
    double decayed = 0.0;
    int steps = 0;
    double stability_number = 0.0;  // max rate * dt
};

// Fourth-order Runge-Kutta over [t0, t1] with the field marched downstream at each stage.
WindowResult integrate_window(const MemoryModel& m, EnsembleState& state, double t1, const Drive& drive,
                              double peak_rabi, Execution exec = Execution::Parallel);

}  // namespace orca::mbsolver
