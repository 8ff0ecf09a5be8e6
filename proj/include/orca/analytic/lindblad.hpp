#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "orca/analytic/dephasing.hpp"
#include "orca/atomphys/species.hpp"

namespace orca::analytic {

using cplx = std::complex<double>;

// Field envelopes as Rabi frequencies (rad/s) of the fine-structure lines; each hyperfine pair is
// scaled by its relative line strength.
struct LindbladFields {
    std::function<double(double)> signal;
    std::function<double(double)> control;
};

struct LindbladSettings {
    double detuning = 0.0;             // rad/s, same convention as the memory solver
    double two_photon_detuning = 0.0;  // rad/s
    double velocity = 0.0;             // m/s along the signal direction
    Geometry geometry = Geometry::CounterPropagating;
    double t_start = 0.0;
    double t_end = 0.0;
    double dt = 1e-12;
    int record_every = 1;
    bool radiative_decay = true;
    std::vector<cplx> initial;  // row-major density matrix; empty -> all population in the memory ground level
};

struct LindbladBasisState {
    atomphys::Manifold manifold;
    double F;
};

struct LindbladTrace {
    std::vector<LindbladBasisState> basis;
    std::vector<double> time;
    std::vector<std::vector<cplx>> rho;  // row-major, one per recorded time
    double max_trace_error = 0.0;
    double min_population = 0.0;

    std::size_t dim() const { return basis.size(); }
    double population(std::size_t sample, std::size_t state) const;
    double manifold_population(std::size_t sample, atomphys::Manifold m) const;
    cplx coherence(std::size_t sample, std::size_t row, std::size_t col) const;
    std::size_t index_of(atomphys::Manifold m, double F) const;
};

// F-resolved density-matrix evolution of one velocity class (hyperfine levels of all three manifolds,
// 12 states for Cs, 10 for Rb-87) with radiative decay down the ladder.
LindbladTrace single_atom_lindblad(const atomphys::SpeciesRecord& species, const LindbladFields& fields,
                                   const LindbladSettings& settings);

}  // namespace orca::analytic
