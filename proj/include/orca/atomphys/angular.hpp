#pragma once

#include "orca/atomphys/species.hpp"

namespace orca::atomphys {

// Wigner 6j symbol {j1 j2 j3; j4 j5 j6} via the Racah sum. Arguments are (half-)integers.
double wigner_6j(double j1, double j2, double j3, double j4, double j5, double j6);

// Signed hyperfine amplitude of F_lower -> F_upper within the J_lower -> J_upper line.
// Squares sum to one over F_upper. Dipole-forbidden pairs give 0.
double relative_line_strength(double F_lower, double F_upper, double J_lower, double J_upper, double I);

// Fraction of spontaneous decay from F_upper into F_lower (sums to one over F_lower).
double decay_branching(double F_upper, double F_lower, double J_upper, double J_lower, double I);

// Shorthand on a species: lower/upper manifolds adjacent in the ladder.
double relative_line_strength(const SpeciesRecord& s, Manifold lower, double F_lower, double F_upper);

}  // namespace orca::atomphys
