#pragma once

#include <optional>
#include <vector>

#include "orca/atomphys/species.hpp"

namespace orca::atomphys {

struct ThermalEnsemble {
    double temperature = 0.0;     // K
    double number_density = 0.0;  // m^-3
    double thermal_speed = 0.0;   // m/s
    double cell_length = 0.0;     // m
};

double thermal_speed(const SpeciesRecord& s, double T);

// Density defaults to the saturated-vapour value at T.
ThermalEnsemble make_ensemble(const SpeciesRecord& s, double T, double cell_length,
                              std::optional<double> number_density = std::nullopt);

struct VelocityNode {
    double velocity;  // m/s, along the optical axis
    double weight;
};

// Physicists' Gauss-Hermite rule: nodes x_k, weights summing to sqrt(pi).
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussHermiteRule gauss_hermite(int n);

// Nodes and weights for averages over the 1-D Maxwell-Boltzmann density of the ensemble.
std::vector<VelocityNode> velocity_quadrature(const ThermalEnsemble& ensemble, int n_points);

}  // namespace orca::atomphys
