#include "orca/atomphys/thermal.hpp"

#include <cmath>

#include "orca/constants.hpp"
#include "orca/errors.hpp"

namespace orca::atomphys {

double thermal_speed(const SpeciesRecord& s, double T) {
    if (!(T > 0)) throw DomainError("thermal_speed: temperature must be positive");
    return std::sqrt(phys::k_B * T / s.mass);
}

ThermalEnsemble make_ensemble(const SpeciesRecord& s, double T, double cell_length, std::optional<double> number_density) {
    if (!(cell_length > 0)) throw DomainError("cell length must be positive");
    ThermalEnsemble e;
    e.temperature = T;
    e.thermal_speed = thermal_speed(s, T);
    e.cell_length = cell_length;
    e.number_density = number_density ? *number_density : s.number_density(T);
    if (e.number_density < 0) throw DomainError("number density must be non-negative");
    return e;
}

GaussHermiteRule gauss_hermite(int n) {
    if (n < 1) throw DomainError("gauss_hermite: need at least one node");
    GaussHermiteRule r;
    r.nodes.assign(n, 0.0);
    r.weights.assign(n, 0.0);
    const double pim4 = std::pow(phys::pi, -0.25);
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        // Asymptotic starting guesses, then Newton on the normalised recurrence.
        if (i == 0) z = std::sqrt(2.0 * n + 1) - 1.85575 * std::pow(2.0 * n + 1, -0.16667);
        else if (i == 1) z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2) z = 1.86 * z - 0.86 * r.nodes[0];
        else if (i == 3) z = 1.91 * z - 0.91 * r.nodes[1];
        else z = 2.0 * z - r.nodes[i - 2];
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        r.nodes[i] = z;
        r.nodes[n - 1 - i] = -z;
        r.weights[i] = 2.0 / (pp * pp);
        r.weights[n - 1 - i] = r.weights[i];
    }
    return r;
}

std::vector<VelocityNode> velocity_quadrature(const ThermalEnsemble& ensemble, int n_points) {
    if (n_points < 1) throw DomainError("velocity_quadrature: n_points must be >= 1");
    const auto rule = gauss_hermite(n_points);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    std::vector<VelocityNode> out(n_points);
    for (int k = 0; k < n_points; ++k) {
        // ascending velocity order
        const int i = n_points - 1 - k;
        out[k] = {std::sqrt(2.0) * ensemble.thermal_speed * rule.nodes[i], rule.weights[i] / wsum};
    }
    return out;
}

}  // namespace orca::atomphys
