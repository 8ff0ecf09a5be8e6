#include "orca/analytic/dephasing.hpp"

#include <cmath>
#include <limits>

#include "orca/atomphys/angular.hpp"
#include "orca/atomphys/thermal.hpp"
#include "orca/constants.hpp"
#include "orca/errors.hpp"

namespace orca::analytic {

using atomphys::Manifold;

DephasingModel dephasing_model(double lambda_s, double lambda_c, double T, const atomphys::SpeciesRecord& s,
                               Geometry g) {
    if (!(lambda_s > 0) || !(lambda_c > 0)) throw DomainError("wavelengths must be positive");
    if (!(T > 0)) throw DomainError("temperature must be positive");
    DephasingModel m;
    const double ks = phys::two_pi / lambda_s, kc = phys::two_pi / lambda_c;
    m.k_r = g == Geometry::CounterPropagating ? ks - kc : ks + kc;
    m.v_s = atomphys::thermal_speed(s, T);
    m.tau_D = m.k_r == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / (std::abs(m.k_r) * m.v_s);
    return m;
}

double doppler_lifetime(double lambda_s, double lambda_c, double T, const atomphys::SpeciesRecord& s, Geometry g) {
    return dephasing_model(lambda_s, lambda_c, T, s, g).tau_D;
}

void normalize(BeatModel& m) {
    std::complex<double> sum = 0.0;
    for (const auto& c : m.components) sum += c.amplitude;
    if (std::abs(sum) == 0.0) throw DomainError("beat model has no retrievable amplitude");
    for (auto& c : m.components) c.amplitude /= sum;
}

double beat_envelope(const BeatModel& m, double tau) {
    std::complex<double> r = 0.0;
    for (const auto& c : m.components) r += c.amplitude * std::exp(std::complex<double>(0.0, c.frequency * tau));
    const double doppler = std::isinf(m.tau_D) ? 1.0 : std::exp(-(tau / m.tau_D) * (tau / m.tau_D));
    return std::norm(r) * doppler;
}

BeatModel storage_beat_model(const atomphys::SpeciesRecord& s0, double detuning, double tau_D, double splitting_scale) {
    const auto s = s0.with_scaled_splittings(splitting_scale);
    const double Fg = s.memory_ground_F();
    const auto& me = s.manifold(Manifold::Intermediate);
    const double e_ref = me.level(Fg + 1).energy_offset;
    BeatModel m;
    m.tau_D = tau_D;
    for (const auto& st : s.manifold(Manifold::Storage).levels) {
        double a = 0.0;
        for (const auto& e : me.levels) {
            const double c1 = atomphys::relative_line_strength(s, Manifold::Ground, Fg, e.F);
            const double c2 = atomphys::relative_line_strength(s, Manifold::Intermediate, e.F, st.F);
            a += c1 * c2 / (detuning + e.energy_offset - e_ref);
        }
        if (a != 0.0) m.components.push_back({a * a, st.energy_offset});
    }
    normalize(m);
    return m;
}

double beat_lifetime(const BeatModel& m, double t_max, double dt) {
    const double target = std::exp(-1.0);
    double t0 = 0.0;
    for (double t = dt; t <= t_max + 0.5 * dt; t += dt) {
        if (beat_envelope(m, t) < target) {
            double lo = t0, hi = t;
            for (int i = 0; i < 60; ++i) {
                const double mid = 0.5 * (lo + hi);
                (beat_envelope(m, mid) < target ? hi : lo) = mid;
            }
            return 0.5 * (lo + hi);
        }
        t0 = t;
    }
    throw OutOfRangeError("beat envelope stays above 1/e up to t_max");
}

double mu1(double noise_photons, double eta) {
    if (!(eta > 0)) throw DomainError("mu1 needs a positive efficiency");
    if (noise_photons < 0) throw DomainError("noise photon number must be non-negative");
    return noise_photons / eta;
}

}  // namespace orca::analytic
