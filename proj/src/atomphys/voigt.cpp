#include "orca/atomphys/voigt.hpp"

#include <array>
#include <cmath>

#include "orca/atomphys/angular.hpp"
#include "orca/constants.hpp"
#include "orca/errors.hpp"

namespace orca::atomphys {

namespace {

constexpr int kTerms = 32;

struct WeidemanCoefficients {
    double L;
    std::array<double, kTerms> a;  // a[n-1] multiplies Z^(n-1)

    WeidemanCoefficients() {
        const int M = 2 * kTerms;
        const int len = 2 * M;
        L = std::sqrt(kTerms / std::sqrt(2.0));
        auto g = [&](int k) {
            if (k == -M) return 0.0;
            const double t = L * std::tan(0.5 * k * phys::pi / M);
            return std::exp(-t * t) * (L * L + t * t);
        };
        for (int n = 1; n <= kTerms; ++n) {
            double acc = 0.0;
            for (int k = -M + 1; k <= M - 1; ++k) acc += g(k) * std::cos(phys::pi * n * k / M);
            a[n - 1] = acc / len;
        }
    }
};

const WeidemanCoefficients& coefficients() {
    static const WeidemanCoefficients c;
    return c;
}

}  // namespace

std::complex<double> faddeeva(std::complex<double> z) {
    if (z.imag() < 0) throw DomainError("faddeeva: implemented for Im z >= 0");
    const auto& c = coefficients();
    const std::complex<double> I(0.0, 1.0);
    const std::complex<double> denom = c.L - I * z;
    const std::complex<double> Z = (c.L + I * z) / denom;
    std::complex<double> p = c.a[kTerms - 1];
    for (int n = kTerms - 2; n >= 0; --n) p = p * Z + c.a[n];
    return 2.0 * p / (denom * denom) + (1.0 / std::sqrt(phys::pi)) / denom;
}

double voigt_profile(double detuning, double sigma, double gamma) {
    if (sigma < 0 || gamma < 0) throw DomainError("voigt_profile: widths must be non-negative");
    if (sigma == 0.0) {
        if (gamma == 0.0) throw DomainError("voigt_profile: both widths zero");
        const double hw = 0.5 * gamma;
        return hw / (phys::pi * (detuning * detuning + hw * hw));
    }
    const double s2 = sigma * std::sqrt(2.0);
    const std::complex<double> z(std::abs(detuning) / s2, 0.5 * gamma / s2);
    return faddeeva(z).real() / (sigma * std::sqrt(2.0 * phys::pi));
}

static const Transition& transition_of(const SpeciesRecord& s, TransitionPair pair) {
    return pair == TransitionPair::Signal ? s.signal : s.control;
}

static std::pair<Manifold, Manifold> manifolds_of(TransitionPair pair) {
    return pair == TransitionPair::Signal ? std::pair{Manifold::Ground, Manifold::Intermediate}
                                          : std::pair{Manifold::Intermediate, Manifold::Storage};
}

double component_detuning(const SpeciesRecord& s, TransitionPair pair, double F_lower, double F_upper) {
    const auto [lo, up] = manifolds_of(pair);
    return s.manifold(lo).level(F_lower).energy_offset - s.manifold(up).level(F_upper).energy_offset;
}

std::vector<AbsorptionComponent> absorption_components(const SpeciesRecord& s, TransitionPair pair) {
    const auto [lo, up] = manifolds_of(pair);
    const auto& ml = s.manifold(lo);
    const auto& mu = s.manifold(up);
    const auto& tr = transition_of(s, pair);
    const double I = s.nuclear_spin;
    const double omega = phys::two_pi * phys::c / tr.wavelength;
    const double lambda2 = tr.wavelength * tr.wavelength;
    const double d2 = tr.reduced_dipole * tr.reduced_dipole;
    const double A_line = omega * omega * omega * d2 / (3.0 * phys::pi * phys::eps0 * phys::hbar * std::pow(phys::c, 3) * (2 * mu.J + 1));
    // (g_u/g_l)(lambda^2/4) A for the fine-structure line
    const double sigma_line = (2 * mu.J + 1) / (2 * ml.J + 1) * lambda2 / 4.0 * A_line;
    const double g_total = (2 * I + 1) * (2 * ml.J + 1);
    std::vector<AbsorptionComponent> out;
    for (const auto& l : ml.levels) {
        for (const auto& u : mu.levels) {
            const double c = relative_line_strength(l.F, u.F, ml.J, mu.J, I);
            if (c == 0.0) continue;
            out.push_back({l.F, u.F, l.energy_offset - u.energy_offset, (2 * l.F + 1) / g_total, c * c, c * c * sigma_line});
        }
    }
    return out;
}

double voigt_absorption(double detuning, const ThermalEnsemble& ensemble, const SpeciesRecord& s, TransitionPair pair) {
    if (ensemble.number_density == 0.0) return 0.0;
    const auto [lo, up] = manifolds_of(pair);
    const double k = phys::two_pi / transition_of(s, pair).wavelength;
    const double sigma = k * ensemble.thermal_speed;
    const double gamma = s.manifold(up).linewidth + s.manifold(lo).linewidth;
    double alpha = 0.0;
    for (const auto& c : absorption_components(s, pair))
        alpha += c.population * c.cross_section_integral * voigt_profile(detuning - c.center, sigma, gamma);
    return ensemble.number_density * alpha;
}

double integrated_absorption(const ThermalEnsemble& ensemble, const SpeciesRecord& s, TransitionPair pair) {
    double acc = 0.0;
    for (const auto& c : absorption_components(s, pair)) acc += c.population * c.cross_section_integral;
    return ensemble.number_density * acc;
}

std::vector<SpectrumPoint> transmission_spectrum(const std::vector<double>& detunings, const ThermalEnsemble& ensemble,
                                                 const SpeciesRecord& s) {
    std::vector<SpectrumPoint> out;
    out.reserve(detunings.size());
    for (double d : detunings)
        out.push_back({d, std::exp(-voigt_absorption(d, ensemble, s) * ensemble.cell_length)});
    return out;
}

}  // namespace orca::atomphys
