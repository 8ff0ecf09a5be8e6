#include <cmath>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "orca/atomphys/voigt.hpp"
#include "orca/errors.hpp"

namespace orca::atomphys {

TemperatureFit fit_temperature(const std::vector<SpectrumPoint>& spectrum, const SpeciesRecord& s, double cell_length,
                               double T_min, double T_max) {
    if (spectrum.size() < 20) throw DomainError("fit_temperature: need at least 20 spectrum samples");
    if (!(cell_length > 0)) throw DomainError("fit_temperature: cell length must be positive");
    int evaluations = 0;
    auto ssr = [&](double T) {
        ++evaluations;
        const auto ens = make_ensemble(s, T, cell_length);
        double acc = 0.0;
        for (const auto& p : spectrum) {
            const double model = std::exp(-voigt_absorption(p.detuning, ens, s) * cell_length);
            acc += (p.transmission - model) * (p.transmission - model);
        }
        return acc;
    };
    // coarse scan guards against the flat optically-thick plateau, Brent refines
    constexpr int scan = 60;
    int best = 0;
    double best_val = INFINITY;
    std::vector<double> grid(scan + 1);
    for (int i = 0; i <= scan; ++i) {
        grid[i] = T_min * std::pow(T_max / T_min, static_cast<double>(i) / scan);
        const double v = ssr(grid[i]);
        if (v < best_val) best_val = v, best = i;
    }
    const double lo = grid[std::max(best - 1, 0)];
    const double hi = grid[std::min(best + 1, scan)];
    std::uintmax_t iters = 200;
    const auto [T, val] = boost::math::tools::brent_find_minima(ssr, lo, hi, 40, iters);
    const double rms = std::sqrt(val / spectrum.size());
    const double edge = 1e-3 * (T_max - T_min);
    if (T - T_min < edge || T_max - T < edge || !std::isfinite(val)) {
        std::ostringstream os;
        os << "fit_temperature: no interior minimum (best T=" << T << " K at the search boundary, rms residual=" << rms
           << ", evaluations=" << evaluations << "); spectrum carries no identifiable absorption";
        throw NonConvergenceError(os.str());
    }
    return {T, s.number_density(T), rms, evaluations};
}

}  // namespace orca::atomphys
