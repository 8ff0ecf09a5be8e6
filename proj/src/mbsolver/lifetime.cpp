#include <cmath>

#include "orca/errors.hpp"
#include "orca/mbsolver/memory.hpp"

namespace orca::mbsolver {

std::vector<LifetimePoint> lifetime_curve(const MemorySetup& setup, const ProtocolSchedule& schedule,
                                          const std::vector<double>& taus) {
    if (taus.empty()) throw DomainError("lifetime_curve: empty storage-time list");
    for (double t : taus)
        if (t < 0) throw DomainError("lifetime_curve: storage times must be non-negative");
    const auto base = schedule.with_storage_time(0.0);
    const auto m = build_model(setup, base);
    const auto stored = propagate_storage(setup, m, base);
    const double eta0 = propagate_retrieval(setup, m, stored, base).eta_total;
    if (!(eta0 > 0)) throw NumericalError("lifetime_curve: zero retrieval at tau = 0, curve cannot be normalised");
    std::vector<LifetimePoint> out;
    out.reserve(taus.size());
    for (double tau : taus) {
        const double eta = tau == 0.0 ? eta0 : propagate_retrieval(setup, m, stored, base.with_storage_time(tau)).eta_total;
        out.push_back({tau, eta, stored.result.eta_in, eta / eta0});
    }
    return out;
}

std::vector<EfficiencyPoint> efficiency_vs_energy(const MemorySetup& setup, const ProtocolSchedule& schedule,
                                                  const std::vector<double>& energies) {
    std::vector<EfficiencyPoint> out;
    out.reserve(energies.size());
    for (double e : energies) {
        if (e < 0) throw DomainError("efficiency_vs_energy: energies must be non-negative");
        const auto r = run_memory(setup, schedule.with_energies(e, e));
        out.push_back({e, r.eta_total, r.eta_in});
    }
    return out;
}

LifetimeFit fit_lifetime(const std::vector<std::pair<double, double>>& curve) {
    const double target = std::exp(-1.0);
    LifetimeFit fit{NAN, {}, false};
    bool found = false;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const auto [t0, y0] = curve[i - 1];
        const auto [t1, y1] = curve[i];
        if (!(t1 > t0)) throw DomainError("fit_lifetime: storage times must increase");
        auto cross = [&] {
            // log-linear interpolation, exact for exponential segments
            if (y0 > 0 && y1 > 0) {
                const double a = std::log(y0), b = std::log(y1);
                return t0 + (t1 - t0) * (a + 1.0) / (a - b);
            }
            return t0 + (t1 - t0) * (y0 - target) / (y0 - y1);
        };
        if (!found && y0 >= target && y1 < target) {
            fit.lifetime = cross();
            found = true;
        } else if (found && y0 < target && y1 >= target) {
            fit.recrossings.push_back(t0 + (t1 - t0) * (target - y0) / (y1 - y0));
        }
    }
    if (!found) throw OutOfRangeError("fit_lifetime: curve never crosses 1/e in the sampled range");
    fit.oscillatory = !fit.recrossings.empty();
    return fit;
}

LifetimeFit fit_lifetime(const std::vector<LifetimePoint>& curve) {
    std::vector<std::pair<double, double>> c;
    for (const auto& p : curve) c.emplace_back(p.tau, p.eta_N);
    return fit_lifetime(c);
}

}  // namespace orca::mbsolver
