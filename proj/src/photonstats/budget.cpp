#include "orca/photonstats/budget.hpp"

#include <cmath>

#include "orca/errors.hpp"

namespace orca::photonstats {

HeraldingBudget heralding_budget(const std::vector<ChainStage>& chain) {
    HeraldingBudget b;
    std::optional<double> k, det, add, total;
    for (const auto& s : chain) {
        if (!(s.value > 0.0 && s.value <= 1.0)) throw ConfigError("heralding budget: stage '" + s.name + "' outside (0, 1]");
        if (s.name == "eta_k") k = s.value;
        else if (s.name == "eta_det") det = s.value;
        else if (s.name == "eta_s_add") add = s.value;
        else if (s.name == "eta_s_total") total = s.value;
        b.stages.push_back(s);
    }
    if (!k || !det) throw ConfigError("heralding budget: eta_k and eta_det are required");
    b.klyshko = *k;
    if (add) b.herald = *k / *det / *add;
    if (total) b.waveguide = *k / *det / *total;
    return b;
}

}  // namespace orca::photonstats
