#pragma once

#include <optional>
#include <string>
#include <vector>

namespace orca::photonstats {

struct ChainStage {
    std::string name;
    double value;
};

// Stage names: eta_k (Klyshko), eta_det, and optionally eta_s_add (memory input -> detector) and
// eta_s_total (source -> detector). Other names are echoed but not used.
struct HeraldingBudget {
    double klyshko = 0;
    std::optional<double> herald;     // eta_k / eta_det / eta_s_add
    std::optional<double> waveguide;  // eta_k / eta_det / eta_s_total
    std::vector<ChainStage> stages;
};

HeraldingBudget heralding_budget(const std::vector<ChainStage>& chain);

}  // namespace orca::photonstats
