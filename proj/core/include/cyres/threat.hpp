#pragma once

#include "cyres/metrics.hpp"

#include <string>
#include <vector>

namespace cyres {

/// One step of a threat's staged performance decline: `delay` after the
/// infection instant, the vehicle's performance becomes `level`.
struct DegradationStage {
    double delay = 0.0;
    double level = 0.0;
};

/// Attack class configuration. Stage delays are strictly increasing and
/// levels non-increasing; beta is the expected infection attempts per
/// infected vehicle per unit time under uniform random mixing.
struct Threat {
    std::string id;
    std::vector<int> susceptible_variants;
    double beta = 0.0;
    std::vector<DegradationStage> stages;
    bool signature_known = false;
    double adaptation_delay = kInfiniteTime; // attacker re-work time after a generation change

    bool susceptible(int variant) const {
        for (int v : susceptible_variants) {
            if (v == variant) {
                return true;
            }
        }
        return false;
    }

    double stage_level(int stage) const {
        if (stage < 0 || stages.empty()) {
            return 1.0;
        }
        return stages[static_cast<std::size_t>(stage)].level;
    }
};

/// Live infection of one vehicle: when it happened and which software
/// generation the exploit was built against.
struct InfectionRecord {
    int vehicle = -1;
    int threat = -1;
    double infected_at = 0.0;
    int bound_generation = 0;
};

/// Per-run mutable threat state.
struct ThreatRuntime {
    /// Generation the exploit currently works against; bumped by
    /// AttackerAdapted events after proactive updates.
    int exploit_generation = 0;
    int infected_now = 0;
    int hosts_ever = 0;
    double first_seed_at = kInfiniteTime;
    double last_infection_at = 0.0;
};

} // namespace cyres
