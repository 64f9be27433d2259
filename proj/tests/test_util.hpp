#pragma once

#include "cyres/scenario.hpp"

#include <string>
#include <vector>

namespace cyres::testutil {

/// Bare scenario: healthy fleet, no threats, no monitors, loop defaults.
inline Scenario base_scenario(int n, int variants, double horizon, double dt = 0.1) {
    Scenario s;
    s.fleet.n = n;
    s.fleet.variants = variants;
    s.run.horizon = horizon;
    s.run.dt = dt;
    s.monitors.pre_event_probability = 0.0;
    s.understanding.base_delay = 0.0;
    return s;
}

inline ThreatSpec simple_threat(std::string id, std::vector<int> susceptible, double beta,
                                std::vector<DegradationStage> stages, std::vector<int> targets,
                                double at) {
    ThreatSpec spec;
    spec.threat.id = std::move(id);
    spec.threat.susceptible_variants = std::move(susceptible);
    spec.threat.beta = beta;
    spec.threat.stages = std::move(stages);
    spec.seeding.targets = std::move(targets);
    spec.seeding.at = at;
    return spec;
}

inline ResponseCandidate candidate(std::string id, CandidateKind kind, double level, double rate,
                                   double prep) {
    ResponseCandidate c;
    c.id = std::move(id);
    c.kind = kind;
    c.containment_level = kind == CandidateKind::FullPatch ? 1.0 : level;
    c.deploy_rate = rate;
    c.prep_delay = prep;
    return c;
}

} // namespace cyres::testutil
