#pragma once

#include "cyres/scenario.hpp"
#include "cyres/world.hpp"

#include <cstdint>
#include <memory>
#include <optional>

namespace cyres {

/// Per-incident summary row (timeline plus loop facts).
struct IncidentSummary {
    int index = -1;
    std::string threat_id;
    double seeded_at = 0.0;
    bool blocked = false;
    bool detected = false;
    bool understood = false;
    double understanding_latency = 0.0;
    std::string chosen_candidate;
    std::string urgency;
    int withdrawals = 0;
    IncidentTimeline timeline;
};

/// Everything one run produces: the mitigated trace and loop evidence, the
/// shadow-derived quantities, and the assembled reports.
struct RunResult {
    PerformanceTrace trace;
    DecisionLog log;
    ResilienceReport report;
    CertificationInputs certification;
    std::vector<IncidentSummary> incidents;
    double shadow_peak_infected_fraction = 0.0;
    std::optional<PerformanceTrace> shadow_trace;
    std::uint64_t seed = 0;
};

/// Executes the scenario (main run plus, when enabled, the response-disabled
/// shadow run) and assembles the resilience and certification quantities.
RunResult run_simulation(const Scenario& scenario, std::uint64_t seed);

/// Time for the threat to reach its eventual spread on a response-disabled
/// run; infinity when the spread was still growing at the horizon.
double shadow_propagation_time(const Scenario& scenario, std::uint64_t seed,
                               int threat_index = 0);

} // namespace cyres
