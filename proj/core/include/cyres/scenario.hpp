#pragma once

#include "cyres/fleet.hpp"
#include "cyres/metrics.hpp"
#include "cyres/response.hpp"
#include "cyres/sha256.hpp"
#include "cyres/threat.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cyres {

struct FleetConfig {
    int n = 1;
    int variants = 1;
    VariantAssignment assignment = VariantAssignment::RoundRobin;
};

/// How a threat enters the fleet: either an explicit target id list or the
/// `count` lowest-id susceptible vehicles, at time `at`.
struct SeedingSpec {
    std::vector<int> targets;
    int count = 0;
    double at = 0.0;
};

struct ThreatSpec {
    Threat threat;
    SeedingSpec seeding;
};

struct UnderstandingConfig {
    double base_delay = 1.0;
    double kappa = 0.25;
    /// Lookahead used when simulating candidate responses. Defaults to the
    /// remaining run horizon when unset.
    std::optional<double> plan_horizon;
};

struct UpdatesConfig {
    double period = 0.0; // 0 disables proactive updates
    bool trusted = true;
    double adaptation_delay = kInfiniteTime; // default tau_a for threats that omit it
};

struct RunConfig {
    double horizon = 10.0;
    double dt = 0.1;
    std::uint64_t seed = 0;
    bool shadow = true; // also run the response-disabled shadow for t_c / t_prop
};

struct Scenario {
    FleetConfig fleet;
    std::vector<ThreatSpec> threats;
    MonitorConfig monitors;
    UnderstandingConfig understanding;
    std::vector<ResponseCandidate> candidates;
    UpdatesConfig updates;
    Thresholds thresholds;
    RunConfig run;
};

/// Strict parse: UTF-8 JSON, unknown keys rejected, defaults applied for
/// absent optional keys. Throws ParseError or ValidationError.
Scenario parse_scenario(std::string_view bytes);

/// Fully-populated canonical JSON form (sorted keys, no insignificant
/// whitespace, every default made explicit). parse_scenario() of this text
/// reproduces the identical Scenario.
std::string scenario_to_canonical_json(const Scenario& scenario);

/// SHA-256 of the canonical JSON form; invariant under reformatting of the
/// input file.
Digest scenario_digest(const Scenario& scenario);

bool operator==(const Scenario& a, const Scenario& b);

} // namespace cyres
