#include "cyres/simulate.hpp"

#include <cmath>
#include <utility>

namespace cyres {

RunResult run_simulation(const Scenario& scenario, std::uint64_t seed) {
    RunResult result;
    result.seed = seed;

    World main_world(scenario, seed, WorldMode::Main);
    main_world.run_until(scenario.run.horizon);
    result.trace = main_world.trace();
    result.log = main_world.decision_log();

    double t_catastrophe = kInfiniteTime;
    double t_propagate = kInfiniteTime;
    if (scenario.run.shadow && !scenario.threats.empty()) {
        World shadow(scenario, seed, WorldMode::Shadow);
        shadow.run_until(scenario.run.horizon);
        if (auto t_c = catastrophe_time(shadow.trace(), scenario.thresholds)) {
            t_catastrophe = *t_c;
        }
        t_propagate = shadow.propagation_time(0);
        result.shadow_peak_infected_fraction = shadow.peak_infected_fraction();
        result.shadow_trace = shadow.trace();
    }

    ResilienceReport report;
    report.t_catastrophe = t_catastrophe;
    const Incident* primary =
        main_world.incidents().empty() ? nullptr : &main_world.incidents().front();
    if (primary != nullptr) {
        report.timeline = primary->timeline;
    }

    try {
        const EventWindow window =
            segment_event(result.trace, scenario.thresholds, scenario.run.horizon);
        report.t_start = window.t_start;
        report.t_end = window.t_end;
        report.recovered = window.complete;
        report.timeline.t_start = window.t_start;
        if (window.complete) {
            report.timeline.t_end = window.t_end;
        }
        report.time_to_failure = time_to_failure(result.trace, scenario.thresholds, window.t_start);
        if (report.time_to_failure) {
            report.time_to_recovery = time_to_recovery(result.trace, scenario.thresholds,
                                                       window.t_start + *report.time_to_failure);
        }
        report.time_below_min =
            time_below_min(result.trace, scenario.thresholds, window.t_start, window.t_end);
        if (window.t_end > window.t_start) {
            const ResilienceIntegral integral =
                resilience_integral(result.trace, window.t_start, window.t_end);
            report.resilience_raw = integral.raw;
            report.resilience_norm = integral.normalized;
        } else {
            report.resilience_raw = 0.0;
            report.resilience_norm = 1.0;
        }
        report.loss = 1.0 - report.resilience_norm;
        report.outcome = classify_outcome(
            report.timeline, window.complete ? std::optional<double>(window.t_end) : std::nullopt,
            t_catastrophe, false);
    } catch (const NoEventError&) {
        report.no_event = true;
        report.t_start = 0.0;
        report.t_end = 0.0;
        report.resilience_raw = 0.0;
        report.resilience_norm = 1.0;
        report.loss = 0.0;
        report.outcome = classify_outcome(report.timeline, std::nullopt, t_catastrophe, true);
    }
    report.residual_contained = main_world.fleet().count_in_state(HealthState::Contained);
    result.report = report;

    CertificationInputs cert;
    if (primary != nullptr) {
        cert.detected = primary->detected;
        cert.t_detect = primary->timeline.t_detect.value_or(0.0);
        cert.understood = primary->understood || primary->blocked;
        cert.t_understand = primary->timeline.t_understand.value_or(cert.t_detect);
        cert.blocked_pre_event = primary->blocked;
    }
    cert.t_catastrophe = t_catastrophe;
    cert.vehicles_treated = main_world.treated_total();
    cert.deployment_active_time = main_world.deployment_active_time();
    cert.t_propagate = t_propagate;
    cert.peak_infected_fraction = main_world.peak_infected_fraction();
    cert.engineered_differences = scenario.fleet.variants;
    cert.update_frequency =
        scenario.updates.period > 0.0 ? 1.0 / scenario.updates.period : 0.0;
    result.certification = cert;

    for (const Incident& incident : main_world.incidents()) {
        IncidentSummary xs;
        xs.index = incident.index;
        xs.threat_id = scenario.threats[static_cast<std::size_t>(incident.threat)].threat.id;
        xs.seeded_at = incident.seeded_at;
        xs.blocked = incident.blocked;
        xs.detected = incident.detected;
        xs.understood = incident.understood;
        xs.understanding_latency = incident.understanding_latency;
        if (incident.chosen >= 0) {
            const ResponseCandidate& cand =
                scenario.candidates[static_cast<std::size_t>(incident.chosen)];
            xs.chosen_candidate = cand.id;
            xs.urgency = cand.urgency;
        }
        xs.withdrawals = incident.withdrawals;
        xs.timeline = incident.timeline;
        result.incidents.push_back(std::move(xs));
    }
    return result;
}

double shadow_propagation_time(const Scenario& scenario, std::uint64_t seed, int threat_index) {
    World shadow(scenario, seed, WorldMode::Shadow);
    shadow.run_until(scenario.run.horizon);
    return shadow.propagation_time(threat_index);
}

} // namespace cyres
