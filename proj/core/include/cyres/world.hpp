#pragma once

#include "cyres/decision_log.hpp"
#include "cyres/engine.hpp"
#include "cyres/fleet.hpp"
#include "cyres/metrics.hpp"
#include "cyres/response.hpp"
#include "cyres/rng.hpp"
#include "cyres/scenario.hpp"
#include "cyres/threat.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cyres {

enum class WorldMode : std::uint8_t {
    Main,      // full detect / understand / respond loop
    Shadow,    // response-disabled clone: raw threat physics only
    Prediction // candidate-evaluation clone, silent and loop-free
};

/// Snapshot taken when a deployment treats a vehicle; a withdrawal restores
/// exactly this state.
struct VehicleSnapshot {
    HealthState state = HealthState::Infected;
    int stage = -1;
    double perf = 1.0;
    InfectionRecord record;
};

struct Deployment {
    int id = -1;
    int incident = -1;
    int candidate = -1; // index into scenario candidates
    bool treats_contained = false;
    double start = 0.0;
    bool started = false;
    bool complete = false;
    bool withdrawn = false;
    bool active = true;
    double complete_at = 0.0;
    double withdrawn_at = 0.0;
    double credit = 0.0;
    std::int64_t batches = 0; // batch k lands at start + k * dt, exactly
    std::int64_t treated = 0;
    std::map<int, VehicleSnapshot> snapshots;
};

struct Incident {
    int index = -1;
    int threat = -1;
    double seeded_at = 0.0;
    std::vector<int> targets;
    bool blocked = false;
    bool detected = false;
    bool understood = false;
    double understanding_base_delay = 0.0;
    double understanding_latency = 0.0;
    IncidentTimeline timeline;
    std::vector<int> ranking;
    int chosen = -1;
    std::vector<int> tried;
    PerformanceTrace prediction;
    double prediction_start = 0.0;
    double prediction_end = 0.0;
    int monitored_deployment = -1;
    int full_deployment = -1;
    std::optional<double> breach_start;
    bool kb_recorded = false;
    int withdrawals = 0;
};

/// Processed-event record, the run's replayable evidence for tests.
struct EventRecord {
    double at = 0.0;
    EventKind kind = EventKind::Sample;
    std::string note;
    int threat = -1;
    int vehicle = -1;
    int generation = -1;
};

struct PlanResult {
    std::vector<int> ranking; // candidate indices, best first
    int chosen = -1;
    std::vector<double> scores;            // aligned with ranking
    PerformanceTrace predicted;            // trace of the chosen candidate's clone
    double window_start = 0.0;
    double window_end = 0.0;
};

enum class DetectionKind : std::uint8_t { BlockedPreEvent, DetectedAt, NeverDetected };

struct DetectionOutcome {
    DetectionKind kind = DetectionKind::NeverDetected;
    double at = 0.0;
};

/// One simulation run: a deterministic discrete-event world over a fleet
/// under attack, with the operational response loop on top. A run is
/// strictly sequential; concurrent runs share nothing.
class World {
public:
    World(Scenario scenario, std::uint64_t master_seed, WorldMode mode);

    // --- engine -----------------------------------------------------------

    /// Enqueues an externally built event. Throws PastEventError when the
    /// event lies before the clock.
    void schedule(SimEvent ev);

    /// Processes every pending event with at <= horizon in (at, seq) order
    /// and closes the trace with a sample at the horizon.
    const PerformanceTrace& run_until(double horizon);

    double now() const { return clock_.now(); }
    std::uint64_t next_seq() const { return seq_counter_; }

    // --- fleet ------------------------------------------------------------

    const Fleet& fleet() const { return fleet_; }

    /// Validated state change; triggers a trace sample at the current time.
    void set_vehicle_state(int id, HealthState state, int threat, int stage, double perf);

    // --- threat -----------------------------------------------------------

    /// Validates susceptibility and schedules the seeding wave. Used by the
    /// constructor for scenario threats; public for tests.
    int seed_infection(int threat_index, std::vector<int> targets, double at);

    const ThreatRuntime& threat_runtime(int threat_index) const;
    int infected_count() const { return infected_count_; }
    double peak_infected_fraction() const { return peak_infected_fraction_; }

    /// Earliest time after which the infected count could no longer grow;
    /// infinity while growth is still possible. Meaningful on Shadow worlds.
    double propagation_time(int threat_index) const;

    // --- response loop ----------------------------------------------------

    /// Detection model: optional pre-event block for signature-known
    /// threats, then an exponential race of the combined monitor hazards.
    /// Draws from `stream` in that fixed order.
    static DetectionOutcome sample_detection(const Threat& threat, const MonitorConfig& monitors,
                                             double seeded_at, RngStream& stream);

    /// base_delay on a knowledge-base miss, base_delay * kappa on a hit.
    static double sample_understanding(const Threat& threat, const KnowledgeBase& kb,
                                       double base_delay);

    /// Simulates every allowed candidate on an independent clone with a
    /// forked stream over [now, now + horizon]; ranks by predicted
    /// normalized resilience, ties by (prep_delay, id).
    PlanResult plan_response(int incident_index, const std::vector<int>& candidate_indices,
                             double horizon) const;

    const std::vector<Incident>& incidents() const { return incidents_; }
    const std::vector<Deployment>& deployments() const { return deployments_; }
    const KnowledgeBase& knowledge() const { return kb_; }
    const DecisionLog& decision_log() const { return log_; }
    const PerformanceTrace& trace() const { return trace_; }
    const Scenario& scenario() const { return scenario_; }
    const std::vector<EventRecord>& event_record() const { return event_record_; }

    std::int64_t treated_total() const;
    double deployment_active_time() const;

private:
    friend struct WorldOps;

    void push_event(double at, EventKind kind, int threat = -1, int vehicle = -1, int arg = -1,
                    int incident = -1, int epoch = -1);
    void dispatch(const SimEvent& ev);
    void record_sample();
    void note_event(const SimEvent& ev, std::string note, int vehicle = -1, int generation = -1);
    void log_decision(double at, Actor actor, std::string action, Payload payload);

    // threat ops (threat_ops.cpp)
    void handle_seed_wave(const SimEvent& ev);
    void handle_stage_advance(const SimEvent& ev);
    void handle_contact(const SimEvent& ev);
    void handle_attacker_adapted(const SimEvent& ev);
    void infect_vehicle(int vehicle, int threat_index, int bound_generation);
    void clear_infection(int vehicle);
    void apply_generation_change(int new_generation);

    // loop ops (loop_ops.cpp)
    void handle_detection(const SimEvent& ev);
    void handle_understanding(const SimEvent& ev);
    void handle_deploy_batch(const SimEvent& ev);
    void handle_withdraw_check(const SimEvent& ev);
    void handle_update(const SimEvent& ev);
    int create_deployment(int incident_index, int candidate_index, double start, bool full_phase);
    void treat_vehicle(Deployment& deployment, int vehicle);
    void perform_withdrawal(Incident& incident, Deployment& deployment);
    void deploy_next_best(Incident& incident);
    World clone_for_prediction(int incident_index, const std::string& fork_label) const;
    double plan_horizon_or_default() const;

    Scenario scenario_;
    std::uint64_t master_seed_ = 0;
    WorldMode mode_ = WorldMode::Main;
    bool loop_enabled_ = true;    // detection / understanding / planning / withdrawal
    bool updates_enabled_ = true; // proactive update ticks
    bool silent_ = false;         // prediction clones: no log, no event record

    SimClock clock_;
    EventQueue queue_;
    std::uint64_t seq_counter_ = 0;
    double run_horizon_ = 0.0;

    Fleet fleet_;
    std::vector<std::optional<InfectionRecord>> infection_;
    std::vector<int> vehicle_epoch_;
    std::vector<ThreatRuntime> threat_rt_;
    std::vector<Incident> incidents_;
    std::vector<Deployment> deployments_;
    KnowledgeBase kb_;
    DecisionLog log_;
    PerformanceTrace trace_;
    std::vector<EventRecord> event_record_;

    RngStream propagation_;
    RngStream detection_;
    RngStream deployment_stream_; // reserved named stream; no draws yet

    int infected_count_ = 0;
    double peak_infected_fraction_ = 0.0;
};

} // namespace cyres
