#include "cyres/world.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cyres {

int World::seed_infection(int threat_index, std::vector<int> targets, double at) {
    const Threat& threat = scenario_.threats.at(static_cast<std::size_t>(threat_index)).threat;
    if (targets.empty()) {
        throw BadConfigError("threat " + threat.id + ": seeding needs at least one target");
    }
    for (int id : targets) {
        const Vehicle& v = fleet_.at(id); // throws UnknownVehicleError
        if (!threat.susceptible(v.variant)) {
            throw NotSusceptibleError("vehicle " + std::to_string(id) + " (variant " +
                                      std::to_string(v.variant) + ") is not susceptible to threat " +
                                      threat.id);
        }
    }
    Incident incident;
    incident.index = static_cast<int>(incidents_.size());
    incident.threat = threat_index;
    incident.seeded_at = at;
    incident.targets = std::move(targets);
    incidents_.push_back(std::move(incident));
    push_event(at, EventKind::Infection, threat_index, -1, kSeedWave, incidents_.back().index);
    return incidents_.back().index;
}

DetectionOutcome World::sample_detection(const Threat& threat, const MonitorConfig& monitors,
                                         double seeded_at, RngStream& stream) {
    DetectionOutcome outcome;
    if (threat.signature_known) {
        const double u = stream.uniform01();
        if (u < monitors.pre_event_probability) {
            outcome.kind = DetectionKind::BlockedPreEvent;
            outcome.at = seeded_at;
            return outcome;
        }
    }
    const double rate = monitors.combined_rate(threat.signature_known);
    if (rate <= 0.0) {
        outcome.kind = DetectionKind::NeverDetected;
        return outcome;
    }
    outcome.kind = DetectionKind::DetectedAt;
    outcome.at = seeded_at + stream.exponential(rate);
    return outcome;
}

void World::handle_seed_wave(const SimEvent& ev) {
    Incident& incident = incidents_.at(static_cast<std::size_t>(ev.incident));
    const Threat& threat = scenario_.threats[static_cast<std::size_t>(ev.threat)].threat;
    ThreatRuntime& rt = threat_rt_[static_cast<std::size_t>(ev.threat)];
    rt.first_seed_at = std::min(rt.first_seed_at, clock_.now());

    if (loop_enabled_) {
        const DetectionOutcome outcome =
            sample_detection(threat, scenario_.monitors, clock_.now(), detection_);
        if (outcome.kind == DetectionKind::BlockedPreEvent) {
            incident.blocked = true;
            incident.detected = true;
            incident.timeline.t_detect = clock_.now();
            note_event(ev, "blocked_pre_event");
            log_decision(clock_.now(), Actor::Monitor, "blocked_pre_event",
                         {{"threat", threat.id}, {"incident", std::int64_t(incident.index)}});
            return;
        }
        if (outcome.kind == DetectionKind::DetectedAt) {
            push_event(outcome.at, EventKind::DetectionCheck, ev.threat, -1, -1, incident.index);
        }
    }

    for (int id : incident.targets) {
        const Vehicle& v = fleet_.at(id);
        if (v.state != HealthState::Healthy) {
            note_event(ev, "seed_skipped_unhealthy", id, v.generation);
            continue;
        }
        if (v.generation != rt.exploit_generation) {
            // The exploit targets another software generation; the attacker
            // has not adapted yet.
            note_event(ev, "seed_refused_generation", id, v.generation);
            continue;
        }
        infect_vehicle(id, ev.threat, v.generation);
    }
}

void World::infect_vehicle(int vehicle, int threat_index, int bound_generation) {
    const Threat& threat = scenario_.threats[static_cast<std::size_t>(threat_index)].threat;
    ThreatRuntime& rt = threat_rt_[static_cast<std::size_t>(threat_index)];
    const int epoch = ++vehicle_epoch_[static_cast<std::size_t>(vehicle)];

    const bool stage0_now = !threat.stages.empty() && threat.stages.front().delay == 0.0;
    const int stage = stage0_now ? 0 : -1;
    const double perf = stage0_now ? threat.stages.front().level : 1.0;
    set_vehicle_state(vehicle, HealthState::Infected, threat_index, stage, perf);

    InfectionRecord record;
    record.vehicle = vehicle;
    record.threat = threat_index;
    record.infected_at = clock_.now();
    record.bound_generation = bound_generation;
    infection_[static_cast<std::size_t>(vehicle)] = record;

    ++rt.infected_now;
    ++rt.hosts_ever;
    rt.last_infection_at = clock_.now();
    ++infected_count_;
    peak_infected_fraction_ =
        std::max(peak_infected_fraction_,
                 static_cast<double>(infected_count_) / static_cast<double>(fleet_.size()));

    SimEvent marker;
    marker.kind = EventKind::Infection;
    marker.threat = threat_index;
    note_event(marker, "infection", vehicle, bound_generation);

    for (std::size_t k = stage0_now ? 1 : 0; k < threat.stages.size(); ++k) {
        push_event(clock_.now() + threat.stages[k].delay, EventKind::Infection, threat_index,
                   vehicle, static_cast<int>(k), -1, epoch);
    }
    if (threat.beta > 0.0) {
        push_event(clock_.now() + propagation_.exponential(threat.beta), EventKind::Infection,
                   threat_index, vehicle, kContact, -1, epoch);
    }
}

void World::handle_stage_advance(const SimEvent& ev) {
    if (ev.epoch != vehicle_epoch_[static_cast<std::size_t>(ev.vehicle)]) {
        return; // treated, cleared or re-infected since scheduling
    }
    Vehicle& v = fleet_.at(ev.vehicle);
    if (v.state != HealthState::Infected || v.threat != ev.threat) {
        return;
    }
    if (v.stage >= ev.arg) {
        return;
    }
    const Threat& threat = scenario_.threats[static_cast<std::size_t>(ev.threat)].threat;
    set_vehicle_state(ev.vehicle, HealthState::Infected, ev.threat, ev.arg,
                      threat.stage_level(ev.arg));
}

void World::handle_contact(const SimEvent& ev) {
    if (ev.epoch != vehicle_epoch_[static_cast<std::size_t>(ev.vehicle)]) {
        return; // the chain belongs to an earlier infection of this vehicle
    }
    const Vehicle& source = fleet_.at(ev.vehicle);
    if (source.state != HealthState::Infected || source.threat != ev.threat) {
        return; // source no longer spreads; the chain dies here
    }
    const Threat& threat = scenario_.threats[static_cast<std::size_t>(ev.threat)].threat;
    const auto& source_record = infection_[static_cast<std::size_t>(ev.vehicle)];

    const int target = static_cast<int>(
        propagation_.uniform_below(static_cast<std::uint64_t>(fleet_.size())));
    const Vehicle& tv = fleet_.at(target);
    if (target != ev.vehicle && tv.state == HealthState::Healthy &&
        threat.susceptible(tv.variant) && source_record &&
        tv.generation == source_record->bound_generation) {
        infect_vehicle(target, ev.threat, tv.generation);
    }
    push_event(clock_.now() + propagation_.exponential(threat.beta), EventKind::Infection,
               ev.threat, ev.vehicle, kContact, -1, ev.epoch);
}

void World::handle_attacker_adapted(const SimEvent& ev) {
    ThreatRuntime& rt = threat_rt_[static_cast<std::size_t>(ev.threat)];
    if (ev.arg > rt.exploit_generation) {
        rt.exploit_generation = ev.arg;
    }
    note_event(ev, "attacker_adapted", -1, ev.arg);
}

void World::clear_infection(int vehicle) {
    Vehicle& v = fleet_.at(vehicle);
    if (v.state != HealthState::Infected) {
        return;
    }
    ThreatRuntime& rt = threat_rt_[static_cast<std::size_t>(v.threat)];
    --rt.infected_now;
    --infected_count_;
    infection_[static_cast<std::size_t>(vehicle)].reset();
    ++vehicle_epoch_[static_cast<std::size_t>(vehicle)];
    set_vehicle_state(vehicle, HealthState::Healthy, -1, -1, 1.0);
}

void World::apply_generation_change(int new_generation) {
    std::vector<int> cleared;
    for (const Vehicle& v : fleet_.vehicles()) {
        if (v.state == HealthState::Infected) {
            cleared.push_back(v.id);
        }
    }
    for (int id : cleared) {
        clear_infection(id);
    }
    fleet_.set_generation(new_generation);
    for (std::size_t t = 0; t < scenario_.threats.size(); ++t) {
        const double tau = scenario_.threats[t].threat.adaptation_delay;
        if (std::isfinite(tau)) {
            push_event(clock_.now() + tau, EventKind::AttackerAdapted, static_cast<int>(t), -1,
                       new_generation);
        }
    }
}

} // namespace cyres
