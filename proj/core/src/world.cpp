#include "cyres/world.hpp"

#include <algorithm>
#include <cmath>

namespace cyres {

const char* to_string(EventKind k) {
    switch (k) {
    case EventKind::Infection: return "Infection";
    case EventKind::DetectionCheck: return "DetectionCheck";
    case EventKind::UnderstandingDone: return "UnderstandingDone";
    case EventKind::DeployBatch: return "DeployBatch";
    case EventKind::WithdrawCheck: return "WithdrawCheck";
    case EventKind::ProactiveUpdate: return "ProactiveUpdate";
    case EventKind::Sample: return "Sample";
    case EventKind::AttackerAdapted: return "AttackerAdapted";
    case EventKind::EndOfHorizon: return "EndOfHorizon";
    }
    return "?";
}

World::World(Scenario scenario, std::uint64_t master_seed, WorldMode mode)
    : scenario_(std::move(scenario)), master_seed_(master_seed), mode_(mode) {
    if (mode_ == WorldMode::Prediction) {
        throw Error("prediction worlds are cloned from a live run, not constructed");
    }
    loop_enabled_ = mode_ == WorldMode::Main;
    updates_enabled_ = mode_ == WorldMode::Main;
    silent_ = false;

    propagation_ = RngStream::derive(master_seed_,
                                     mode_ == WorldMode::Shadow ? "shadow/propagation"
                                                                : "propagation");
    detection_ = RngStream::derive(master_seed_, "detection");
    deployment_stream_ = RngStream::derive(master_seed_, "deployment");

    // The variant assignment always comes from the main run's propagation
    // stream, so a shadow world is a true clone of the fleet it mirrors
    // while its own contact draws stay independent.
    if (mode_ == WorldMode::Shadow) {
        RngStream assignment_stream = RngStream::derive(master_seed_, "propagation");
        fleet_ = Fleet::build(scenario_.fleet.n, scenario_.fleet.variants,
                              scenario_.fleet.assignment, &assignment_stream);
    } else {
        fleet_ = Fleet::build(scenario_.fleet.n, scenario_.fleet.variants,
                              scenario_.fleet.assignment, &propagation_);
    }
    infection_.resize(static_cast<std::size_t>(fleet_.size()));
    vehicle_epoch_.assign(static_cast<std::size_t>(fleet_.size()), 0);
    threat_rt_.resize(scenario_.threats.size());
    run_horizon_ = scenario_.run.horizon;

    // Signature-known threats are in the central intelligence store from the
    // start; that is what enables both pre-event blocking and the
    // understanding speedup on their first incident.
    for (const ThreatSpec& spec : scenario_.threats) {
        if (spec.threat.signature_known) {
            KnowledgeEntry prior;
            prior.recorded_at = 0.0;
            prior.kappa = scenario_.understanding.kappa;
            kb_.append(spec.threat.id, std::move(prior));
        }
    }

    push_event(0.0, EventKind::Sample, -1, -1, 0);
    push_event(run_horizon_, EventKind::EndOfHorizon);
    if (updates_enabled_ && scenario_.updates.period > 0.0) {
        push_event(scenario_.updates.period, EventKind::ProactiveUpdate, -1, -1, 1);
    }
    for (std::size_t i = 0; i < scenario_.threats.size(); ++i) {
        const ThreatSpec& spec = scenario_.threats[i];
        std::vector<int> targets = spec.seeding.targets;
        if (targets.empty()) {
            for (int id = 0; id < fleet_.size() && static_cast<int>(targets.size()) < spec.seeding.count;
                 ++id) {
                if (spec.threat.susceptible(fleet_.at(id).variant)) {
                    targets.push_back(id);
                }
            }
            if (static_cast<int>(targets.size()) < spec.seeding.count) {
                throw BadConfigError("threat " + spec.threat.id + ": seeding count exceeds the susceptible population");
            }
        }
        seed_infection(static_cast<int>(i), std::move(targets), spec.seeding.at);
    }
}

void World::push_event(double at, EventKind kind, int threat, int vehicle, int arg, int incident,
                       int epoch) {
    SimEvent ev;
    ev.at = at;
    ev.seq = seq_counter_++;
    ev.kind = kind;
    ev.threat = threat;
    ev.vehicle = vehicle;
    ev.arg = arg;
    ev.incident = incident;
    ev.epoch = epoch;
    if (ev.at < clock_.now()) {
        throw PastEventError("event scheduled in the past");
    }
    queue_.push(ev);
}

void World::schedule(SimEvent ev) {
    if (ev.at < clock_.now()) {
        throw PastEventError("event scheduled in the past");
    }
    seq_counter_ = std::max(seq_counter_, ev.seq + 1);
    queue_.push(ev);
}

const PerformanceTrace& World::run_until(double horizon) {
    if (!(horizon > 0.0)) {
        throw Error("run horizon must be positive");
    }
    while (!queue_.empty() && queue_.top().at <= horizon) {
        const SimEvent ev = queue_.pop();
        clock_.advance_to(ev.at);
        dispatch(ev);
    }
    clock_.advance_to(horizon);
    trace_.record(horizon, fleet_.performance());
    return trace_;
}

void World::dispatch(const SimEvent& ev) {
    switch (ev.kind) {
    case EventKind::Infection:
        if (ev.arg == kSeedWave) {
            handle_seed_wave(ev);
        } else if (ev.arg == kContact) {
            handle_contact(ev);
        } else {
            handle_stage_advance(ev);
        }
        break;
    case EventKind::DetectionCheck:
        handle_detection(ev);
        break;
    case EventKind::UnderstandingDone:
        handle_understanding(ev);
        break;
    case EventKind::DeployBatch:
        handle_deploy_batch(ev);
        break;
    case EventKind::WithdrawCheck:
        handle_withdraw_check(ev);
        break;
    case EventKind::ProactiveUpdate:
        handle_update(ev);
        break;
    case EventKind::Sample: {
        record_sample();
        const double next = static_cast<double>(ev.arg + 1) * scenario_.run.dt;
        if (next <= run_horizon_) {
            push_event(next, EventKind::Sample, -1, -1, ev.arg + 1);
        }
        break;
    }
    case EventKind::AttackerAdapted:
        handle_attacker_adapted(ev);
        break;
    case EventKind::EndOfHorizon:
        record_sample();
        break;
    }
}

void World::record_sample() {
    trace_.record(clock_.now(), fleet_.performance());
}

void World::note_event(const SimEvent& ev, std::string note, int vehicle, int generation) {
    if (silent_) {
        return;
    }
    EventRecord rec;
    rec.at = clock_.now();
    rec.kind = ev.kind;
    rec.note = std::move(note);
    rec.threat = ev.threat;
    rec.vehicle = vehicle >= 0 ? vehicle : ev.vehicle;
    rec.generation = generation;
    event_record_.push_back(std::move(rec));
}

void World::log_decision(double at, Actor actor, std::string action, Payload payload) {
    if (silent_) {
        return;
    }
    log_.append(at, actor, std::move(action), std::move(payload));
}

void World::set_vehicle_state(int id, HealthState state, int threat, int stage, double perf) {
    fleet_.set_vehicle_state(id, state, threat, stage, perf);
    record_sample();
}

const ThreatRuntime& World::threat_runtime(int threat_index) const {
    return threat_rt_.at(static_cast<std::size_t>(threat_index));
}

std::int64_t World::treated_total() const {
    std::int64_t total = 0;
    for (const Deployment& d : deployments_) {
        total += d.treated;
    }
    return total;
}

double World::deployment_active_time() const {
    double total = 0.0;
    for (const Deployment& d : deployments_) {
        if (!d.started) {
            continue;
        }
        double end = run_horizon_;
        if (d.complete) {
            end = d.complete_at;
        } else if (d.withdrawn) {
            end = d.withdrawn_at;
        }
        total += std::max(0.0, end - d.start);
    }
    return total;
}

double World::propagation_time(int threat_index) const {
    const auto idx = static_cast<std::size_t>(threat_index);
    const ThreatRuntime& rt = threat_rt_.at(idx);
    const Threat& threat = scenario_.threats[idx].threat;
    if (rt.hosts_ever == 0) {
        return 0.0;
    }
    int susceptible_pool = 0;
    for (const Vehicle& v : fleet_.vehicles()) {
        if (threat.susceptible(v.variant)) {
            ++susceptible_pool;
        }
    }
    bool pending_seed = false;
    for (const SimEvent& ev : queue_.pending()) {
        if (ev.kind == EventKind::Infection && ev.arg == kSeedWave && ev.threat == threat_index) {
            pending_seed = true;
            break;
        }
    }
    const bool can_still_grow =
        pending_seed ||
        (threat.beta > 0.0 && rt.infected_now > 0 && rt.hosts_ever < susceptible_pool);
    if (can_still_grow) {
        return kInfiniteTime;
    }
    return rt.last_infection_at - rt.first_seed_at;
}

} // namespace cyres
