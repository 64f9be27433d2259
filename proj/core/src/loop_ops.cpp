#include "cyres/format.hpp"
#include "cyres/world.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cyres {

const char* to_string(CandidateKind k) {
    switch (k) {
    case CandidateKind::Contain: return "contain";
    case CandidateKind::PartialPatch: return "partial_patch";
    case CandidateKind::FullPatch: return "full_patch";
    }
    return "?";
}

namespace {

std::string join_ids(const std::vector<int>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += std::to_string(ids[i]);
    }
    return out;
}

} // namespace

double World::sample_understanding(const Threat& threat, const KnowledgeBase& kb,
                                   double base_delay) {
    if (const KnowledgeEntry* entry = kb.latest(threat.id)) {
        return base_delay * entry->kappa;
    }
    return base_delay;
}

void World::handle_detection(const SimEvent& ev) {
    Incident& incident = incidents_.at(static_cast<std::size_t>(ev.incident));
    const Threat& threat = scenario_.threats[static_cast<std::size_t>(ev.threat)].threat;
    if (incident.blocked || incident.detected) {
        return;
    }
    incident.detected = true;
    incident.timeline.t_detect = clock_.now();
    log_decision(clock_.now(), Actor::Monitor, "detect",
                 {{"threat", threat.id},
                  {"incident", std::int64_t(incident.index)},
                  {"at", format_fixed6(clock_.now())}});

    // The incident's base understanding delay comes from a stream derived per
    // signature, so a repeat of the same signature replays the same draw and
    // the knowledge-base speedup becomes exactly measurable.
    double base = 0.0;
    if (scenario_.understanding.base_delay > 0.0) {
        RngStream stream = RngStream::derive(master_seed_, "understanding/" + threat.id);
        base = stream.exponential(1.0 / scenario_.understanding.base_delay);
    }
    const double latency = sample_understanding(threat, kb_, base);
    incident.understanding_base_delay = base;
    incident.understanding_latency = latency;
    push_event(clock_.now() + latency, EventKind::UnderstandingDone, ev.threat, -1, -1,
               incident.index);
}

double World::plan_horizon_or_default() const {
    if (scenario_.understanding.plan_horizon) {
        return *scenario_.understanding.plan_horizon;
    }
    const double remaining = run_horizon_ - clock_.now();
    return remaining > scenario_.run.dt ? remaining : scenario_.run.dt;
}

World World::clone_for_prediction(int /*incident_index*/, const std::string& fork_label) const {
    World clone(*this);
    clone.mode_ = WorldMode::Prediction;
    clone.loop_enabled_ = false;
    clone.silent_ = true;
    clone.queue_.filter([](const SimEvent& ev) {
        switch (ev.kind) {
        case EventKind::Infection:
        case EventKind::ProactiveUpdate:
        case EventKind::AttackerAdapted:
            return true;
        default:
            return false;
        }
    });
    clone.deployments_.clear();
    clone.trace_ = PerformanceTrace{};
    clone.trace_.record(clock_.now(), fleet_.performance());
    clone.event_record_.clear();
    clone.log_ = DecisionLog{};
    clone.propagation_ = RngStream::derive(master_seed_, fork_label);
    return clone;
}

PlanResult World::plan_response(int incident_index, const std::vector<int>& candidate_indices,
                                double horizon) const {
    if (candidate_indices.empty()) {
        throw NoCandidatesError("no response candidates to plan with");
    }
    const Incident& incident = incidents_.at(static_cast<std::size_t>(incident_index));
    const double window_start = clock_.now();
    const double window_end = window_start + horizon;

    struct Scored {
        int index;
        double score;
        PerformanceTrace trace;
    };
    std::vector<Scored> scored;
    scored.reserve(candidate_indices.size());
    for (int idx : candidate_indices) {
        const ResponseCandidate& cand = scenario_.candidates.at(static_cast<std::size_t>(idx));
        const std::string label = "plan/" + std::to_string(incident_index) + "/" +
                                  std::to_string(incident.withdrawals) + "/" + cand.id;
        World clone = clone_for_prediction(incident_index, label);
        clone.create_deployment(incident_index, idx, window_start + cand.prep_delay,
                                cand.kind == CandidateKind::FullPatch);
        clone.run_until(window_end);
        const double score =
            window_end > window_start
                ? resilience_integral(clone.trace_, window_start, window_end).normalized
                : 1.0;
        scored.push_back({idx, score, std::move(clone.trace_)});
    }

    std::stable_sort(scored.begin(), scored.end(), [this](const Scored& a, const Scored& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        const ResponseCandidate& ca = scenario_.candidates[static_cast<std::size_t>(a.index)];
        const ResponseCandidate& cb = scenario_.candidates[static_cast<std::size_t>(b.index)];
        if (ca.prep_delay != cb.prep_delay) {
            return ca.prep_delay < cb.prep_delay;
        }
        return ca.id < cb.id;
    });

    PlanResult result;
    result.window_start = window_start;
    result.window_end = window_end;
    for (const Scored& s : scored) {
        result.ranking.push_back(s.index);
        result.scores.push_back(s.score);
    }
    result.chosen = scored.front().index;
    result.predicted = std::move(scored.front().trace);
    return result;
}

void World::handle_understanding(const SimEvent& ev) {
    Incident& incident = incidents_.at(static_cast<std::size_t>(ev.incident));
    const Threat& threat = scenario_.threats[static_cast<std::size_t>(ev.threat)].threat;
    incident.understood = true;
    incident.timeline.t_understand = clock_.now();
    log_decision(clock_.now(), Actor::Diagnostics, "understand",
                 {{"threat", threat.id},
                  {"incident", std::int64_t(incident.index)},
                  {"kb_hit", std::int64_t(kb_.known(threat.id) ? 1 : 0)},
                  {"at", format_fixed6(clock_.now())}});

    std::vector<int> allowed;
    const std::vector<std::string> failed = kb_.failed_candidates(threat.id);
    for (std::size_t i = 0; i < scenario_.candidates.size(); ++i) {
        const std::string& id = scenario_.candidates[i].id;
        if (std::find(failed.begin(), failed.end(), id) == failed.end()) {
            allowed.push_back(static_cast<int>(i));
        }
    }
    if (allowed.empty()) {
        log_decision(clock_.now(), Actor::Diagnostics, "plan_no_candidates",
                     {{"incident", std::int64_t(incident.index)}});
        return;
    }

    const double horizon = plan_horizon_or_default();
    PlanResult plan = plan_response(incident.index, allowed, horizon);
    incident.ranking = plan.ranking;
    incident.chosen = plan.chosen;
    incident.tried.push_back(plan.chosen);
    incident.prediction = std::move(plan.predicted);
    incident.prediction_start = plan.window_start;
    incident.prediction_end = plan.window_end;

    const ResponseCandidate& chosen = scenario_.candidates[static_cast<std::size_t>(plan.chosen)];
    Payload plan_payload{{"incident", std::int64_t(incident.index)},
                         {"chosen", chosen.id},
                         {"score", format_fixed6(plan.scores.front())},
                         {"window", format_fixed6(horizon)}};
    if (!chosen.urgency.empty()) {
        plan_payload.emplace("urgency", chosen.urgency);
    }
    log_decision(clock_.now(), Actor::Diagnostics, "plan", std::move(plan_payload));

    const double start = clock_.now() + chosen.prep_delay;
    incident.monitored_deployment = create_deployment(
        incident.index, plan.chosen, start, chosen.kind == CandidateKind::FullPatch);
    push_event(start + scenario_.run.dt, EventKind::WithdrawCheck, incident.threat, -1,
               incident.monitored_deployment, incident.index);

    // A partial response buys time while the permanent fix is developed;
    // pipeline the best full patch behind the chosen containment.
    if (chosen.kind != CandidateKind::FullPatch) {
        for (int idx : plan.ranking) {
            const ResponseCandidate& cand = scenario_.candidates[static_cast<std::size_t>(idx)];
            if (cand.kind == CandidateKind::FullPatch) {
                incident.full_deployment = create_deployment(
                    incident.index, idx, clock_.now() + cand.prep_delay, true);
                break;
            }
        }
    }
}

int World::create_deployment(int incident_index, int candidate_index, double start,
                             bool full_phase) {
    const ResponseCandidate& cand =
        scenario_.candidates.at(static_cast<std::size_t>(candidate_index));
    Deployment d;
    d.id = static_cast<int>(deployments_.size());
    d.incident = incident_index;
    d.candidate = candidate_index;
    d.treats_contained = full_phase;
    d.start = start;
    deployments_.push_back(std::move(d));
    const int id = deployments_.back().id;
    const Incident& incident = incidents_.at(static_cast<std::size_t>(incident_index));
    log_decision(clock_.now(), Actor::Deployer, "deploy_scheduled",
                 {{"incident", std::int64_t(incident.index)},
                  {"candidate", cand.id},
                  {"phase", std::string(full_phase ? "full" : "primary")},
                  {"start", format_fixed6(start)}});
    push_event(start, EventKind::DeployBatch, incident.threat, -1, id, incident_index);
    return id;
}

void World::treat_vehicle(Deployment& d, int vehicle) {
    const ResponseCandidate& cand = scenario_.candidates[static_cast<std::size_t>(d.candidate)];
    const Vehicle& v = fleet_.at(vehicle);
    const int threat_index = incidents_[static_cast<std::size_t>(d.incident)].threat;

    VehicleSnapshot snap;
    snap.state = v.state;
    snap.stage = v.stage;
    snap.perf = v.perf;
    if (infection_[static_cast<std::size_t>(vehicle)]) {
        snap.record = *infection_[static_cast<std::size_t>(vehicle)];
    }
    d.snapshots[vehicle] = snap;

    if (v.state == HealthState::Infected) {
        ThreatRuntime& rt = threat_rt_[static_cast<std::size_t>(v.threat)];
        --rt.infected_now;
        --infected_count_;
    }
    infection_[static_cast<std::size_t>(vehicle)].reset();
    ++vehicle_epoch_[static_cast<std::size_t>(vehicle)];

    if (cand.kind == CandidateKind::FullPatch) {
        set_vehicle_state(vehicle, HealthState::Patched, threat_index, -1, 1.0);
    } else {
        const double level =
            mode_ == WorldMode::Prediction ? cand.containment_level : cand.applied_level();
        set_vehicle_state(vehicle, HealthState::Contained, threat_index, -1, level);
    }
    ++d.treated;
}

void World::handle_deploy_batch(const SimEvent& ev) {
    Deployment& d = deployments_.at(static_cast<std::size_t>(ev.arg));
    if (!d.active) {
        return;
    }
    Incident& incident = incidents_.at(static_cast<std::size_t>(d.incident));
    const ResponseCandidate& cand = scenario_.candidates[static_cast<std::size_t>(d.candidate)];

    if (!d.started) {
        d.started = true;
        if (!incident.timeline.t_deploy_start) {
            incident.timeline.t_deploy_start = clock_.now();
        }
    } else {
        // Constant per-batch accrual; batch times come from start + k * dt,
        // so the treat spacing is independent of the start time's mantissa.
        d.credit += cand.deploy_rate * scenario_.run.dt;
    }
    auto quota = static_cast<std::int64_t>(std::floor(d.credit));
    d.credit -= static_cast<double>(quota);

    std::vector<int> treated_ids;
    const int threat_index = incident.threat;
    for (const Vehicle& v : fleet_.vehicles()) {
        if (quota <= 0) {
            break;
        }
        const bool infected_target = v.state == HealthState::Infected && v.threat == threat_index;
        const bool contained_target =
            d.treats_contained && v.state == HealthState::Contained && v.threat == threat_index;
        if (infected_target || contained_target) {
            treated_ids.push_back(v.id);
            --quota;
        }
    }
    for (int id : treated_ids) {
        treat_vehicle(d, id);
    }
    if (!treated_ids.empty()) {
        log_decision(clock_.now(), Actor::Deployer, "deploy_batch",
                     {{"incident", std::int64_t(incident.index)},
                      {"candidate", cand.id},
                      {"vehicles", join_ids(treated_ids)},
                      {"count", std::int64_t(treated_ids.size())}});
    }

    bool remaining = false;
    for (const Vehicle& v : fleet_.vehicles()) {
        if (v.threat != threat_index) {
            continue;
        }
        if (v.state == HealthState::Infected ||
            (d.treats_contained && v.state == HealthState::Contained)) {
            remaining = true;
            break;
        }
    }
    if (!remaining) {
        d.complete = true;
        d.complete_at = clock_.now();
        d.active = false;
        if (d.treats_contained) {
            if (!incident.timeline.t_deploy_full_complete) {
                incident.timeline.t_deploy_full_complete = clock_.now();
            }
            // Nothing is left for the incident's other rollouts either; a
            // slower partial must not record a completion after the full fix.
            for (Deployment& other : deployments_) {
                if (other.incident == d.incident && other.id != d.id && other.active) {
                    other.complete = true;
                    other.complete_at = clock_.now();
                    other.active = false;
                    if (!other.treats_contained &&
                        !incident.timeline.t_deploy_partial_complete) {
                        incident.timeline.t_deploy_partial_complete = clock_.now();
                    }
                }
            }
        } else if (!incident.timeline.t_deploy_partial_complete) {
            incident.timeline.t_deploy_partial_complete = clock_.now();
        }
        if (d.id == incident.monitored_deployment && !incident.kb_recorded) {
            incident.kb_recorded = true;
            KnowledgeEntry entry;
            entry.recorded_at = clock_.now();
            entry.best_candidate = cand.id;
            entry.efficacy = fleet_.performance();
            entry.kappa = scenario_.understanding.kappa;
            const std::string& signature =
                scenario_.threats[static_cast<std::size_t>(threat_index)].threat.id;
            kb_.append(signature, entry);
            log_decision(clock_.now(), Actor::Diagnostics, "kb_record",
                         {{"signature", signature},
                          {"candidate", cand.id},
                          {"efficacy", format_fixed6(entry.efficacy)}});
        }
        return;
    }
    ++d.batches;
    push_event(d.start + static_cast<double>(d.batches) * scenario_.run.dt,
               EventKind::DeployBatch, ev.threat, -1, d.id, d.incident);
}

void World::handle_withdraw_check(const SimEvent& ev) {
    Deployment& d = deployments_.at(static_cast<std::size_t>(ev.arg));
    Incident& incident = incidents_.at(static_cast<std::size_t>(d.incident));
    if (d.withdrawn || incident.monitored_deployment != d.id) {
        return;
    }
    if (clock_.now() > incident.prediction_end) {
        return; // prediction window exhausted; the response is kept
    }
    const double actual = fleet_.performance();
    const double predicted = incident.prediction.value_at(clock_.now());
    const bool breach = actual < predicted - scenario_.monitors.withdraw_epsilon;
    if (!breach) {
        incident.breach_start.reset();
    } else {
        if (!incident.breach_start) {
            incident.breach_start = clock_.now();
        }
        if (clock_.now() - *incident.breach_start + 1e-9 >= scenario_.monitors.withdraw_dwell) {
            perform_withdrawal(incident, d);
            return;
        }
    }
    push_event(clock_.now() + scenario_.run.dt, EventKind::WithdrawCheck, ev.threat, -1, d.id,
               d.incident);
}

void World::perform_withdrawal(Incident& incident, Deployment& d) {
    const ResponseCandidate& cand = scenario_.candidates[static_cast<std::size_t>(d.candidate)];
    const Threat& threat = scenario_.threats[static_cast<std::size_t>(incident.threat)].threat;

    std::vector<int> reverted;
    for (const auto& [vehicle, snap] : d.snapshots) {
        const Vehicle& v = fleet_.at(vehicle);
        const bool still_treated =
            (v.state == HealthState::Contained || v.state == HealthState::Patched) &&
            v.threat == incident.threat;
        if (!still_treated) {
            continue;
        }
        // Snapshot revert: exactly the state the vehicle was treated in.
        set_vehicle_state(vehicle, snap.state, incident.threat, snap.stage, snap.perf);
        reverted.push_back(vehicle);
        if (snap.state != HealthState::Infected) {
            continue;
        }
        infection_[static_cast<std::size_t>(vehicle)] = snap.record;
        const int epoch = ++vehicle_epoch_[static_cast<std::size_t>(vehicle)];
        ThreatRuntime& rt = threat_rt_[static_cast<std::size_t>(incident.threat)];
        ++rt.infected_now;
        ++infected_count_;
        peak_infected_fraction_ =
            std::max(peak_infected_fraction_,
                     static_cast<double>(infected_count_) / static_cast<double>(fleet_.size()));
        // Remaining stages resume on a frozen clock: the gap to each later
        // stage is preserved relative to the stage held at treatment time.
        const double applied_delay =
            snap.stage >= 0 ? threat.stages[static_cast<std::size_t>(snap.stage)].delay : 0.0;
        for (std::size_t k = snap.stage >= 0 ? static_cast<std::size_t>(snap.stage) + 1 : 0;
             k < threat.stages.size(); ++k) {
            push_event(clock_.now() + (threat.stages[k].delay - applied_delay),
                       EventKind::Infection, incident.threat, vehicle, static_cast<int>(k), -1,
                       epoch);
        }
        if (threat.beta > 0.0) {
            push_event(clock_.now() + propagation_.exponential(threat.beta), EventKind::Infection,
                       incident.threat, vehicle, kContact, -1, epoch);
        }
    }

    d.withdrawn = true;
    d.withdrawn_at = clock_.now();
    d.active = false;
    incident.breach_start.reset();
    ++incident.withdrawals;

    KnowledgeEntry entry;
    entry.recorded_at = clock_.now();
    entry.kappa = scenario_.understanding.kappa;
    entry.failed_candidate = cand.id;
    kb_.append(threat.id, entry);

    log_decision(clock_.now(), Actor::Deployer, "withdraw",
                 {{"incident", std::int64_t(incident.index)},
                  {"candidate", cand.id},
                  {"reverted", join_ids(reverted)}});

    deploy_next_best(incident);
}

void World::deploy_next_best(Incident& incident) {
    const Threat& threat = scenario_.threats[static_cast<std::size_t>(incident.threat)].threat;
    const std::vector<std::string> failed = kb_.failed_candidates(threat.id);
    for (int idx : incident.ranking) {
        const ResponseCandidate& cand = scenario_.candidates[static_cast<std::size_t>(idx)];
        if (std::find(failed.begin(), failed.end(), cand.id) != failed.end()) {
            continue;
        }
        if (std::find(incident.tried.begin(), incident.tried.end(), idx) !=
            incident.tried.end()) {
            continue;
        }
        if (incident.full_deployment >= 0 &&
            deployments_[static_cast<std::size_t>(incident.full_deployment)].candidate == idx) {
            continue; // already rolling out via the full-patch pipeline
        }
        incident.tried.push_back(idx);

        // Fresh prediction from the current state so withdrawal monitoring
        // compares the replacement against its own forecast.
        const double horizon = plan_horizon_or_default();
        PlanResult plan = plan_response(incident.index, {idx}, horizon);
        incident.prediction = std::move(plan.predicted);
        incident.prediction_start = plan.window_start;
        incident.prediction_end = plan.window_end;
        incident.chosen = idx;

        const double start = clock_.now() + cand.prep_delay;
        incident.monitored_deployment =
            create_deployment(incident.index, idx, start, cand.kind == CandidateKind::FullPatch);
        push_event(start + scenario_.run.dt, EventKind::WithdrawCheck, incident.threat, -1,
                   incident.monitored_deployment, incident.index);
        return;
    }
}

void World::handle_update(const SimEvent& ev) {
    const double period = scenario_.updates.period;
    const int generation = ev.arg;
    if (!scenario_.updates.trusted) {
        // Updates must come from a trusted source; refuse and keep evidence.
        log_decision(clock_.now(), Actor::Updater, "update_refused",
                     {{"generation", std::int64_t(generation)}, {"trusted", std::string("false")}});
        note_event(ev, "update_refused");
        if (period > 0.0) {
            push_event(clock_.now() + period, EventKind::ProactiveUpdate, -1, -1, generation + 1);
        }
        return;
    }
    const int infected_before = infected_count_;
    apply_generation_change(generation);
    log_decision(clock_.now(), Actor::Updater, "update",
                 {{"generation", std::int64_t(generation)},
                  {"cleared", std::int64_t(infected_before - infected_count_)},
                  {"trusted", std::string("true")}});
    note_event(ev, "update", -1, generation);
    if (period > 0.0) {
        push_event(clock_.now() + period, EventKind::ProactiveUpdate, -1, -1, generation + 1);
    }
}

} // namespace cyres
