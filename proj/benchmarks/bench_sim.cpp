#include "cyres/engine.hpp"
#include "cyres/simulate.hpp"

#include <benchmark/benchmark.h>

using namespace cyres;

namespace {

Scenario spreading_scenario(int n) {
    Scenario s;
    s.fleet.n = n;
    s.fleet.variants = 4;
    s.run.horizon = 30.0;
    s.run.dt = 0.1;
    s.monitors.anomaly_rate = 0.5;
    s.monitors.pre_event_probability = 0.0;
    s.understanding.base_delay = 1.0;
    s.thresholds.p_acceptable = 0.95;
    s.thresholds.p_min = 0.4;

    ThreatSpec threat;
    threat.threat.id = "bench-worm";
    threat.threat.susceptible_variants = {0, 1};
    threat.threat.beta = 1.5;
    threat.threat.stages = {{0.0, 0.6}, {2.0, 0.2}};
    threat.seeding.count = 2;
    s.threats.push_back(threat);

    ResponseCandidate contain;
    contain.id = "contain";
    contain.kind = CandidateKind::Contain;
    contain.containment_level = 0.7;
    contain.deploy_rate = 4.0;
    s.candidates.push_back(contain);

    ResponseCandidate patch;
    patch.id = "patch";
    patch.kind = CandidateKind::FullPatch;
    patch.deploy_rate = 2.0;
    patch.prep_delay = 3.0;
    s.candidates.push_back(patch);
    return s;
}

void BM_EventQueue(benchmark::State& state) {
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        EventQueue q;
        for (std::uint64_t i = 0; i < n; ++i) {
            SimEvent ev;
            ev.at = static_cast<double>((i * 2654435761u) % n);
            ev.seq = i;
            q.push(ev);
        }
        double last = -1.0;
        while (!q.empty()) {
            last = q.pop().at;
        }
        benchmark::DoNotOptimize(last);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(n));
}
BENCHMARK(BM_EventQueue)->Arg(1000)->Arg(10000);

void BM_FullRun(benchmark::State& state) {
    const Scenario scenario = spreading_scenario(static_cast<int>(state.range(0)));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_simulation(scenario, seed++));
    }
}
BENCHMARK(BM_FullRun)->Arg(20)->Arg(100);

void BM_ShadowRun(benchmark::State& state) {
    Scenario scenario = spreading_scenario(static_cast<int>(state.range(0)));
    scenario.candidates.clear();
    std::uint64_t seed = 0;
    for (auto _ : state) {
        World shadow(scenario, seed++, WorldMode::Shadow);
        benchmark::DoNotOptimize(shadow.run_until(scenario.run.horizon));
    }
}
BENCHMARK(BM_ShadowRun)->Arg(100);

} // namespace

BENCHMARK_MAIN();
