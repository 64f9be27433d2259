#include "cyres/rng.hpp"
#include "cyres/simulate.hpp"
#include "cyres/world.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace cyres;
using namespace cyres::testutil;

TEST_CASE("seeding a non-susceptible variant is rejected") {
    Scenario s = base_scenario(4, 2, 10.0);
    s.threats.push_back(simple_threat("worm", {0}, 0.0, {{0.0, 0.5}}, {1}, 0.0)); // vehicle 1 has variant 1
    CHECK_THROWS_AS(World(s, 1, WorldMode::Main), NotSusceptibleError);
}

TEST_CASE("stage zero applies at the seeding instant") {
    Scenario s = base_scenario(1, 1, 5.0);
    s.threats.push_back(simple_threat("worm", {0}, 0.0, {{0.0, 0.5}}, {0}, 1.5));
    World world(s, 1, WorldMode::Main);
    world.run_until(5.0);
    CHECK(world.trace().value_at(1.4) == 1.0);
    CHECK(world.trace().value_at(1.5) == 0.5);
    CHECK(world.fleet().at(0).state == HealthState::Infected);
    CHECK(world.fleet().at(0).stage == 0);
}

TEST_CASE("staged degradation steps the fleet mean down, hand-computed") {
    // 1 of 4 seeded, profile (0, 0.6), (2, 0.2): P = 1 -> 0.9 -> 0.8.
    Scenario s = base_scenario(4, 1, 10.0);
    s.threats.push_back(simple_threat("worm", {0}, 0.0, {{0.0, 0.6}, {2.0, 0.2}}, {2}, 1.0));
    World world(s, 1, WorldMode::Main);
    const PerformanceTrace& trace = world.run_until(10.0);
    CHECK(trace.value_at(0.5) == 1.0);
    CHECK(trace.value_at(1.0) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(trace.value_at(2.9) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(trace.value_at(3.0) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(trace.value_at(9.9) == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("beta zero never propagates") {
    Scenario s = base_scenario(10, 1, 30.0);
    s.threats.push_back(simple_threat("worm", {0}, 0.0, {{0.0, 0.5}}, {4}, 0.0));
    World world(s, 77, WorldMode::Main);
    world.run_until(30.0);
    int infections = 0;
    for (const EventRecord& rec : world.event_record()) {
        if (rec.note == "infection") {
            ++infections;
        }
    }
    CHECK(infections == 1);
    CHECK(world.infected_count() == 1);
}

TEST_CASE("variant gate holds for every seed") {
    Scenario s = base_scenario(8, 2, 15.0);
    s.threats.push_back(simple_threat("worm", {0}, 4.0, {{0.0, 0.3}}, {0}, 0.0));
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        World world(s, seed, WorldMode::Main);
        world.run_until(15.0);
        for (const Vehicle& v : world.fleet().vehicles()) {
            if (v.variant == 1) {
                CHECK(v.state == HealthState::Healthy);
            }
        }
        CHECK(world.peak_infected_fraction() <= 0.5);
    }
}

TEST_CASE("uniform mixing saturates a homogeneous fleet for every tested seed") {
    Scenario s = base_scenario(3, 1, 200.0, 0.5);
    s.threats.push_back(simple_threat("worm", {0}, 3.0, {{0.0, 0.5}}, {0}, 0.0));
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        World world(s, seed, WorldMode::Main);
        world.run_until(200.0);
        CHECK(world.infected_count() == 3);
        CHECK(world.propagation_time(0) < 200.0);
    }
}

TEST_CASE("unmitigated performance is non-increasing (stage monotonicity)") {
    Scenario s = base_scenario(6, 2, 25.0, 0.5);
    s.threats.push_back(
        simple_threat("worm", {0, 1}, 1.2, {{0.0, 0.8}, {1.5, 0.5}, {4.0, 0.1}}, {1}, 0.5));
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        World world(s, seed, WorldMode::Shadow);
        const PerformanceTrace& trace = world.run_until(25.0);
        for (std::size_t i = 1; i < trace.points().size(); ++i) {
            CHECK(trace.points()[i].p <= trace.points()[i - 1].p + 1e-15);
        }
    }
}

TEST_CASE("shadow propagation time: no spread means zero") {
    Scenario s = base_scenario(4, 1, 10.0);
    s.threats.push_back(simple_threat("worm", {0}, 0.0, {{0.0, 0.5}}, {0}, 2.0));
    CHECK(shadow_propagation_time(s, 11) == 0.0);
}

TEST_CASE("shadow propagation is bounded by the susceptible sub-population") {
    Scenario s = base_scenario(8, 4, 60.0, 0.5);
    s.threats.push_back(simple_threat("worm", {1}, 5.0, {{0.0, 0.5}}, {1}, 0.0));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        World world(s, seed, WorldMode::Shadow);
        world.run_until(60.0);
        CHECK(world.peak_infected_fraction() <= 0.25);
        const double t_prop = world.propagation_time(0);
        if (std::isfinite(t_prop)) {
            CHECK(world.threat_runtime(0).hosts_ever == 2); // both variant-1 vehicles
        }
    }
}

TEST_CASE("shadow propagation time equals an independently stepped contact process") {
    Scenario s = base_scenario(3, 1, 500.0, 1.0);
    const double beta = 0.7;
    s.threats.push_back(simple_threat("worm", {0}, beta, {{0.0, 0.5}}, {0}, 0.0));
    const std::uint64_t seed = 97;

    // Independent replay of the documented draw discipline: per contact
    // event, one uniform target draw then one exponential re-arm draw; new
    // infections draw their first contact time at the infection instant.
    RngStream stream = RngStream::derive(seed, "shadow/propagation");
    std::vector<bool> infected{true, false, false};
    struct Pending {
        double at;
        std::uint64_t seq;
        int source;
    };
    std::vector<Pending> pending{{stream.exponential(beta), 0, 0}};
    std::uint64_t seq = 1;
    int count = 1;
    double saturated_at = 0.0;
    while (count < 3) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < pending.size(); ++i) {
            if (pending[i].at < pending[best].at ||
                (pending[i].at == pending[best].at && pending[i].seq < pending[best].seq)) {
                best = i;
            }
        }
        const Pending ev = pending[best];
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best));
        const int target = static_cast<int>(stream.uniform_below(3));
        if (target != ev.source && !infected[static_cast<std::size_t>(target)]) {
            infected[static_cast<std::size_t>(target)] = true;
            ++count;
            saturated_at = ev.at;
            pending.push_back({ev.at + stream.exponential(beta), seq++, target});
        }
        pending.push_back({ev.at + stream.exponential(beta), seq++, ev.source});
    }

    CHECK(shadow_propagation_time(s, seed) == saturated_at);
}

TEST_CASE("shadow worlds mirror the main run's seeded_random variant assignment") {
    Scenario s = base_scenario(9, 4, 10.0);
    s.fleet.assignment = VariantAssignment::SeededRandom;
    for (std::uint64_t seed : {3ull, 11ull, 42ull}) {
        World main(s, seed, WorldMode::Main);
        World shadow(s, seed, WorldMode::Shadow);
        for (int id = 0; id < 9; ++id) {
            CHECK(main.fleet().at(id).variant == shadow.fleet().at(id).variant);
        }
    }
}

TEST_CASE("infinite adaptation delay permanently disables the threat after an update") {
    Scenario s = base_scenario(4, 1, 20.0);
    s.updates.period = 5.0;
    s.updates.adaptation_delay = kInfiniteTime;
    s.threats.push_back(simple_threat("worm", {0}, 0.0, {{0.0, 0.5}}, {0}, 2.0));
    s.threats.push_back(simple_threat("worm", {0}, 0.0, {{0.0, 0.5}}, {1}, 9.0));
    s.threats[0].threat.adaptation_delay = kInfiniteTime;
    s.threats[1].threat.adaptation_delay = kInfiniteTime;
    World world(s, 3, WorldMode::Main);
    world.run_until(20.0);

    // First update (t=5) clears the only infection; the re-seed at t=9 finds
    // generation-1 vehicles while the exploit still targets generation 0.
    CHECK(world.infected_count() == 0);
    CHECK(world.trace().value_at(20.0) == 1.0);
    bool refused = false;
    for (const EventRecord& rec : world.event_record()) {
        if (rec.note == "seed_refused_generation") {
            refused = true;
        }
        if (rec.note == "infection") {
            CHECK(rec.at < 5.0);
        }
    }
    CHECK(refused);
}

TEST_CASE("zero adaptation delay clears infections but spread resumes immediately") {
    Scenario s = base_scenario(4, 1, 20.0);
    s.updates.period = 5.0;
    s.updates.adaptation_delay = 0.0;
    s.threats.push_back(simple_threat("worm", {0}, 0.0, {{0.0, 0.5}}, {0}, 2.0));
    s.threats.push_back(simple_threat("worm", {0}, 0.0, {{0.0, 0.5}}, {1}, 9.0));
    s.threats[0].threat.adaptation_delay = 0.0;
    s.threats[1].threat.adaptation_delay = 0.0;
    World world(s, 3, WorldMode::Main);
    world.run_until(20.0);

    // Update at 5 clears vehicle 0; the attacker re-adapts instantly, so the
    // seeding at 9 lands on generation-1 vehicle 1 (cleared again at 10, 15, 20).
    bool reinfected = false;
    for (const EventRecord& rec : world.event_record()) {
        if (rec.note == "infection" && rec.at == 9.0) {
            reinfected = true;
            CHECK(rec.generation == 1);
        }
    }
    CHECK(reinfected);
}

TEST_CASE("adaptation window: no new infections between update and re-adaptation") {
    Scenario s = base_scenario(6, 1, 20.0);
    s.updates.period = 5.0;
    s.updates.adaptation_delay = 3.0;
    int next_target = 0;
    for (double at : {2.0, 6.5, 8.5}) {
        s.threats.push_back(simple_threat("worm", {0}, 0.0, {{0.0, 0.5}}, {next_target++}, at));
    }
    for (ThreatSpec& spec : s.threats) {
        spec.threat.adaptation_delay = 3.0;
    }
    World world(s, 3, WorldMode::Main);
    world.run_until(20.0);

    bool landed_after_window = false;
    for (const EventRecord& rec : world.event_record()) {
        if (rec.note != "infection") {
            continue;
        }
        const bool in_window = rec.at > 5.0 && rec.at < 8.0;
        CHECK_FALSE(in_window);
        if (rec.generation >= 1) {
            CHECK(rec.at >= 8.0); // update at 5 + tau_a 3
            landed_after_window = true;
        }
    }
    CHECK(landed_after_window);
}
