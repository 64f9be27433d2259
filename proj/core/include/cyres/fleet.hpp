#pragma once

#include "cyres/rng.hpp"

#include <cstdint>
#include <vector>

namespace cyres {

enum class HealthState : std::uint8_t { Healthy, Infected, Contained, Patched };

const char* to_string(HealthState s);

enum class VariantAssignment : std::uint8_t { RoundRobin, SeededRandom };

/// One simulated vehicle. `variant` indexes the engineered software variant
/// in [0, V); `generation` counts applied proactive updates. For Infected,
/// Contained and Patched states `threat` holds the owning threat index and
/// `stage` the last applied degradation stage (-1 while none has landed).
struct Vehicle {
    int id = 0;
    int variant = 0;
    int generation = 0;
    HealthState state = HealthState::Healthy;
    int threat = -1;
    int stage = -1;
    double perf = 1.0;
};

/// Ordered vehicle population. Vehicle ids are dense 0..N-1.
class Fleet {
public:
    Fleet() = default;

    /// Builds n Healthy generation-0 vehicles over v variants.
    /// RoundRobin assigns variant (i mod v); SeededRandom shuffles a
    /// round-robin base assignment with `stream` so every variant is still
    /// used at least once whenever v <= n.
    static Fleet build(int n, int v, VariantAssignment assignment, RngStream* stream);

    int size() const { return static_cast<int>(vehicles_.size()); }
    int variant_count() const { return variant_count_; }

    const Vehicle& at(int id) const;
    Vehicle& at(int id);

    const std::vector<Vehicle>& vehicles() const { return vehicles_; }

    /// Mean per-vehicle performance, the mission performance metric.
    double performance() const;

    /// Number of vehicles currently in `state`.
    int count_in_state(HealthState state) const;

    /// Validates the state/perf pairing and applies it.
    /// Throws UnknownVehicleError or InconsistentPerfError.
    void set_vehicle_state(int id, HealthState state, int threat, int stage, double perf);

    /// Fleet-wide software generation change (proactive update).
    void set_generation(int generation);

private:
    std::vector<Vehicle> vehicles_;
    int variant_count_ = 0;
};

} // namespace cyres
