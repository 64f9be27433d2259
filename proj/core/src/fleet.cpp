#include "cyres/fleet.hpp"

#include "cyres/errors.hpp"

#include <string>
#include <utility>

namespace cyres {

const char* to_string(HealthState s) {
    switch (s) {
    case HealthState::Healthy: return "Healthy";
    case HealthState::Infected: return "Infected";
    case HealthState::Contained: return "Contained";
    case HealthState::Patched: return "Patched";
    }
    return "?";
}

Fleet Fleet::build(int n, int v, VariantAssignment assignment, RngStream* stream) {
    if (n < 1) {
        throw BadConfigError("fleet size must be >= 1");
    }
    if (v < 1 || v > n) {
        throw BadConfigError("variant count must be in [1, n], got " + std::to_string(v) +
                             " for n=" + std::to_string(n));
    }
    Fleet fleet;
    fleet.variant_count_ = v;
    fleet.vehicles_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        fleet.vehicles_[i].id = i;
        fleet.vehicles_[i].variant = i % v;
    }
    if (assignment == VariantAssignment::SeededRandom) {
        if (stream == nullptr) {
            throw BadConfigError("seeded_random assignment requires a random stream");
        }
        // Fisher-Yates over the round-robin base keeps every variant present.
        for (int i = n - 1; i > 0; --i) {
            const auto j = static_cast<int>(stream->uniform_below(static_cast<std::uint64_t>(i) + 1));
            std::swap(fleet.vehicles_[i].variant, fleet.vehicles_[j].variant);
        }
    }
    return fleet;
}

const Vehicle& Fleet::at(int id) const {
    if (id < 0 || id >= size()) {
        throw UnknownVehicleError("vehicle id " + std::to_string(id) + " out of range");
    }
    return vehicles_[static_cast<std::size_t>(id)];
}

Vehicle& Fleet::at(int id) {
    if (id < 0 || id >= size()) {
        throw UnknownVehicleError("vehicle id " + std::to_string(id) + " out of range");
    }
    return vehicles_[static_cast<std::size_t>(id)];
}

double Fleet::performance() const {
    double sum = 0.0;
    for (const Vehicle& v : vehicles_) {
        sum += v.perf;
    }
    return sum / static_cast<double>(vehicles_.size());
}

void Fleet::set_generation(int generation) {
    for (Vehicle& v : vehicles_) {
        v.generation = generation;
    }
}

int Fleet::count_in_state(HealthState state) const {
    int count = 0;
    for (const Vehicle& v : vehicles_) {
        if (v.state == state) {
            ++count;
        }
    }
    return count;
}

void Fleet::set_vehicle_state(int id, HealthState state, int threat, int stage, double perf) {
    Vehicle& v = at(id);
    if (perf < 0.0 || perf > 1.0) {
        throw InconsistentPerfError("perf must lie in [0, 1]");
    }
    const bool full_perf_state = state == HealthState::Healthy || state == HealthState::Patched;
    if (full_perf_state && perf != 1.0) {
        throw InconsistentPerfError(std::string(to_string(state)) + " vehicle must have perf 1.0");
    }
    v.state = state;
    if (state == HealthState::Healthy) {
        v.threat = -1;
        v.stage = -1;
    } else {
        v.threat = threat;
        if (state == HealthState::Infected) {
            v.stage = stage;
        }
    }
    v.perf = perf;
}

} // namespace cyres
