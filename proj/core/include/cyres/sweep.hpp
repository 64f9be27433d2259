#pragma once

#include "cyres/scenario.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cyres {

/// One parameter axis: a dotted path into the scenario JSON (array elements
/// by index, e.g. "candidates.0.level") and the raw value tokens to try.
struct SweepSpec {
    std::string parameter_path;
    std::vector<std::string> values;
    int runs_per_point = 1;
};

struct SweepRow {
    int point = 0;
    std::string value;
    int runs = 0;
    double loss_mean = 0.0;
    double loss_stddev = 0.0;
    double resilient_fraction = 0.0;
    double not_detected_fraction = 0.0;
    double not_understood_fraction = 0.0;
    double fix_too_late_fraction = 0.0;
    double no_event_fraction = 0.0;
    double peak_infected_fraction_max = 0.0;
};

struct SweepTable {
    std::vector<SweepRow> rows;
};

/// Per-(point, run) seed: a documented mix of the master seed with the point
/// and run indices, so any cell can be reproduced in isolation.
std::uint64_t sweep_run_seed(std::uint64_t master_seed, std::size_t point, std::size_t run);

/// Applies spec.values[i] at spec.parameter_path, re-validates the scenario
/// and executes runs_per_point runs per point. Rows are ordered by point
/// index regardless of execution order.
SweepTable run_sweep(const Scenario& base, const SweepSpec& spec, std::uint64_t master_seed);

std::string sweep_to_csv(const SweepTable& table);

} // namespace cyres
