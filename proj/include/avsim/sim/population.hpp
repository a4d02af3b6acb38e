#pragma once

#include <span>
#include <vector>

#include "avsim/env/tree.hpp"
#include "avsim/sim/agent.hpp"
#include "avsim/sim/scenario.hpp"

namespace avsim::sim {

// Largest-remainder apportionment of `total` over `fractions` (which must sum
// to ~1); remainder ties go to the lower index.
std::vector<int> apportion(int total, std::span<const double> fractions);

// Builds the agent roster: class/subclass mix, ages, household home leaves,
// work leaves, and immunity parameters. All draws are keyed on the scenario
// seed, so the roster is identical across runs and intervention variants.
std::vector<Agent> generate_population(const Scenario& scenario,
                                       const env::Environment& environment,
                                       const disease::ProgressionTable& table);

}  // namespace avsim::sim
