#pragma once

#include "mmp/instance.hpp"
#include "mmp/types.hpp"

namespace mmp {

// Cost terms for one platoon (distance, fleet, duration; no unserved share).
CostBreakdown platoon_cost(const Platoon& platoon, const Instance& instance);

// Full objective: scaled route kilometres, module deployment, route durations
// and the penalty per unserved request. Uses the stored arrival times.
CostBreakdown evaluate(const Solution& solution, const Instance& instance);

// Deterministic preference between equal-objective solutions: lower total,
// then fewer platoons, then lexicographically smaller route description.
bool better_solution(const CostBreakdown& cost_a, const Solution& a,
                     const CostBreakdown& cost_b, const Solution& b);

// Modules deployed across all platoons, by type.
TypeCount fleet_used(const Solution& solution);

// Lowest virtual copy of the physical depot not yet used as an origin, -1
// when every copy is taken.
int free_virtual_origin(const Solution& solution, const Instance& instance, int depot);

}  // namespace mmp
