#pragma once

#include <vector>

#include "mmp/instance.hpp"
#include "mmp/types.hpp"

namespace mmp {

// Validates a solution against every model constraint: request assignment and
// pairing, depot endpoints and reuse, stored schedule consistency, windows,
// range, capacity, fleet budgets, platoon size and count. Empty result means
// feasible.
std::vector<Violation> check_feasibility(const Solution& solution, const Instance& instance);

}  // namespace mmp
