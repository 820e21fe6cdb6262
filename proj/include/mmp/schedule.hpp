#pragma once

#include <optional>
#include <vector>

#include "mmp/instance.hpp"
#include "mmp/types.hpp"

namespace mmp {

// Arrival times for a fixed visit sequence (origin, request nodes..., destination).
// Departure is back-propagated from the first request node's window opening and
// clamped into the depot window; whenever waiting appears downstream, all
// earlier arrivals shift forward by the smallest upper-window slack (or the
// full wait). The result is feasible and duration-minimal for the sequence, or
// nullopt when no feasible schedule exists.
std::optional<std::vector<double>> compute_arrival_times(const std::vector<int>& sequence,
                                                         const Instance& instance);

// Same scheduling rule over bare windows; travel[i] leads from stop i to i+1
// (service time included). Shared by the instance path and the generator's
// direct-service guarantee.
std::optional<std::vector<double>> schedule_windows(const std::vector<double>& tw_open,
                                                    const std::vector<double>& tw_close,
                                                    const std::vector<double>& travel);

struct LoadCheck {
  bool ok = true;
  int violation_visit = -1;  // position in the full sequence (0 = origin)
  int violation_type = -1;
  // Onboard load per type after serving each position, origin..destination.
  std::vector<TypeCount> loads;
};

// Running per-type loads along a platoon route against its module capacity.
LoadCheck propagate_loads(const Platoon& platoon, const Instance& instance);

// Full node sequence origin, visits..., destination.
std::vector<int> full_sequence(const Platoon& platoon);

double route_km(const Platoon& platoon, const Instance& instance);

inline double route_duration_min(const Platoon& platoon) {
  return platoon.arrival_times.empty()
             ? 0.0
             : platoon.arrival_times.back() - platoon.arrival_times.front();
}

// Minimal per-type module counts covering the route's peak loads.
TypeCount min_config_for_visits(const std::vector<int>& visits, const Instance& instance);

// Recompute arrival times in place; false (platoon untouched) when the
// sequence has no feasible schedule.
bool refresh_platoon(Platoon& platoon, const Instance& instance);

}  // namespace mmp
