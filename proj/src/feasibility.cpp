#include "mmp/feasibility.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "mmp/schedule.hpp"

namespace mmp {

namespace {

std::string at_platoon(int index) { return "platoon " + std::to_string(index); }

}  // namespace

std::vector<Violation> check_feasibility(const Solution& solution, const Instance& instance) {
  std::vector<Violation> out;
  const ModelParams& params = instance.params();
  const int n_r = instance.num_requests();

  if (static_cast<int>(solution.platoons.size()) > params.max_platoons)
    out.push_back({ViolationKind::PlatoonCount, -1, -1,
                   std::to_string(solution.platoons.size()) + " platoons, limit " +
                       std::to_string(params.max_platoons)});

  std::vector<int> pickup_platoon(n_r, -1), dropoff_platoon(n_r, -1);
  std::vector<int> pickup_pos(n_r, -1), dropoff_pos(n_r, -1);
  std::unordered_set<int> origins_used;
  TypeCount fleet_used{0, 0};

  for (size_t pi = 0; pi < solution.platoons.size(); ++pi) {
    const Platoon& pl = solution.platoons[pi];
    const int index = static_cast<int>(pi);

    if (pl.visits.empty())
      out.push_back({ViolationKind::EmptyPlatoon, index, -1, at_platoon(index) + " serves nothing"});

    const int p = pl.config.total();
    if (p < 1 || p > params.max_modules_per_platoon)
      out.push_back({ViolationKind::PlatoonSize, index, -1,
                     "length " + std::to_string(p) + " outside [1, " +
                         std::to_string(params.max_modules_per_platoon) + "]"});
    for (int k = 0; k < kNumDemandTypes; ++k) {
      if (pl.config.modules_per_type[k] < 0)
        out.push_back({ViolationKind::PlatoonSize, index, -1, "negative module count"});
      else
        fleet_used[k] += pl.config.modules_per_type[k];
    }

    if (!instance.is_origin(pl.origin) || pl.destination != instance.paired_destination(pl.origin))
      out.push_back({ViolationKind::DepotEndpoints, index, pl.origin,
                     at_platoon(index) + " endpoints are not a virtual depot pair"});
    else if (!origins_used.insert(pl.origin).second)
      out.push_back({ViolationKind::DepotReuse, index, pl.origin,
                     "virtual origin " + std::to_string(pl.origin) + " used twice"});

    std::unordered_set<int> seen;
    for (size_t vi = 0; vi < pl.visits.size(); ++vi) {
      const int node = pl.visits[vi];
      const int request = instance.request_of(node);
      if (request < 0) {
        out.push_back({ViolationKind::NodeRole, index, node,
                       "node " + std::to_string(node) + " is not a request node"});
        continue;
      }
      if (!seen.insert(node).second) {
        out.push_back({ViolationKind::NodeRole, index, node,
                       "node " + std::to_string(node) + " visited twice"});
        continue;
      }
      if (instance.is_pickup(node)) {
        pickup_platoon[request] = index;
        pickup_pos[request] = static_cast<int>(vi);
      } else {
        dropoff_platoon[request] = index;
        dropoff_pos[request] = static_cast<int>(vi);
      }
    }

    // Stored schedule: shape, chain spacing, windows.
    const std::vector<int> seq = full_sequence(pl);
    if (pl.arrival_times.size() != seq.size()) {
      out.push_back({ViolationKind::ScheduleShape, index, -1,
                     "arrival vector size " + std::to_string(pl.arrival_times.size()) +
                         " for " + std::to_string(seq.size()) + " stops"});
    } else {
      for (size_t i = 0; i < seq.size(); ++i) {
        const Node& nd = instance.node(seq[i]);
        const double s = pl.arrival_times[i];
        if (s < nd.tw_open - kTimeTol || s > nd.tw_close + kTimeTol)
          out.push_back({ViolationKind::TimeWindow, index, seq[i],
                         "arrival " + std::to_string(s) + " outside [" +
                             std::to_string(nd.tw_open) + ", " + std::to_string(nd.tw_close) +
                             "]"});
        if (i + 1 < seq.size()) {
          const double gap = pl.arrival_times[i + 1] - s;
          const double travel = instance.travel_time(seq[i], seq[i + 1]);
          if (gap < travel - kTimeTol)
            out.push_back({ViolationKind::TimeChain, index, seq[i + 1],
                           "spacing " + std::to_string(gap) + " below travel time " +
                               std::to_string(travel)});
        }
      }
    }

    if (route_km(pl, instance) > params.range_km + kTimeTol)
      out.push_back({ViolationKind::Range, index, -1,
                     at_platoon(index) + " exceeds range " + std::to_string(params.range_km)});

    const LoadCheck loads = propagate_loads(pl, instance);
    if (!loads.ok) {
      if (loads.violation_visit > static_cast<int>(pl.visits.size()))
        out.push_back({ViolationKind::LoadBalance, index, -1,
                       at_platoon(index) + " ends with onboard load"});
      else
        out.push_back({ViolationKind::Capacity, index,
                       pl.visits[loads.violation_visit - 1],
                       at_platoon(index) + " over capacity for type " +
                           std::to_string(loads.violation_type)});
    }
  }

  for (int k = 0; k < kNumDemandTypes; ++k)
    if (fleet_used[k] > params.max_modules_per_type[k])
      out.push_back({ViolationKind::FleetSize, -1, k,
                     std::to_string(fleet_used[k]) + " modules of type " + std::to_string(k) +
                         ", budget " + std::to_string(params.max_modules_per_type[k])});

  // Assignment: served exactly once with both ends together, or unserved.
  std::unordered_set<int> unserved(solution.unserved.begin(), solution.unserved.end());
  for (int r = 0; r < n_r; ++r) {
    const bool listed = unserved.count(r) > 0;
    const bool has_pickup = pickup_platoon[r] >= 0;
    const bool has_dropoff = dropoff_platoon[r] >= 0;
    if (listed && (has_pickup || has_dropoff))
      out.push_back({ViolationKind::RequestAssignment, -1, r,
                     "request " + std::to_string(r) + " both served and unserved"});
    if (!listed && (!has_pickup || !has_dropoff))
      out.push_back({ViolationKind::RequestAssignment, -1, r,
                     "request " + std::to_string(r) + " only partially assigned"});
    if (has_pickup && has_dropoff) {
      if (pickup_platoon[r] != dropoff_platoon[r])
        out.push_back({ViolationKind::PairSplit, pickup_platoon[r], r,
                       "request " + std::to_string(r) + " split across platoons"});
      else if (dropoff_pos[r] < pickup_pos[r])
        out.push_back({ViolationKind::Precedence, pickup_platoon[r], r,
                       "request " + std::to_string(r) + " dropped off before pickup"});
    }
  }
  for (int r : solution.unserved)
    if (r < 0 || r >= n_r)
      out.push_back({ViolationKind::RequestAssignment, -1, r, "unknown unserved request id"});

  return out;
}

}  // namespace mmp
