#include "mmp/evaluate.hpp"

#include <tuple>

#include "mmp/schedule.hpp"

namespace mmp {

CostBreakdown platoon_cost(const Platoon& platoon, const Instance& instance) {
  const ModelParams& params = instance.params();
  const int p = platoon.config.total();
  CostBreakdown cost;
  cost.distance =
      params.distance_cost_per_km * platoon_distance_factor(p) * route_km(platoon, instance);
  cost.fleet = params.module_cost_per_period * p *
               platoon_fleet_factor(p, params.train_incentive);
  cost.duration = params.duration_cost_per_hour * route_duration_min(platoon) / 60.0;
  cost.total = cost.distance + cost.fleet + cost.duration;
  return cost;
}

CostBreakdown evaluate(const Solution& solution, const Instance& instance) {
  CostBreakdown cost;
  for (const Platoon& platoon : solution.platoons) {
    const CostBreakdown part = platoon_cost(platoon, instance);
    cost.distance += part.distance;
    cost.fleet += part.fleet;
    cost.duration += part.duration;
  }
  cost.unserved = instance.params().unserved_penalty * solution.unserved.size();
  cost.total = cost.distance + cost.fleet + cost.duration + cost.unserved;
  return cost;
}

namespace {

// Route description used only for deterministic tie-breaking.
std::vector<std::vector<int>> route_key(const Solution& s) {
  std::vector<std::vector<int>> key;
  key.reserve(s.platoons.size());
  for (const Platoon& platoon : s.platoons) {
    std::vector<int> row;
    row.reserve(platoon.visits.size() + 1);
    row.push_back(platoon.origin);
    row.insert(row.end(), platoon.visits.begin(), platoon.visits.end());
    key.push_back(std::move(row));
  }
  return key;
}

}  // namespace

bool better_solution(const CostBreakdown& cost_a, const Solution& a,
                     const CostBreakdown& cost_b, const Solution& b) {
  if (cost_a.total != cost_b.total) return cost_a.total < cost_b.total;
  if (a.platoons.size() != b.platoons.size()) return a.platoons.size() < b.platoons.size();
  return route_key(a) < route_key(b);
}

TypeCount fleet_used(const Solution& solution) {
  TypeCount used{0, 0};
  for (const Platoon& platoon : solution.platoons)
    for (int k = 0; k < kNumDemandTypes; ++k) used[k] += platoon.config.modules_per_type[k];
  return used;
}

int free_virtual_origin(const Solution& solution, const Instance& instance, int depot) {
  const int copies = instance.params().max_platoons;
  std::vector<bool> used(copies, false);
  for (const Platoon& platoon : solution.platoons)
    if (instance.physical_depot_of(platoon.origin) == depot)
      used[platoon.origin - instance.virtual_origin(depot, 0)] = true;
  for (int c = 0; c < copies; ++c)
    if (!used[c]) return instance.virtual_origin(depot, c);
  return -1;
}

}  // namespace mmp
