#include "mmp/exact.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mmp/alns.hpp"
#include "mmp/evaluate.hpp"
#include "mmp/feasibility.hpp"
#include "mmp/schedule.hpp"

namespace mmp {

namespace {

constexpr double kBoundTol = 1e-9;

// One node per distinct coordinate class: copy zero of every depot, its
// return node, and all request nodes.
std::vector<int> representative_nodes(const Instance& instance) {
  std::vector<int> nodes;
  for (int d = 0; d < instance.num_physical_depots(); ++d) {
    const int origin = instance.virtual_origin(d, 0);
    nodes.push_back(origin);
    nodes.push_back(instance.paired_destination(origin));
  }
  for (int r = 0; r < instance.num_requests(); ++r) {
    nodes.push_back(instance.pickup_node(r));
    nodes.push_back(instance.dropoff_node(r));
  }
  return nodes;
}

bool distances_are_metric(const Instance& instance, const std::vector<int>& nodes) {
  if (!instance.explicit_distance()) return true;  // Euclidean
  for (int i : nodes)
    for (int j : nodes)
      for (int k : nodes)
        if (instance.distance(i, k) >
            instance.distance(i, j) + instance.distance(j, k) + kBoundTol)
          return false;
  return true;
}

// Smallest possible distance added by routing `node` between any two stops.
double single_detour(const Instance& instance, const std::vector<int>& reps, int node) {
  double best = std::numeric_limits<double>::infinity();
  for (int i : reps)
    for (int j : reps)
      best = std::min(best,
                      instance.distance(i, node) + instance.distance(node, j) -
                          instance.distance(i, j));
  return best;
}

double pair_detour(const Instance& instance, const std::vector<int>& reps, int pickup,
                   int dropoff) {
  double best = std::numeric_limits<double>::infinity();
  const double mid = instance.distance(pickup, dropoff);
  for (int i : reps)
    for (int j : reps)
      best = std::min(best, instance.distance(i, pickup) + mid +
                                instance.distance(dropoff, j) - instance.distance(i, j));
  return best;
}

std::vector<int> visits_with(const std::vector<int>& visits, int pickup, int dropoff,
                             int pickup_pos, int dropoff_pos) {
  std::vector<int> out;
  out.reserve(visits.size() + 2);
  out.assign(visits.begin(), visits.begin() + pickup_pos);
  out.push_back(pickup);
  out.insert(out.end(), visits.begin() + pickup_pos, visits.begin() + dropoff_pos);
  out.push_back(dropoff);
  out.insert(out.end(), visits.begin() + dropoff_pos, visits.end());
  return out;
}

// Replaces platoon `pi`'s route with the spliced one at the minimum module
// count; empty when capacity, fleet, range, or schedule rules it out.
std::optional<Platoon> platoon_with_request(const Solution& state, const Instance& instance,
                                            int pi, int request, int pickup_pos,
                                            int dropoff_pos) {
  const ModelParams& params = instance.params();
  const Platoon& pl = state.platoons[pi];
  const Request& req = instance.request(request);

  Platoon candidate;
  candidate.origin = pl.origin;
  candidate.destination = pl.destination;
  candidate.visits = visits_with(pl.visits, req.pickup, req.dropoff, pickup_pos, dropoff_pos);
  const TypeCount config = min_config_for_visits(candidate.visits, instance);
  if (config[0] + config[1] > params.max_modules_per_platoon) return std::nullopt;
  const TypeCount used = fleet_used(state);
  for (int k = 0; k < kNumDemandTypes; ++k)
    if (used[k] - pl.config.modules_per_type[k] + config[k] > params.max_modules_per_type[k])
      return std::nullopt;
  candidate.config.modules_per_type = config;
  if (route_km(candidate, instance) > params.range_km + kTimeTol) return std::nullopt;
  if (!refresh_platoon(candidate, instance)) return std::nullopt;
  return candidate;
}

std::optional<Platoon> new_platoon_for_request(const Solution& state, const Instance& instance,
                                               int depot, int request) {
  const ModelParams& params = instance.params();
  if (static_cast<int>(state.platoons.size()) >= params.max_platoons) return std::nullopt;
  const int origin = free_virtual_origin(state, instance, depot);
  if (origin < 0) return std::nullopt;

  const Request& req = instance.request(request);
  Platoon candidate;
  candidate.origin = origin;
  candidate.destination = instance.paired_destination(origin);
  candidate.visits = {req.pickup, req.dropoff};
  const TypeCount config = min_config_for_visits(candidate.visits, instance);
  if (config[0] + config[1] > params.max_modules_per_platoon) return std::nullopt;
  const TypeCount used = fleet_used(state);
  for (int k = 0; k < kNumDemandTypes; ++k)
    if (used[k] + config[k] > params.max_modules_per_type[k]) return std::nullopt;
  candidate.config.modules_per_type = config;
  if (route_km(candidate, instance) > params.range_km + kTimeTol) return std::nullopt;
  if (!refresh_platoon(candidate, instance)) return std::nullopt;
  return candidate;
}

}  // namespace

ExactSolver::ExactSolver(const Instance& instance, ExactLimits limits)
    : instance_(instance), limits_(limits) {
  if (limits_.time_limit_s <= 0.0) throw std::invalid_argument("time limit must be positive");
  if (limits_.gap < 0.0) throw std::invalid_argument("gap must be non-negative");
  const std::vector<int> reps = representative_nodes(instance_);
  metric_ = distances_are_metric(instance_, reps);
  min_detour_km_.resize(instance_.num_requests());
  for (int r = 0; r < instance_.num_requests(); ++r) {
    const int pickup = instance_.pickup_node(r);
    const int dropoff = instance_.dropoff_node(r);
    const double split = single_detour(instance_, reps, pickup) +
                         single_detour(instance_, reps, dropoff);
    const double together = pair_detour(instance_, reps, pickup, dropoff);
    min_detour_km_[r] = std::max(0.0, std::min(split, together));
  }
}

void ExactSolver::set_bound_observer(std::function<void(double, double)> observer) {
  bound_observer_ = std::move(observer);
}

double ExactSolver::partial_bound(const Solution& partial, int next_request) const {
  const ModelParams& params = instance_.params();
  const double w_floor = platoon_distance_factor(params.max_modules_per_platoon);
  double bound = params.unserved_penalty * static_cast<double>(partial.unserved.size());
  for (const Platoon& pl : partial.platoons) {
    const TypeCount needed = min_config_for_visits(pl.visits, instance_);
    const int p_min = std::max(1, needed[0] + needed[1]);
    bound += params.module_cost_per_period * p_min *
             platoon_fleet_factor(p_min, params.train_incentive);
    if (metric_) {
      bound += params.distance_cost_per_km * w_floor * route_km(pl, instance_);
      bound += params.duration_cost_per_hour * route_duration_min(pl) / 60.0;
    }
  }
  if (metric_) {
    for (int r = next_request; r < instance_.num_requests(); ++r)
      bound += std::min(params.unserved_penalty,
                        params.distance_cost_per_km * w_floor * min_detour_km_[r]);
  }
  return bound;
}

void ExactSolver::optimize_configs(Solution& solution) const {
  const ModelParams& params = instance_.params();
  for (Platoon& pl : solution.platoons)
    pl.config.modules_per_type = min_config_for_visits(pl.visits, instance_);
  TypeCount used = fleet_used(solution);

  // Extra modules trade a deeper distance discount against their own cost.
  // Each platoon's cost is convex in its module count, so repeatedly taking
  // the best positive marginal gain is optimal under the shared fleet budget.
  for (;;) {
    double best_gain = kBoundTol;
    int best_platoon = -1, best_type = -1;
    for (size_t i = 0; i < solution.platoons.size(); ++i) {
      const Platoon& pl = solution.platoons[i];
      const int p = pl.config.total();
      if (p >= params.max_modules_per_platoon) continue;
      const double km = route_km(pl, instance_);
      const double gain =
          params.distance_cost_per_km * km *
              (platoon_distance_factor(p) - platoon_distance_factor(p + 1)) -
          params.module_cost_per_period *
              ((p + 1) * platoon_fleet_factor(p + 1, params.train_incentive) -
               p * platoon_fleet_factor(p, params.train_incentive));
      if (gain <= best_gain) continue;
      for (int k = 0; k < kNumDemandTypes; ++k) {
        if (used[k] >= params.max_modules_per_type[k]) continue;
        best_gain = gain;
        best_platoon = static_cast<int>(i);
        best_type = k;
        break;
      }
    }
    if (best_platoon < 0) break;
    solution.platoons[best_platoon].config.modules_per_type[best_type] += 1;
    used[best_type] += 1;
  }
}

bool ExactSolver::timed_out() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count() >
         limits_.time_limit_s;
}

void ExactSolver::expand_children(const Solution& state, int next_request,
                                  std::vector<Child>& out) const {
  const int request = next_request;
  for (size_t pi = 0; pi < state.platoons.size(); ++pi) {
    const double before = platoon_cost(state.platoons[pi], instance_).total;
    const int len = static_cast<int>(state.platoons[pi].visits.size());
    for (int ip = 0; ip <= len; ++ip) {
      for (int jd = ip; jd <= len; ++jd) {
        auto candidate =
            platoon_with_request(state, instance_, static_cast<int>(pi), request, ip, jd);
        if (!candidate) continue;
        Child child;
        child.delta = platoon_cost(*candidate, instance_).total - before;
        child.state = state;
        child.state.platoons[pi] = std::move(*candidate);
        out.push_back(std::move(child));
      }
    }
  }
  for (int depot = 0; depot < instance_.num_physical_depots(); ++depot) {
    auto candidate = new_platoon_for_request(state, instance_, depot, request);
    if (!candidate) continue;
    Child child;
    child.delta = platoon_cost(*candidate, instance_).total;
    child.state = state;
    child.state.platoons.push_back(std::move(*candidate));
    out.push_back(std::move(child));
  }
  Child unserved;
  unserved.delta = instance_.params().unserved_penalty;
  unserved.state = state;
  unserved.state.unserved.push_back(request);  // ids decided in order, stays sorted
  out.push_back(std::move(unserved));
}

void ExactSolver::search(const Solution& state, int next_request, double state_bound,
                         int depth) {
  if (timed_out()) {
    hit_time_limit_ = true;
    frontier_bound_ = frontier_open_ ? std::min(frontier_bound_, state_bound) : state_bound;
    frontier_open_ = true;
    return;
  }
  ++nodes_;

  if (next_request == instance_.num_requests()) {
    Solution leaf = state;
    optimize_configs(leaf);
    const double total = evaluate(leaf, instance_).total;
    if (!have_incumbent_ || total < incumbent_cost_) {
      incumbent_ = std::move(leaf);
      incumbent_cost_ = total;
      have_incumbent_ = true;
    }
    return;
  }

  std::vector<Child> children;
  expand_children(state, next_request, children);
  for (Child& child : children) {
    child.bound = partial_bound(child.state, next_request + 1);
    if (bound_observer_) bound_observer_(state_bound, child.bound);
  }
  std::stable_sort(children.begin(), children.end(), [](const Child& a, const Child& b) {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.delta < b.delta;
  });

  for (Child& child : children) {
    if (timed_out()) {
      hit_time_limit_ = true;
      frontier_bound_ = frontier_open_ ? std::min(frontier_bound_, child.bound) : child.bound;
      frontier_open_ = true;
      continue;
    }
    if (have_incumbent_) {
      const double prune_at =
          incumbent_cost_ - std::max(limits_.gap * std::abs(incumbent_cost_), kBoundTol);
      if (child.bound >= prune_at) {
        frontier_bound_ = frontier_open_ ? std::min(frontier_bound_, child.bound) : child.bound;
        frontier_open_ = true;
        continue;
      }
    }
    search(child.state, next_request + 1, child.bound, depth + 1);
  }
}

ExactResult ExactSolver::solve(std::optional<Solution> warm_start) {
  start_ = std::chrono::steady_clock::now();
  nodes_ = 0;
  hit_time_limit_ = false;
  frontier_open_ = false;
  frontier_bound_ = 0.0;
  have_incumbent_ = false;
  incumbent_cost_ = 0.0;

  if (warm_start) {
    const std::vector<Violation> violations = check_feasibility(*warm_start, instance_);
    if (!violations.empty())
      throw std::invalid_argument("warm start is infeasible: " + violations.front().detail);
    Solution seeded = *warm_start;
    optimize_configs(seeded);
    incumbent_ = std::move(seeded);
    incumbent_cost_ = evaluate(incumbent_, instance_).total;
    have_incumbent_ = true;
  } else {
    Solution greedy;
    greedy.unserved.resize(instance_.num_requests());
    for (int r = 0; r < instance_.num_requests(); ++r) greedy.unserved[r] = r;
    Rng rng(0x9e3779b97f4a7c15ULL);
    RemovalLog log;
    best_insert(greedy, instance_, rng, log);
    optimize_configs(greedy);
    incumbent_ = std::move(greedy);
    incumbent_cost_ = evaluate(incumbent_, instance_).total;
    have_incumbent_ = true;
  }

  Solution root;
  search(root, 0, partial_bound(root, 0), 0);

  ExactResult result;
  result.solution = incumbent_;
  result.cost = evaluate(incumbent_, instance_);
  result.lower_bound =
      frontier_open_ ? std::min(incumbent_cost_, frontier_bound_) : incumbent_cost_;
  result.proven_optimal = !hit_time_limit_;
  result.nodes_explored = nodes_;
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  return result;
}

}  // namespace mmp
