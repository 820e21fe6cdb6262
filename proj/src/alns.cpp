#include "mmp/alns.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "mmp/evaluate.hpp"
#include "mmp/io.hpp"
#include "mmp/schedule.hpp"

namespace mmp {

namespace {

constexpr int kRandomRemoval = 0;
constexpr int kModuleRemoval = 1;
constexpr int kPlatoonRemoval = 2;
constexpr int kShawRemoval = 3;
constexpr int kWorstRemoval = 4;

constexpr int kFirstFitInsert = 0;
constexpr int kInterRouteInsert = 1;
constexpr int kBestInsert = 2;

std::vector<int> served_requests(const Solution& solution, const Instance& instance) {
  std::vector<int> served;
  for (const Platoon& pl : solution.platoons)
    for (int node : pl.visits)
      if (instance.is_pickup(node)) served.push_back(instance.request_of(node));
  std::sort(served.begin(), served.end());
  return served;
}

int platoon_of_request(const Solution& solution, const Instance& instance, int request) {
  const int pickup = instance.pickup_node(request);
  for (size_t i = 0; i < solution.platoons.size(); ++i)
    for (int node : solution.platoons[i].visits)
      if (node == pickup) return static_cast<int>(i);
  return -1;
}

void insert_unserved(Solution& solution, int request) {
  auto it = std::lower_bound(solution.unserved.begin(), solution.unserved.end(), request);
  if (it == solution.unserved.end() || *it != request) solution.unserved.insert(it, request);
}

double platoon_cost_total(const Platoon& platoon, const Instance& instance) {
  return platoon_cost(platoon, instance).total;
}

struct InsertionSpot {
  int platoon = -1;     // -1 opens a new platoon
  int origin = -1;      // virtual origin when opening
  int pickup_pos = 0;   // insertion index into visits
  int dropoff_pos = 0;  // insertion index into visits after the pickup went in
  TypeCount config{0, 0};
  double delta = 0.0;
};

// Tentative visit list with the request pair spliced in.
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

std::optional<InsertionSpot> eval_insertion(const Solution& solution, const Instance& instance,
                                            int platoon_idx, int request, int pickup_pos,
                                            int dropoff_pos) {
  const Platoon& pl = solution.platoons[platoon_idx];
  const ModelParams& params = instance.params();
  const Request& req = instance.request(request);

  const std::vector<int> visits =
      visits_with(pl.visits, req.pickup, req.dropoff, pickup_pos, dropoff_pos);

  // Module demand: keep deployed modules, grow only where the new peak needs it.
  const TypeCount needed = min_config_for_visits(visits, instance);
  TypeCount config = pl.config.modules_per_type;
  for (int k = 0; k < kNumDemandTypes; ++k) config[k] = std::max(config[k], needed[k]);
  const int total = config[0] + config[1];
  if (total > params.max_modules_per_platoon) return std::nullopt;
  const TypeCount used = fleet_used(solution);
  for (int k = 0; k < kNumDemandTypes; ++k)
    if (used[k] - pl.config.modules_per_type[k] + config[k] > params.max_modules_per_type[k])
      return std::nullopt;

  Platoon candidate;
  candidate.config.modules_per_type = config;
  candidate.origin = pl.origin;
  candidate.destination = pl.destination;
  candidate.visits = visits;
  if (route_km(candidate, instance) > params.range_km + kTimeTol) return std::nullopt;
  if (!refresh_platoon(candidate, instance)) return std::nullopt;

  InsertionSpot spot;
  spot.platoon = platoon_idx;
  spot.pickup_pos = pickup_pos;
  spot.dropoff_pos = dropoff_pos;
  spot.config = config;
  spot.delta = platoon_cost_total(candidate, instance) - platoon_cost_total(pl, instance);
  return spot;
}

std::optional<InsertionSpot> eval_new_platoon(const Solution& solution, const Instance& instance,
                                              int depot, int request) {
  const ModelParams& params = instance.params();
  if (static_cast<int>(solution.platoons.size()) >= params.max_platoons) return std::nullopt;
  const int origin = free_virtual_origin(solution, instance, depot);
  if (origin < 0) return std::nullopt;

  const Request& req = instance.request(request);
  const int k = static_cast<int>(req.type);
  TypeCount config{0, 0};
  config[k] = static_cast<int>(std::ceil(req.quantity / params.module_capacity[k]));
  config[k] = std::max(config[k], 1);
  if (config[k] > params.max_modules_per_platoon) return std::nullopt;
  const TypeCount used = fleet_used(solution);
  if (used[k] + config[k] > params.max_modules_per_type[k]) return std::nullopt;

  Platoon candidate;
  candidate.config.modules_per_type = config;
  candidate.origin = origin;
  candidate.destination = instance.paired_destination(origin);
  candidate.visits = {req.pickup, req.dropoff};
  if (route_km(candidate, instance) > params.range_km + kTimeTol) return std::nullopt;
  if (!refresh_platoon(candidate, instance)) return std::nullopt;

  InsertionSpot spot;
  spot.platoon = -1;
  spot.origin = origin;
  spot.config = config;
  spot.delta = platoon_cost_total(candidate, instance);
  return spot;
}

void apply_insertion(Solution& solution, const Instance& instance, int request,
                     const InsertionSpot& spot) {
  const Request& req = instance.request(request);
  if (spot.platoon >= 0) {
    Platoon& pl = solution.platoons[spot.platoon];
    pl.visits = visits_with(pl.visits, req.pickup, req.dropoff, spot.pickup_pos,
                            spot.dropoff_pos);
    pl.config.modules_per_type = spot.config;
    const bool ok = refresh_platoon(pl, instance);
    assert(ok);
    (void)ok;
  } else {
    Platoon pl;
    pl.config.modules_per_type = spot.config;
    pl.origin = spot.origin;
    pl.destination = instance.paired_destination(spot.origin);
    pl.visits = {req.pickup, req.dropoff};
    const bool ok = refresh_platoon(pl, instance);
    assert(ok);
    (void)ok;
    solution.platoons.push_back(std::move(pl));
  }
  auto it = std::lower_bound(solution.unserved.begin(), solution.unserved.end(), request);
  if (it != solution.unserved.end() && *it == request) solution.unserved.erase(it);
}

// Best spot within one platoon, ties to the earliest position pair.
std::optional<InsertionSpot> best_spot_in_platoon(const Solution& solution,
                                                  const Instance& instance, int platoon_idx,
                                                  int request) {
  std::optional<InsertionSpot> best;
  const int len = static_cast<int>(solution.platoons[platoon_idx].visits.size());
  for (int ip = 0; ip <= len; ++ip) {
    for (int jd = ip; jd <= len; ++jd) {
      const auto spot = eval_insertion(solution, instance, platoon_idx, request, ip, jd);
      if (spot && (!best || spot->delta < best->delta)) best = spot;
    }
  }
  return best;
}

std::optional<InsertionSpot> best_new_platoon(const Solution& solution, const Instance& instance,
                                              int request) {
  std::optional<InsertionSpot> best;
  for (int depot = 0; depot < instance.num_physical_depots(); ++depot) {
    const auto spot = eval_new_platoon(solution, instance, depot, request);
    if (spot && (!best || spot->delta < best->delta)) best = spot;
  }
  return best;
}

std::vector<int> shuffled_unserved(const Solution& solution, Rng& rng) {
  std::vector<int> pool = solution.unserved;
  rng.shuffle(pool);
  return pool;
}

}  // namespace

const char* destroy_op_name(int index) {
  switch (index) {
    case kRandomRemoval: return "random_removal";
    case kModuleRemoval: return "module_removal";
    case kPlatoonRemoval: return "platoon_removal";
    case kShawRemoval: return "shaw_removal";
    case kWorstRemoval: return "worst_removal";
  }
  return "unknown";
}

const char* repair_op_name(int index) {
  switch (index) {
    case kFirstFitInsert: return "first_fit_insert";
    case kInterRouteInsert: return "inter_route_insert";
    case kBestInsert: return "best_insert";
  }
  return "unknown";
}

int select_operator(const std::vector<double>& weights, Rng& rng) {
  if (weights.empty()) throw std::invalid_argument("no operators to select from");
  double sum = 0.0;
  for (double w : weights) {
    if (w <= 0.0) throw std::invalid_argument("operator weights must be positive");
    sum += w;
  }
  const double pick = rng.u01() * sum;
  double acc = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (pick < acc) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

double update_weight(double weight, double decay, double score) {
  if (decay < 0.0 || decay > 1.0) throw std::invalid_argument("decay must be in [0, 1]");
  return weight * decay + (1.0 - decay) * score;
}

bool sa_accept(double candidate_obj, double current_obj, double temperature, Rng& rng) {
  if (candidate_obj <= current_obj) return true;
  if (temperature <= 0.0) return false;
  return rng.u01() < std::exp(-(candidate_obj - current_obj) / temperature);
}

bool should_terminate(int completed_iterations, const std::vector<double>& history,
                      const AlnsParams& params) {
  if (completed_iterations >= params.max_iterations) return true;
  if (completed_iterations < params.min_iterations) return false;
  const int window = params.lookback_window;
  const int size = static_cast<int>(history.size());
  if (size < 2 * window + 1) return false;
  double older = 0.0, newer = 0.0;
  for (int j = size - window - 1; j < size; ++j) newer += history[j];
  for (int j = size - 2 * window - 1; j < size - window; ++j) older += history[j];
  if (newer <= 0.0) return true;
  return older / newer - 1.0 <= params.improvement_threshold;
}

int removal_count(int n_requests, int n_served, const AlnsParams& params, Rng& rng) {
  if (n_served <= 0) return 0;
  const int lo = params.min_removals;
  const int hi = std::min(n_served,
                          static_cast<int>(std::floor(n_requests * params.max_removal_fraction)));
  if (hi < lo) return std::min(n_served, lo);
  return rng.uniform_int(lo, hi);
}

void remove_request(Solution& solution, const Instance& instance, int request, RemovalLog& log) {
  const int idx = platoon_of_request(solution, instance, request);
  if (idx < 0) return;
  Platoon& pl = solution.platoons[idx];
  log.origin_of_request[request] = pl.origin;
  const int pickup = instance.pickup_node(request);
  const int dropoff = instance.dropoff_node(request);
  pl.visits.erase(std::remove_if(pl.visits.begin(), pl.visits.end(),
                                 [&](int node) { return node == pickup || node == dropoff; }),
                  pl.visits.end());
  insert_unserved(solution, request);
  if (pl.visits.empty()) {
    solution.platoons.erase(solution.platoons.begin() + idx);
    return;
  }
  if (!refresh_platoon(pl, instance)) {
    // Only possible without the triangle inequality; shed the rest of the route.
    std::vector<int> rest;
    for (int node : pl.visits)
      if (instance.is_pickup(node)) rest.push_back(instance.request_of(node));
    for (int r : rest) {
      log.origin_of_request[r] = pl.origin;
      insert_unserved(solution, r);
    }
    solution.platoons.erase(solution.platoons.begin() + idx);
  }
}

void random_removal(Solution& solution, const Instance& instance, int count, Rng& rng,
                    RemovalLog& log) {
  std::vector<int> served = served_requests(solution, instance);
  count = std::min<int>(count, static_cast<int>(served.size()));
  for (int i = 0; i < count; ++i) {
    const int j = rng.uniform_int(i, static_cast<int>(served.size()) - 1);
    std::swap(served[i], served[j]);
    remove_request(solution, instance, served[i], log);
  }
}

void module_removal(Solution& solution, const Instance& instance, const AlnsParams& params,
                    Rng& rng, RemovalLog& log) {
  TypeCount used = fleet_used(solution);
  const int deployed = used[0] + used[1];
  if (deployed <= 0) return;
  const int cap = std::max(1, static_cast<int>(std::floor(deployed *
                                                          params.max_removal_fraction)));
  const int count = rng.uniform_int(1, cap);

  for (int step = 0; step < count; ++step) {
    // Uniform over deployed modules: weight platoons by their module counts.
    int total = 0;
    for (const Platoon& pl : solution.platoons) total += pl.config.total();
    if (total <= 0) return;
    int pick = rng.uniform_int(0, total - 1);
    int platoon_idx = -1, type = -1;
    for (size_t i = 0; i < solution.platoons.size() && platoon_idx < 0; ++i) {
      for (int k = 0; k < kNumDemandTypes; ++k) {
        const int m = solution.platoons[i].config.modules_per_type[k];
        if (pick < m) {
          platoon_idx = static_cast<int>(i);
          type = k;
          break;
        }
        pick -= m;
      }
    }
    if (platoon_idx < 0) return;

    Platoon& pl = solution.platoons[platoon_idx];
    pl.config.modules_per_type[type] -= 1;
    if (pl.config.total() == 0) {
      std::vector<int> requests;
      for (int node : pl.visits)
        if (instance.is_pickup(node)) requests.push_back(instance.request_of(node));
      for (int r : requests) {
        log.origin_of_request[r] = pl.origin;
        insert_unserved(solution, r);
      }
      solution.platoons.erase(solution.platoons.begin() + platoon_idx);
      continue;
    }

    // Shed matching-type requests until the reduced capacity suffices.
    for (;;) {
      const TypeCount needed = min_config_for_visits(pl.visits, instance);
      if (needed[type] <= pl.config.modules_per_type[type]) break;
      std::vector<int> candidates;
      for (int node : pl.visits) {
        if (!instance.is_pickup(node)) continue;
        const int r = instance.request_of(node);
        if (instance.request(r).type == static_cast<DemandType>(type)) candidates.push_back(r);
      }
      if (candidates.empty()) break;
      const int victim = candidates[rng.uniform_int(0, static_cast<int>(candidates.size()) - 1)];
      const size_t platoons_before = solution.platoons.size();
      remove_request(solution, instance, victim, log);
      if (solution.platoons.size() != platoons_before) break;  // platoon dissolved
    }
  }
}

void platoon_removal(Solution& solution, const Instance& instance, Rng& rng, RemovalLog& log) {
  if (solution.platoons.empty()) return;
  const int idx = rng.uniform_int(0, static_cast<int>(solution.platoons.size()) - 1);
  const Platoon& pl = solution.platoons[idx];
  for (int node : pl.visits) {
    if (!instance.is_pickup(node)) continue;
    const int r = instance.request_of(node);
    log.origin_of_request[r] = pl.origin;
    insert_unserved(solution, r);
  }
  solution.platoons.erase(solution.platoons.begin() + idx);
}

void shaw_removal(Solution& solution, const Instance& instance, const AlnsParams& params,
                  int count, Rng& rng, RemovalLog& log) {
  const std::vector<int> served = served_requests(solution, instance);
  if (served.empty() || count <= 0) return;

  // Arrival times of every served pickup/dropoff under the current schedule.
  std::vector<double> pickup_time(instance.num_requests(), 0.0);
  std::vector<double> dropoff_time(instance.num_requests(), 0.0);
  for (const Platoon& pl : solution.platoons) {
    for (size_t i = 0; i < pl.visits.size(); ++i) {
      const int node = pl.visits[i];
      const int r = instance.request_of(node);
      if (r < 0) continue;
      const double at = pl.arrival_times[i + 1];
      if (instance.is_pickup(node)) pickup_time[r] = at;
      else dropoff_time[r] = at;
    }
  }

  const int seed_request = served[rng.uniform_int(0, static_cast<int>(served.size()) - 1)];
  const auto relatedness = [&](int other) {
    const Request& a = instance.request(seed_request);
    const Request& b = instance.request(other);
    const double spatial = instance.distance(a.pickup, b.pickup) +
                           instance.distance(a.dropoff, b.dropoff);
    const double temporal = std::abs(pickup_time[seed_request] - pickup_time[other]) +
                            std::abs(dropoff_time[seed_request] - dropoff_time[other]);
    const double load = std::abs(a.quantity - b.quantity);
    return params.shaw_distance_weight * spatial + params.shaw_time_weight * temporal +
           params.shaw_load_weight * load;
  };

  std::vector<std::pair<double, int>> ranked;
  ranked.reserve(served.size() - 1);
  for (int r : served)
    if (r != seed_request) ranked.push_back({relatedness(r), r});
  std::sort(ranked.begin(), ranked.end());

  std::vector<int> chosen{seed_request};
  while (static_cast<int>(chosen.size()) < count && !ranked.empty()) {
    const double y = rng.u01();
    const int idx = static_cast<int>(std::floor(
        std::pow(y, params.shaw_rank_power) * static_cast<double>(ranked.size())));
    const int at = std::min<int>(idx, static_cast<int>(ranked.size()) - 1);
    chosen.push_back(ranked[at].second);
    ranked.erase(ranked.begin() + at);
  }
  for (int r : chosen) remove_request(solution, instance, r, log);
}

void worst_removal(Solution& solution, const Instance& instance, const AlnsParams& params,
                   int count, Rng& rng, RemovalLog& log) {
  for (int step = 0; step < count; ++step) {
    const std::vector<int> served = served_requests(solution, instance);
    if (served.empty()) return;

    // Cost contribution: platoon cost now minus its cost with the request cut.
    std::vector<std::pair<double, int>> ranked;
    ranked.reserve(served.size());
    for (int r : served) {
      const int idx = platoon_of_request(solution, instance, r);
      const Platoon& pl = solution.platoons[idx];
      double contribution;
      if (pl.visits.size() == 2) {
        contribution = platoon_cost_total(pl, instance);
      } else {
        Platoon reduced = pl;
        const int pickup = instance.pickup_node(r);
        const int dropoff = instance.dropoff_node(r);
        reduced.visits.erase(
            std::remove_if(reduced.visits.begin(), reduced.visits.end(),
                           [&](int node) { return node == pickup || node == dropoff; }),
            reduced.visits.end());
        if (refresh_platoon(reduced, instance))
          contribution = platoon_cost_total(pl, instance) -
                         platoon_cost_total(reduced, instance);
        else
          contribution = platoon_cost_total(pl, instance);
      }
      ranked.push_back({contribution, r});
    }
    // Descending contribution; ties resolved toward the lower request id.
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });

    const double y = rng.u01();
    const int idx = static_cast<int>(std::floor(
        std::pow(y, params.worst_rank_power) * static_cast<double>(ranked.size())));
    const int at = std::min<int>(idx, static_cast<int>(ranked.size()) - 1);
    remove_request(solution, instance, ranked[at].second, log);
  }
}

void first_fit_insert(Solution& solution, const Instance& instance, Rng& rng,
                      const RemovalLog& log) {
  (void)log;
  for (int request : shuffled_unserved(solution, rng)) {
    std::optional<InsertionSpot> found;
    for (size_t pi = 0; pi < solution.platoons.size() && !found; ++pi) {
      const int len = static_cast<int>(solution.platoons[pi].visits.size());
      for (int ip = 0; ip <= len && !found; ++ip)
        for (int jd = ip; jd <= len && !found; ++jd)
          found = eval_insertion(solution, instance, static_cast<int>(pi), request, ip, jd);
    }
    for (int depot = 0; depot < instance.num_physical_depots() && !found; ++depot)
      found = eval_new_platoon(solution, instance, depot, request);
    if (found) apply_insertion(solution, instance, request, *found);
  }
}

void inter_route_insert(Solution& solution, const Instance& instance, Rng& rng,
                        const RemovalLog& log) {
  for (int request : shuffled_unserved(solution, rng)) {
    std::optional<InsertionSpot> found;
    int target = -1;
    const auto logged = log.origin_of_request.find(request);
    if (logged != log.origin_of_request.end()) {
      for (size_t pi = 0; pi < solution.platoons.size(); ++pi)
        if (solution.platoons[pi].origin == logged->second) target = static_cast<int>(pi);
    }
    if (target < 0 && !solution.platoons.empty())
      target = rng.uniform_int(0, static_cast<int>(solution.platoons.size()) - 1);
    if (target >= 0) found = best_spot_in_platoon(solution, instance, target, request);
    if (!found) {
      // Fall back to a fresh platoon from a random depot on first insertion.
      std::vector<int> depots(instance.num_physical_depots());
      for (int d = 0; d < instance.num_physical_depots(); ++d) depots[d] = d;
      rng.shuffle(depots);
      for (int depot : depots) {
        found = eval_new_platoon(solution, instance, depot, request);
        if (found) break;
      }
    }
    if (found) apply_insertion(solution, instance, request, *found);
  }
}

void best_insert(Solution& solution, const Instance& instance, Rng& rng,
                 const RemovalLog& log) {
  (void)log;
  for (int request : shuffled_unserved(solution, rng)) {
    std::optional<InsertionSpot> best;
    for (size_t pi = 0; pi < solution.platoons.size(); ++pi) {
      const auto spot =
          best_spot_in_platoon(solution, instance, static_cast<int>(pi), request);
      if (spot && (!best || spot->delta < best->delta)) best = spot;
    }
    const auto fresh = best_new_platoon(solution, instance, request);
    if (fresh && (!best || fresh->delta < best->delta)) best = fresh;
    if (best) apply_insertion(solution, instance, request, *best);
  }
}

std::string trace_to_csv(const std::vector<TraceRow>& trace) {
  std::string out = "iteration,current_obj,best_obj,destroy_op,repair_op,accepted,temperature\n";
  for (const TraceRow& row : trace) {
    out += std::to_string(row.iteration);
    out += ',';
    out += format_double(row.current_obj);
    out += ',';
    out += format_double(row.best_obj);
    out += ',';
    out += destroy_op_name(row.destroy_op);
    out += ',';
    out += repair_op_name(row.repair_op);
    out += ',';
    out += row.accepted ? '1' : '0';
    out += ',';
    out += format_double(row.temperature);
    out += '\n';
  }
  return out;
}

AlnsSolver::AlnsSolver(const Instance& instance, AlnsParams params)
    : instance_(instance), params_(params) {}

void AlnsSolver::set_candidate_hook(std::function<void(const Solution&)> hook) {
  candidate_hook_ = std::move(hook);
}

SolveResult AlnsSolver::solve(std::optional<Solution> initial) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(params_.seed);

  Solution current;
  if (initial) {
    current = *initial;
  } else {
    current.unserved.resize(instance_.num_requests());
    for (int r = 0; r < instance_.num_requests(); ++r) current.unserved[r] = r;
    RemovalLog empty;
    best_insert(current, instance_, rng, empty);
  }

  CostBreakdown current_cost = evaluate(current, instance_);
  Solution best = current;
  CostBreakdown best_cost = current_cost;

  std::vector<double> destroy_weights(kNumDestroyOps, 1.0);
  std::vector<double> repair_weights(kNumRepairOps, 1.0);
  double temperature = params_.temp_start;
  std::vector<double> history;
  history.reserve(params_.max_iterations);
  std::vector<TraceRow> trace;
  trace.reserve(params_.max_iterations);

  int iteration = 0;
  while (!should_terminate(iteration, history, params_)) {
    ++iteration;
    const int destroy_op = select_operator(destroy_weights, rng);
    const int repair_op = select_operator(repair_weights, rng);

    Solution candidate = current;
    RemovalLog log;
    const int n_served = instance_.num_requests() - static_cast<int>(candidate.unserved.size());
    const int n = removal_count(instance_.num_requests(), n_served, params_, rng);
    switch (destroy_op) {
      case kRandomRemoval: random_removal(candidate, instance_, n, rng, log); break;
      case kModuleRemoval: module_removal(candidate, instance_, params_, rng, log); break;
      case kPlatoonRemoval: platoon_removal(candidate, instance_, rng, log); break;
      case kShawRemoval: shaw_removal(candidate, instance_, params_, n, rng, log); break;
      case kWorstRemoval: worst_removal(candidate, instance_, params_, n, rng, log); break;
    }
    switch (repair_op) {
      case kFirstFitInsert: first_fit_insert(candidate, instance_, rng, log); break;
      case kInterRouteInsert: inter_route_insert(candidate, instance_, rng, log); break;
      case kBestInsert: best_insert(candidate, instance_, rng, log); break;
    }
    if (candidate_hook_) candidate_hook_(candidate);

    const CostBreakdown candidate_cost = evaluate(candidate, instance_);
    double score;
    bool accepted;
    if (candidate_cost.total < best_cost.total) {
      best = candidate;
      best_cost = candidate_cost;
      current = candidate;
      current_cost = candidate_cost;
      score = params_.score_new_best;
      accepted = true;
    } else if (sa_accept(candidate_cost.total, current_cost.total, temperature, rng)) {
      score = candidate_cost.total < current_cost.total ? params_.score_improving
                                                        : params_.score_accepted;
      current = candidate;
      current_cost = candidate_cost;
      accepted = true;
    } else {
      score = params_.score_rejected;
      accepted = false;
    }

    destroy_weights[destroy_op] =
        update_weight(destroy_weights[destroy_op], params_.weight_decay, score);
    repair_weights[repair_op] =
        update_weight(repair_weights[repair_op], params_.weight_decay, score);
    temperature = std::max(params_.temp_end, temperature * params_.cooling_rate);
    history.push_back(current_cost.total);
    trace.push_back({iteration, current_cost.total, best_cost.total, destroy_op, repair_op,
                     accepted, temperature});
  }

  SolveResult result;
  result.best = std::move(best);
  result.best_cost = best_cost;
  result.trace = std::move(trace);
  result.iterations = iteration;
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

EnsembleResult solve_ensemble(const Instance& instance, const AlnsParams& params,
                              std::optional<Solution> initial) {
  if (params.ensemble_size < 1) throw std::invalid_argument("ensemble needs at least one run");
  const auto start = std::chrono::steady_clock::now();
  EnsembleResult out;
  for (int run = 0; run < params.ensemble_size; ++run) {
    AlnsParams run_params = params;
    run_params.seed = params.seed + static_cast<std::uint64_t>(run);
    AlnsSolver solver(instance, run_params);
    SolveResult result = solver.solve(initial);
    out.run_totals.push_back(result.best_cost.total);
    if (out.best_run < 0 || better_solution(result.best_cost, result.best, out.best.best_cost,
                                            out.best.best)) {
      out.best = std::move(result);
      out.best_run = run;
    }
  }
  out.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace mmp
