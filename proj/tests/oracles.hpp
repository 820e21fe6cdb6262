#pragma once

// Independent reference implementations used only by tests. They avoid the
// library's scheduling and search internals on purpose: the scheduler is
// checked against closed-form candidate enumeration, the branch-and-bound
// against plain exhaustive enumeration.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "mmp/evaluate.hpp"
#include "mmp/feasibility.hpp"
#include "mmp/instance.hpp"
#include "mmp/schedule.hpp"
#include "mmp/types.hpp"

namespace oracle {

// Minimal feasible route duration for a fixed stop sequence. The departure
// only shifts arrivals forward, so duration is non-increasing in it and some
// window edge (or the first stop's closing) is optimal; trying every edge
// candidate is exhaustive.
inline std::optional<double> min_duration(const std::vector<double>& tw_open,
                                          const std::vector<double>& tw_close,
                                          const std::vector<double>& travel) {
  const size_t n = tw_open.size();
  if (n == 0) return 0.0;
  std::vector<double> prefix(n, 0.0);  // raw travel from stop 0 to stop k
  for (size_t k = 1; k < n; ++k) prefix[k] = prefix[k - 1] + travel[k - 1];

  std::vector<double> candidates{tw_close[0], tw_open[0]};
  for (size_t k = 1; k < n; ++k) {
    candidates.push_back(tw_open[k] - prefix[k]);
    candidates.push_back(tw_close[k] - prefix[k]);
  }

  double best = std::numeric_limits<double>::infinity();
  for (double depart : candidates) {
    depart = std::min(std::max(depart, tw_open[0]), tw_close[0]);
    double at = depart;
    bool feasible = true;
    for (size_t k = 1; k < n; ++k) {
      at = std::max(at + travel[k - 1], tw_open[k]);
      if (at > tw_close[k] + mmp::kTimeTol) {
        feasible = false;
        break;
      }
    }
    if (feasible) best = std::min(best, at - depart);
  }
  if (best == std::numeric_limits<double>::infinity()) return std::nullopt;
  return best;
}

// Exhaustive optimum for tiny instances: every request goes unserved or into
// every position pair of every platoon built so far or opens a platoon at
// every depot; at the leaves every module assignment within the budgets is
// costed. No bounding, no search-order tricks.
class BruteForce {
 public:
  explicit BruteForce(const mmp::Instance& instance) : instance_(instance) {}

  double best_total() {
    best_ = std::numeric_limits<double>::infinity();
    mmp::Solution state;
    assign(state, 0);
    return best_;
  }

 private:
  void assign(mmp::Solution& state, int request) {
    if (request == instance_.num_requests()) {
      finish(state);
      return;
    }
    const mmp::Request& req = instance_.request(request);

    for (size_t pi = 0; pi < state.platoons.size(); ++pi) {
      const std::vector<int> saved = state.platoons[pi].visits;
      const int len = static_cast<int>(saved.size());
      for (int ip = 0; ip <= len; ++ip) {
        for (int jd = ip; jd <= len; ++jd) {
          std::vector<int> visits = saved;
          visits.insert(visits.begin() + ip, req.pickup);
          visits.insert(visits.begin() + jd + 1, req.dropoff);
          state.platoons[pi].visits = std::move(visits);
          assign(state, request + 1);
          state.platoons[pi].visits = saved;
        }
      }
    }

    for (int depot = 0; depot < instance_.num_physical_depots(); ++depot) {
      const int origin = mmp::free_virtual_origin(state, instance_, depot);
      if (origin < 0) continue;
      if (static_cast<int>(state.platoons.size()) >= instance_.params().max_platoons) continue;
      mmp::Platoon pl;
      pl.origin = origin;
      pl.destination = instance_.paired_destination(origin);
      pl.visits = {req.pickup, req.dropoff};
      state.platoons.push_back(std::move(pl));
      assign(state, request + 1);
      state.platoons.pop_back();
    }

    state.unserved.push_back(request);
    assign(state, request + 1);
    state.unserved.pop_back();
  }

  // Check schedules, then try every per-platoon module total compatible with
  // the fleet budgets; cost depends on totals only, so types just need any
  // feasible split.
  void finish(mmp::Solution& state) {
    const mmp::ModelParams& params = instance_.params();
    std::vector<mmp::TypeCount> minimums;
    for (mmp::Platoon& pl : state.platoons) {
      if (!mmp::refresh_platoon(pl, instance_)) return;
      if (mmp::route_km(pl, instance_) > params.range_km + mmp::kTimeTol) return;
      const mmp::TypeCount need = mmp::min_config_for_visits(pl.visits, instance_);
      if (need[0] + need[1] > params.max_modules_per_platoon) return;
      minimums.push_back(need);
    }
    configs(state, minimums, 0);
  }

  void configs(mmp::Solution& state, const std::vector<mmp::TypeCount>& minimums, size_t pi) {
    const mmp::ModelParams& params = instance_.params();
    if (pi == state.platoons.size()) {
      const mmp::TypeCount used = mmp::fleet_used(state);
      for (int k = 0; k < mmp::kNumDemandTypes; ++k)
        if (used[k] > params.max_modules_per_type[k]) return;
      const double total = mmp::evaluate(state, instance_).total;
      best_ = std::min(best_, total);
      return;
    }
    const int base = minimums[pi][0] + minimums[pi][1];
    for (int extra = 0; base + extra <= params.max_modules_per_platoon; ++extra) {
      for (int extra_pass = 0; extra_pass <= extra; ++extra_pass) {
        state.platoons[pi].config.modules_per_type[0] = minimums[pi][0] + extra_pass;
        state.platoons[pi].config.modules_per_type[1] = minimums[pi][1] + (extra - extra_pass);
        configs(state, minimums, pi + 1);
      }
    }
  }

  const mmp::Instance& instance_;
  double best_ = std::numeric_limits<double>::infinity();
};

}  // namespace oracle
