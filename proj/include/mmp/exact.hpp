#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mmp/instance.hpp"
#include "mmp/types.hpp"

namespace mmp {

struct ExactLimits {
  double time_limit_s = 3600.0;
  // Relative optimality gap below which a node is not explored further.
  // Zero proves the optimum exactly (up to floating-point noise).
  double gap = 0.0;
};

struct ExactResult {
  Solution solution;
  CostBreakdown cost{};
  double lower_bound = 0.0;
  bool proven_optimal = false;
  std::int64_t nodes_explored = 0;
  double wall_time_s = 0.0;
};

// Depth-first branch and bound over request assignments.  Requests are
// decided in id order; each is either spliced into an existing platoon,
// opened as a new platoon (one branch per physical depot, always taking the
// lowest free virtual origin, which removes copy symmetry), or left
// unserved.  Module counts are kept minimal during the search and re-optimized
// at every leaf, so the result is exact for any parameter setting.
//
// The node bound adds, per open platoon, the distance at the largest-platoon
// discount, the module cost at the current minimum size, and the scheduled
// duration; each undecided request contributes the cheaper of its unserved
// penalty and a precomputed minimum detour.  With a non-metric explicit
// distance matrix the distance and duration terms are dropped, which keeps
// the bound valid but weaker.
class ExactSolver {
 public:
  explicit ExactSolver(const Instance& instance, ExactLimits limits = {});

  // warm_start, when given, must be a feasible full assignment; it seeds the
  // incumbent so the tree is pruned against it from the start.
  ExactResult solve(std::optional<Solution> warm_start = std::nullopt);

  // Lower bound for a partial assignment where requests >= next_request are
  // still undecided.  Exposed so the bound can be audited from outside.
  double partial_bound(const Solution& partial, int next_request) const;

  // Called with (parent bound, child bound) for every expansion.
  void set_bound_observer(std::function<void(double, double)> observer);

 private:
  struct Child {
    Solution state;
    double bound = 0.0;
    double delta = 0.0;
  };

  void search(const Solution& state, int next_request, double state_bound, int depth);
  void expand_children(const Solution& state, int next_request, std::vector<Child>& out) const;
  void optimize_configs(Solution& solution) const;
  bool timed_out() const;

  const Instance& instance_;
  ExactLimits limits_;
  bool metric_ = true;
  std::vector<double> min_detour_km_;  // per request, floor on added distance when served
  std::function<void(double, double)> bound_observer_;

  Solution incumbent_;
  double incumbent_cost_ = 0.0;
  bool have_incumbent_ = false;
  double frontier_bound_ = 0.0;
  bool frontier_open_ = false;
  bool hit_time_limit_ = false;
  std::int64_t nodes_ = 0;
  double deadline_s_ = 0.0;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace mmp
