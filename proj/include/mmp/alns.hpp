#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mmp/instance.hpp"
#include "mmp/rng.hpp"
#include "mmp/types.hpp"

namespace mmp {

struct AlnsParams {
  // Operator scoring and adaptation.
  double score_new_best = 7.0;
  double score_improving = 2.0;   // accepted, better than current
  double score_accepted = 9.0;    // accepted although worse
  double score_rejected = 1.0;
  double weight_decay = 0.8;

  // Iteration control. The variation exit compares the accepted-objective sum
  // of the window before last against the latest window.
  int max_iterations = 10000;
  int min_iterations = 5000;
  int lookback_window = 1000;
  double improvement_threshold = 0.001;

  // Simulated annealing acceptance.
  double temp_start = 90.0;
  double temp_end = 0.0001;
  double cooling_rate = 0.9999;

  // Shaw relatedness and rank randomization.
  double shaw_distance_weight = 9.0;
  double shaw_time_weight = 4.0;
  double shaw_load_weight = 9.0;
  double shaw_rank_power = 6.0;
  double worst_rank_power = 4.0;

  // Removal volume per destroy call.
  double max_removal_fraction = 0.32;
  int min_removals = 1;

  std::uint64_t seed = 0;
  int ensemble_size = 10;
};

inline constexpr int kNumDestroyOps = 5;
inline constexpr int kNumRepairOps = 3;
const char* destroy_op_name(int index);
const char* repair_op_name(int index);

// Roulette-wheel pick: index i with probability weights[i] / sum(weights).
int select_operator(const std::vector<double>& weights, Rng& rng);

// Exponential smoothing toward the iteration score.
double update_weight(double weight, double decay, double score);

// Accept worse candidates with probability exp(-(candidate - current) / temperature).
bool sa_accept(double candidate_obj, double current_obj, double temperature, Rng& rng);

// history holds the accepted objective of every completed iteration.
bool should_terminate(int completed_iterations, const std::vector<double>& history,
                      const AlnsParams& params);

// Number of requests a destroy call removes: U[min_removals, min(n_served,
// floor(n_requests * max_removal_fraction))], degenerate cases clamped.
int removal_count(int n_requests, int n_served, const AlnsParams& params, Rng& rng);

// Destroy bookkeeping, consumed by inter_route_insert: virtual origin of the
// platoon each request was last removed from.
struct RemovalLog {
  std::unordered_map<int, int> origin_of_request;
};

// Destroy operators. All move requests to the unserved pool, refresh the
// schedules of shortened platoons and dissolve platoons left without requests
// (their depot pair and modules return to the idle fleet).
void random_removal(Solution& solution, const Instance& instance, int count, Rng& rng,
                    RemovalLog& log);
void module_removal(Solution& solution, const Instance& instance, const AlnsParams& params,
                    Rng& rng, RemovalLog& log);
void platoon_removal(Solution& solution, const Instance& instance, Rng& rng, RemovalLog& log);
void shaw_removal(Solution& solution, const Instance& instance, const AlnsParams& params,
                  int count, Rng& rng, RemovalLog& log);
void worst_removal(Solution& solution, const Instance& instance, const AlnsParams& params,
                   int count, Rng& rng, RemovalLog& log);

// Repair operators. All walk the shuffled unserved pool, keep every insertion
// feasible (windows, range, capacity, fleet budgets) and may open a new
// platoon with the minimal module count for the request; requests that fit
// nowhere stay unserved.
void first_fit_insert(Solution& solution, const Instance& instance, Rng& rng,
                      const RemovalLog& log);
void inter_route_insert(Solution& solution, const Instance& instance, Rng& rng,
                        const RemovalLog& log);
void best_insert(Solution& solution, const Instance& instance, Rng& rng,
                 const RemovalLog& log);

// Removes one request pair from its platoon (dissolving an emptied platoon)
// and returns it to the unserved pool.
void remove_request(Solution& solution, const Instance& instance, int request, RemovalLog& log);

struct TraceRow {
  int iteration = 0;
  double current_obj = 0.0;
  double best_obj = 0.0;
  int destroy_op = 0;
  int repair_op = 0;
  bool accepted = false;
  double temperature = 0.0;
};

std::string trace_to_csv(const std::vector<TraceRow>& trace);

struct SolveResult {
  Solution best;
  CostBreakdown best_cost;
  std::vector<TraceRow> trace;
  int iterations = 0;
  double wall_time_s = 0.0;
};

class AlnsSolver {
 public:
  AlnsSolver(const Instance& instance, AlnsParams params);

  // initial, when given, must be feasible; otherwise construction starts from
  // the all-unserved solution via best_insert.
  SolveResult solve(std::optional<Solution> initial = std::nullopt);

  // Called with every post-repair candidate before evaluation.
  void set_candidate_hook(std::function<void(const Solution&)> hook);

 private:
  const Instance& instance_;
  AlnsParams params_;
  std::function<void(const Solution&)> candidate_hook_;
};

struct EnsembleResult {
  SolveResult best;
  int best_run = -1;
  std::vector<double> run_totals;
  double wall_time_s = 0.0;
};

// Independent runs with seeds params.seed + run index; best by objective with
// deterministic tie-breaking.
EnsembleResult solve_ensemble(const Instance& instance, const AlnsParams& params,
                              std::optional<Solution> initial = std::nullopt);

}  // namespace mmp
