#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mmp/alns.hpp"
#include "mmp/instance.hpp"
#include "mmp/kpi.hpp"
#include "mmp/scenario.hpp"
#include "mmp/types.hpp"

namespace mmp {

enum class Mode : int { Conventional = 0, ModularSeparated = 1, ModularConsolidated = 2 };

const char* mode_name(Mode mode);  // "conventional", "modular_separated", "modular_consolidated"
Mode mode_from_name(const std::string& name);

// Conventional operation forbids coupling: same network, platoon size capped
// at one module.
Instance make_conventional_instance(const Instance& original);

// One demand type in isolation: its requests renumbered from zero, depots
// shared, the other type's fleet budget zeroed, and the platoon size cap
// lowered to that type's budget.
struct SubInstance {
  Instance instance;
  std::vector<int> to_original;  // sub request id -> original request id
};
SubInstance make_sub_instance(const Instance& original, DemandType type);

// Rewrites both sub-solutions onto the original network. Passenger platoons
// keep their depot copies; freight platoons take the lowest copies still
// free. Throws when the joint solution would exceed the platoon budget.
Solution merge_sub_solutions(const Instance& original, const SubInstance& passenger,
                             const Solution& passenger_best, const SubInstance& freight,
                             const Solution& freight_best);

// Single-module rewrite of a modular solution, used to seed conventional
// runs: per platoon and type, requests are packed in visit order into
// one-module routes while the peak load fits; whatever cannot be placed
// (capacity, fleet or platoon budget) becomes unserved.
Solution split_to_single_modules(const Solution& modular, const Instance& conventional);

struct ModeRunResult {
  Mode mode = Mode::ModularConsolidated;
  Solution solution;  // expressed on the instance handed to run_mode
  CostBreakdown cost{};
  KpiReport kpis{};
  // Best objective of each underlying run; for separated mode the totals of
  // the two sub-solves with the same run index, summed.
  std::vector<double> run_totals;
  double wall_time_s = 0.0;
};

// Seed streams inside one call: separated solves passengers at alns.seed and
// freight at mix_seed(alns.seed, 1); a conventional run without a supplied
// separated solution first computes one at mix_seed(alns.seed, 2).
ModeRunResult run_mode(const Instance& instance, Mode mode, const AlnsParams& alns,
                       const Solution* separated_best = nullptr);

struct ScenarioLine {
  ScenarioSpec spec;  // seed is ignored; instance seeds derive from the plan
  int count = 1;
};

// Empty dimension = keep the base value. Capacity points rescale the
// distance and module cost coefficients along with the capacity itself.
struct SweepGrid {
  std::vector<double> module_capacity;
  std::vector<double> range_km;
  std::vector<double> train_incentive;
};

struct ExperimentPlan {
  std::string name = "experiment";
  std::vector<ScenarioLine> scenarios;
  std::vector<Mode> modes{Mode::Conventional, Mode::ModularSeparated,
                          Mode::ModularConsolidated};
  SweepGrid sweep;
  AlnsParams alns;
  ModelParams model;
  std::uint64_t base_seed = 1;
};

// Strict parse: unknown keys anywhere are an error, as are empty mode lists
// or empty sweep arrays.
ExperimentPlan plan_from_json(const std::string& text);
std::string plan_to_json(const ExperimentPlan& plan);

// Runs every scenario instance x sweep point x mode. Writes
// <outdir>/instances/*.json, <outdir>/solutions/*.json, <outdir>/results.csv
// and <outdir>/summary.json. results.csv is byte-identical across reruns of
// the same plan; wall times and per-run objectives live in summary.json.
// Failures are recorded per cell in summary.json and the run continues.
//
// Seed derivation: instance seed = mix_seed(base_seed, scenario_index * 2^20
// + instance_index); solver seed = mix_seed(instance_seed, grid_index * 16 +
// mode + 1). Conventional cells always derive their separated seed the same
// way, so results do not depend on which modes were requested together.
void run_plan(const ExperimentPlan& plan, const std::filesystem::path& outdir,
              int threads = 1);

// Paired percentage deltas, mode_b relative to mode_a, averaged over matching
// rows of a results.csv table; plot-ready CSV. Rows are matched on instance
// and sweep point; a mismatch between the two modes' row sets is an error.
std::string compare_report(const std::string& results_csv, const std::string& mode_a,
                           const std::string& mode_b);

}  // namespace mmp
