#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmp/alns.hpp"
#include "mmp/evaluate.hpp"
#include "mmp/exact.hpp"
#include "mmp/experiment.hpp"
#include "mmp/feasibility.hpp"
#include "mmp/io.hpp"
#include "mmp/kpi.hpp"
#include "mmp/scenario.hpp"

namespace {

using nlohmann::json;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::fputs(text.c_str(), stdout);
  else
    mmp::write_text_file(out_path, text);
}

void add_alns_flags(CLI::App* cmd, mmp::AlnsParams& alns) {
  cmd->add_option("--iterations", alns.max_iterations, "Iteration cap per run");
  cmd->add_option("--min-iterations", alns.min_iterations,
                  "Iterations before convergence-based stopping");
  cmd->add_option("--lookback", alns.lookback_window, "Convergence window size");
  cmd->add_option("--runs", alns.ensemble_size, "Independent runs per ensemble");
  cmd->add_option("--seed", alns.seed, "Base random seed");
}

int cmd_generate(const std::string& klass, mmp::ScenarioSpec spec, const std::string& out) {
  mmp::apply_class_name(spec, klass);
  const mmp::Instance instance = mmp::generate(spec, mmp::ModelParams{});
  emit(mmp::instance_to_json(instance), out);
  return 0;
}

int cmd_solve(const std::string& instance_path, const std::string& mode_name,
              const mmp::AlnsParams& alns, const std::string& out,
              const std::string& trace_path) {
  const mmp::Instance instance = mmp::load_instance(instance_path);
  const mmp::Mode mode = mmp::mode_from_name(mode_name);

  if (!trace_path.empty()) {
    if (mode != mmp::Mode::ModularConsolidated)
      throw std::invalid_argument("--trace requires --mode modular_consolidated");
    const mmp::EnsembleResult ens = mmp::solve_ensemble(instance, alns);
    mmp::write_text_file(trace_path, mmp::trace_to_csv(ens.best.trace));
  }

  const mmp::ModeRunResult result = mmp::run_mode(instance, mode, alns);
  if (!out.empty()) mmp::save_solution(result.solution, instance, out);

  json report;
  report["mode"] = mmp::mode_name(result.mode);
  report["total_cost"] = result.cost.total;
  report["run_totals"] = result.run_totals;
  report["wall_time_s"] = result.wall_time_s;
  report["kpis"] = json::parse(mmp::kpi_to_json(result.kpis));
  std::fputs((report.dump(2) + "\n").c_str(), stdout);
  return 0;
}

int cmd_exact(const std::string& instance_path, const mmp::ExactLimits& limits,
              const std::string& warm_path, const std::string& out) {
  const mmp::Instance instance = mmp::load_instance(instance_path);
  mmp::ExactSolver solver(instance, limits);
  std::optional<mmp::Solution> warm;
  if (!warm_path.empty()) warm = mmp::load_solution(warm_path, instance);
  const mmp::ExactResult result = solver.solve(warm);
  if (!out.empty()) mmp::save_solution(result.solution, instance, out);

  json report;
  report["total_cost"] = result.cost.total;
  report["lower_bound"] = result.lower_bound;
  report["proven_optimal"] = result.proven_optimal;
  report["nodes_explored"] = result.nodes_explored;
  report["wall_time_s"] = result.wall_time_s;
  std::fputs((report.dump(2) + "\n").c_str(), stdout);
  return result.proven_optimal ? 0 : 3;
}

int cmd_kpi(const std::string& instance_path, const std::string& solution_path, bool csv,
            const std::string& out) {
  const mmp::Instance instance = mmp::load_instance(instance_path);
  const mmp::Solution solution = mmp::load_solution(solution_path, instance);
  const std::vector<mmp::Violation> violations = mmp::check_feasibility(solution, instance);
  if (!violations.empty()) {
    std::fprintf(stderr, "solution is infeasible: %s\n", violations.front().detail.c_str());
    return 2;
  }
  const mmp::KpiReport report = mmp::compute_kpis(solution, instance);
  emit(csv ? mmp::kpi_csv_header() + "\n" + mmp::kpi_csv_row(report) + "\n"
           : mmp::kpi_to_json(report),
       out);
  return 0;
}

int cmd_batch(const std::string& plan_path, const std::string& outdir, int threads) {
  const mmp::ExperimentPlan plan = mmp::plan_from_json(mmp::read_text_file(plan_path));
  mmp::run_plan(plan, outdir, threads);
  return 0;
}

int cmd_compare(const std::string& results_path, const std::string& mode_a,
                const std::string& mode_b, const std::string& out) {
  emit(mmp::compare_report(mmp::read_text_file(results_path), mode_a, mode_b), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modular platoon pickup-and-delivery toolkit"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "Sample a random scenario instance");
  std::string gen_class = "clustered-even";
  mmp::ScenarioSpec spec;
  std::string gen_out;
  generate->add_option("--class", gen_class,
                       "clustered|distributed x even|peak, e.g. clustered-even");
  generate->add_option("--requests", spec.n_requests, "Number of requests");
  generate->add_option("--depots", spec.n_depots, "Number of depots");
  generate->add_option("--area", spec.area_km, "Square side length in km");
  generate->add_option("--passenger-share", spec.passenger_share,
                       "Fraction of passenger requests");
  generate->add_option("--seed", spec.seed, "Random seed");
  generate->add_option("-o,--out", gen_out, "Output file (stdout when omitted)");

  // solve
  auto* solve = app.add_subcommand("solve", "Optimize an instance with the adaptive solver");
  std::string solve_instance, solve_mode = "modular_consolidated", solve_out, solve_trace;
  mmp::AlnsParams alns;
  solve->add_option("--instance", solve_instance, "Instance file")->required();
  solve->add_option("--mode", solve_mode,
                    "conventional|modular_separated|modular_consolidated");
  add_alns_flags(solve, alns);
  solve->add_option("-o,--out", solve_out, "Solution output file");
  solve->add_option("--trace", solve_trace, "Per-iteration trace CSV of the best run");

  // exact
  auto* exact = app.add_subcommand("exact", "Prove the optimum by branch and bound");
  std::string exact_instance, exact_warm, exact_out;
  mmp::ExactLimits limits;
  exact->add_option("--instance", exact_instance, "Instance file")->required();
  exact->add_option("--time-limit", limits.time_limit_s, "Wall-clock limit in seconds");
  exact->add_option("--gap", limits.gap, "Relative optimality gap to prove");
  exact->add_option("--warm", exact_warm, "Feasible solution file used as incumbent");
  exact->add_option("-o,--out", exact_out, "Solution output file");

  // kpi
  auto* kpi = app.add_subcommand("kpi", "Validate a solution and report its indicators");
  std::string kpi_instance, kpi_solution, kpi_out;
  bool kpi_csv = false;
  kpi->add_option("--instance", kpi_instance, "Instance file")->required();
  kpi->add_option("--solution", kpi_solution, "Solution file")->required();
  kpi->add_flag("--csv", kpi_csv, "Emit a CSV header and row instead of JSON");
  kpi->add_option("-o,--out", kpi_out, "Output file (stdout when omitted)");

  // batch
  auto* batch = app.add_subcommand("batch", "Run an experiment plan");
  std::string batch_plan, batch_out;
  int batch_threads = 1;
  batch->add_option("--plan", batch_plan, "Plan JSON file")->required();
  batch->add_option("-o,--out", batch_out, "Output directory")->required();
  batch->add_option("--threads", batch_threads, "Parallel cells");

  // compare
  auto* compare = app.add_subcommand("compare", "Paired mode deltas from a results table");
  std::string cmp_results, cmp_a, cmp_b, cmp_out;
  compare->add_option("--results", cmp_results, "results.csv from a batch run")->required();
  compare->add_option("--mode-a", cmp_a, "Baseline mode")->required();
  compare->add_option("--mode-b", cmp_b, "Mode compared against the baseline")->required();
  compare->add_option("-o,--out", cmp_out, "Output file (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(gen_class, spec, gen_out);
    if (solve->parsed()) return cmd_solve(solve_instance, solve_mode, alns, solve_out, solve_trace);
    if (exact->parsed()) return cmd_exact(exact_instance, limits, exact_warm, exact_out);
    if (kpi->parsed()) return cmd_kpi(kpi_instance, kpi_solution, kpi_csv, kpi_out);
    if (batch->parsed()) return cmd_batch(batch_plan, batch_out, batch_threads);
    if (compare->parsed()) return cmd_compare(cmp_results, cmp_a, cmp_b, cmp_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
