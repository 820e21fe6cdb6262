#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "mmp/alns.hpp"
#include "mmp/evaluate.hpp"
#include "mmp/exact.hpp"
#include "mmp/feasibility.hpp"
#include "mmp/scenario.hpp"
#include "oracles.hpp"

using namespace mmp;

namespace {

// Small budgets keep the reference enumeration of module assignments cheap.
ModelParams tight_params() {
  ModelParams params;
  params.max_modules_per_platoon = 3;
  params.max_modules_per_type = {2, 2};
  return params;
}

Instance tiny_instance(std::uint64_t seed, int n_requests, int n_depots,
                       const ModelParams& params) {
  ScenarioSpec spec;
  spec.n_requests = n_requests;
  spec.n_depots = n_depots;
  spec.area_km = 2.5;
  spec.seed = seed;
  return generate(spec, params);
}

}  // namespace

TEST_CASE("branch and bound matches exhaustive enumeration") {
  const ModelParams params = tight_params();
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const int n_requests = 2 + static_cast<int>(seed % 3);
    const int n_depots = 1 + static_cast<int>(seed % 2);
    const Instance inst = tiny_instance(seed, n_requests, n_depots, params);

    const double want = oracle::BruteForce(inst).best_total();
    ExactSolver solver(inst);
    const ExactResult got = solver.solve();

    INFO("seed ", seed, " n=", n_requests, " d=", n_depots);
    CHECK(got.proven_optimal);
    CHECK(got.cost.total == doctest::Approx(want).epsilon(1e-9));
    CHECK(got.lower_bound == doctest::Approx(got.cost.total).epsilon(1e-9));
    CHECK(check_feasibility(got.solution, inst).empty());
    CHECK(got.nodes_explored >= 1);
    ++checked;
  }
  CHECK(checked == 6);
}

TEST_CASE("hand-built instance agrees with enumeration") {
  // One passenger triple and a two-module freight order on a line.
  ModelParams params = tight_params();
  fixtures::RequestSpec passenger;
  passenger.pickup_x = 1.0;
  passenger.dropoff_x = 2.0;
  passenger.quantity = 3;
  fixtures::RequestSpec freight;
  freight.type = DemandType::Freight;
  freight.pickup_x = 3.0;
  freight.dropoff_x = 4.0;
  freight.quantity = 20;
  const Instance inst = fixtures::build({{0.0, 0.0}}, {passenger, freight}, params);

  const double want = oracle::BruteForce(inst).best_total();
  ExactSolver solver(inst);
  const ExactResult got = solver.solve();
  CHECK(got.proven_optimal);
  CHECK(got.cost.total == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("child bounds never fall below their parent") {
  const Instance inst = tiny_instance(11, 4, 2, tight_params());
  ExactSolver solver(inst);
  int expansions = 0;
  int regressions = 0;
  solver.set_bound_observer([&](double parent, double child) {
    ++expansions;
    if (child < parent - 1e-9) ++regressions;
  });
  const ExactResult result = solver.solve();
  CHECK(result.proven_optimal);
  CHECK(expansions > 0);
  CHECK(regressions == 0);
}

TEST_CASE("the root bound underestimates the optimum") {
  const Instance inst = tiny_instance(17, 3, 1, tight_params());
  ExactSolver solver(inst);
  Solution empty;
  const double root = solver.partial_bound(empty, 0);
  const ExactResult result = solver.solve();
  CHECK(root <= result.cost.total + 1e-9);
  CHECK(root >= 0.0);
}

TEST_CASE("a feasible warm start only helps") {
  const Instance inst = tiny_instance(23, 4, 2, tight_params());
  ExactSolver cold(inst);
  const ExactResult without = cold.solve();

  AlnsParams alns;
  alns.max_iterations = 200;
  alns.min_iterations = 100;
  alns.lookback_window = 30;
  alns.seed = 5;
  AlnsSolver heuristic(inst, alns);
  const SolveResult warm = heuristic.solve();

  ExactSolver seeded(inst);
  const ExactResult with = seeded.solve(warm.best);
  CHECK(with.proven_optimal);
  CHECK(with.cost.total == doctest::Approx(without.cost.total).epsilon(1e-9));
  CHECK(with.nodes_explored <= without.nodes_explored);
}

TEST_CASE("an infeasible warm start is rejected") {
  const Instance inst = tiny_instance(29, 3, 1, tight_params());
  ExactSolver solver(inst);
  Solution broken;  // no platoons, nothing marked unserved: requests unaccounted
  CHECK_THROWS_AS(solver.solve(broken), std::invalid_argument);
}

TEST_CASE("free coupling grows platoons to the size cap") {
  // With a full train incentive the fleet term is flat in the platoon length,
  // so every added module is a pure per-km discount and the optimal platoon
  // carries as many modules as the cap allows.
  ModelParams params;
  params.train_incentive = 1.0;
  params.max_modules_per_platoon = 4;
  params.max_modules_per_type = {4, 4};
  fixtures::RequestSpec spec;
  spec.pickup_x = 10.0;
  spec.dropoff_x = 20.0;
  const Instance inst = fixtures::build({{0.0, 0.0}}, {spec}, params);

  ExactSolver solver(inst);
  const ExactResult result = solver.solve();
  CHECK(result.proven_optimal);
  REQUIRE(result.solution.platoons.size() == 1);
  CHECK(result.solution.platoons[0].config.total() == 4);
  CHECK(check_feasibility(result.solution, inst).empty());

  // The enumeration oracle confirms the grown configuration is optimal.
  CHECK(result.cost.total ==
        doctest::Approx(oracle::BruteForce(inst).best_total()).epsilon(1e-9));
}

TEST_CASE("relative gap trades proof strength for speed") {
  const Instance inst = tiny_instance(31, 4, 2, tight_params());
  ExactLimits limits;
  limits.gap = 0.3;
  ExactSolver solver(inst, limits);
  const ExactResult result = solver.solve();
  CHECK(result.proven_optimal);  // finished, just with a coarser certificate
  CHECK(check_feasibility(result.solution, inst).empty());
  CHECK(result.lower_bound <= result.cost.total + 1e-9);
  CHECK(result.cost.total - result.lower_bound <= 0.3 * result.cost.total + 1e-6);

  ExactSolver tight(inst);
  const ExactResult proof = tight.solve();
  CHECK(proof.cost.total <= result.cost.total + 1e-9);
  CHECK(result.lower_bound <= proof.cost.total + 1e-9);
}

TEST_CASE("the time limit is honored") {
  ScenarioSpec spec;
  spec.n_requests = 40;
  spec.n_depots = 3;
  spec.seed = 40;
  const Instance inst = generate(spec, ModelParams{});

  ExactLimits limits;
  limits.time_limit_s = 0.05;
  ExactSolver solver(inst, limits);
  const ExactResult result = solver.solve();
  CHECK(!result.proven_optimal);
  CHECK(result.wall_time_s < 5.0);  // limit plus incumbent construction slack
  CHECK(check_feasibility(result.solution, inst).empty());
  CHECK(result.lower_bound <= result.cost.total + 1e-9);
}
