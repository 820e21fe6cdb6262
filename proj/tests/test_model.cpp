#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "mmp/evaluate.hpp"
#include "mmp/feasibility.hpp"
#include "mmp/instance.hpp"
#include "mmp/io.hpp"
#include "mmp/schedule.hpp"

using namespace mmp;

TEST_CASE("distance discount per platoon length") {
  CHECK(platoon_distance_factor(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(platoon_distance_factor(2) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(platoon_distance_factor(10) == doctest::Approx(0.955).epsilon(1e-12));
  for (int p = 1; p < 10; ++p)  // coupling never costs more per km
    CHECK(platoon_distance_factor(p + 1) < platoon_distance_factor(p));
  CHECK_THROWS_AS(platoon_distance_factor(0), std::invalid_argument);
}

TEST_CASE("fleet discount per platoon length") {
  CHECK(platoon_fleet_factor(1, 0.6) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(platoon_fleet_factor(2, 0.6) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(platoon_fleet_factor(10, 0.6) == doctest::Approx(0.46).epsilon(1e-12));
  CHECK(platoon_fleet_factor(5, 1.0) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(platoon_fleet_factor(5, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(platoon_fleet_factor(2, 1.5), std::invalid_argument);
}

TEST_CASE("cost coefficients scale linearly with module capacity") {
  const CapacityCostParams at15 = capacity_cost_params(15.0);
  CHECK(at15.distance_cost_per_km == doctest::Approx(0.095605).epsilon(1e-12));
  CHECK(at15.module_cost_per_hour == doctest::Approx(19.4295).epsilon(1e-12));
  const CapacityCostParams at45 = capacity_cost_params(45.0);
  CHECK(at45.distance_cost_per_km == doctest::Approx(0.203575).epsilon(1e-12));
  CHECK(at45.module_cost_per_hour == doctest::Approx(24.6885).epsilon(1e-12));
  CHECK_THROWS_AS(capacity_cost_params(0.0), std::invalid_argument);

  const ModelParams swept = with_module_capacity(ModelParams{}, 45.0);
  CHECK(swept.module_capacity[0] == 45.0);
  CHECK(swept.module_capacity[1] == 45.0);
  CHECK(swept.module_cost_per_period == doctest::Approx(24.6885 * 16.0).epsilon(1e-12));
  CHECK(swept.unserved_penalty == doctest::Approx(24.6885 * 16.0 * 8.0).epsilon(1e-12));
}

TEST_CASE("default parameters") {
  const ModelParams p;
  CHECK(p.distance_cost_per_km == doctest::Approx(0.096));
  CHECK(p.module_cost_per_period == doctest::Approx(309.92));
  CHECK(p.duration_cost_per_hour == doctest::Approx(6.9));
  CHECK(p.unserved_penalty == doctest::Approx(2479.36));
  CHECK(p.train_incentive == doctest::Approx(0.6));
  CHECK(p.speed_kmh == doctest::Approx(30.0));
  CHECK(p.range_km == doctest::Approx(200.0));
  CHECK(p.max_modules_per_platoon == 10);
  CHECK(p.max_modules_per_type[0] == 10);
  CHECK(p.module_capacity[0] == doctest::Approx(15.0));
  CHECK(p.max_platoons == 20);
  CHECK(p.period_start == doctest::Approx(360.0));
  CHECK(p.period_end == doctest::Approx(1320.0));
}

TEST_CASE("expanded node layout") {
  const Instance inst = fixtures::line2();
  CHECK(inst.num_physical_depots() == 1);
  CHECK(inst.num_requests() == 2);
  CHECK(inst.num_virtual_origins() == 20);
  CHECK(inst.num_nodes() == 2 * 20 + 2 * 2);
  CHECK(inst.pickup_node(0) == 20);
  CHECK(inst.pickup_node(1) == 21);
  CHECK(inst.dropoff_node(0) == 22);
  CHECK(inst.dropoff_node(1) == 23);
  CHECK(inst.virtual_origin(0, 0) == 0);
  CHECK(inst.virtual_origin(0, 7) == 7);
  CHECK(inst.paired_destination(7) == 7 + 20 + 4);
  CHECK(inst.paired_origin(31) == 7);
  CHECK(inst.physical_depot_of(7) == 0);
  CHECK(inst.is_origin(19));
  CHECK(inst.is_pickup(20));
  CHECK(inst.is_dropoff(23));
  CHECK(inst.is_destination(24));
  CHECK(inst.request_of(20) == 0);
  CHECK(inst.request_of(23) == 1);
  CHECK(inst.request_of(5) == -1);

  // Virtual copies of one depot sit in the same place.
  CHECK(inst.distance(0, 19) == doctest::Approx(0.0));
  CHECK(inst.distance(0, 24) == doctest::Approx(0.0));
}

TEST_CASE("travel time carries departure service at default speed") {
  const Instance inst = fixtures::line2();
  // 30 km/h means two minutes per km; pickup 0 has two minutes of service.
  CHECK(inst.distance(0, 20) == doctest::Approx(1.0));
  CHECK(inst.travel_time(0, 20) == doctest::Approx(2.0));
  CHECK(inst.travel_time(20, 22) == doctest::Approx(2.0 + 2.0));
  CHECK(inst.travel_time(22, 24) == doctest::Approx(4.0 + 1.0));
  CHECK(inst.travel_time(20, 20) == doctest::Approx(2.0));  // diagonal = service
}

TEST_CASE("worst-case lateness bound covers every arc") {
  // H = max over arcs (self arcs included) of close_i + travel(i,j) - open_j.
  fixtures::RequestSpec spec;
  spec.pickup_x = 3.0;
  spec.dropoff_x = 4.0;
  spec.pickup_open = 100.0;
  spec.pickup_close = 200.0;
  spec.dropoff_open = 500.0;
  spec.dropoff_close = 600.0;
  const Instance inst = fixtures::build({{0.0, 0.0}}, {spec});
  // The depot's own zero-travel arc spans its whole [0, 2000] window and
  // dominates every cross arc here.
  CHECK(big_h(inst) == doctest::Approx(2000.0));
  // Still an upper bound for arbitrary arcs, such as depot -> dropoff.
  CHECK(big_h(inst) >= 2000.0 + 8.0 - 500.0);
}

TEST_CASE("instance construction rejects malformed input") {
  fixtures::RequestSpec spec;
  spec.quantity = 0;
  CHECK_THROWS_AS(fixtures::build({{0.0, 0.0}}, {spec}), std::invalid_argument);

  ModelParams bad;
  bad.speed_kmh = 0.0;
  CHECK_THROWS_AS(fixtures::build({{0.0, 0.0}}, {fixtures::RequestSpec{}}, bad),
                  std::invalid_argument);
  bad = ModelParams{};
  bad.train_incentive = 1.2;
  CHECK_THROWS_AS(fixtures::build({{0.0, 0.0}}, {fixtures::RequestSpec{}}, bad),
                  std::invalid_argument);
  bad = ModelParams{};
  bad.period_end = bad.period_start;
  CHECK_THROWS_AS(fixtures::build({{0.0, 0.0}}, {fixtures::RequestSpec{}}, bad),
                  std::invalid_argument);
}

TEST_CASE("single platoon cost worked by hand") {
  const Instance inst = fixtures::line2();
  const Platoon pl = fixtures::line2_passenger_platoon(inst);

  // Route 0 -> (1,0) -> (2,0) -> 0 is 4 km at the single-module rate, the
  // schedule runs 0..11 minutes, one module is deployed.
  const CostBreakdown cost = platoon_cost(pl, inst);
  CHECK(cost.distance == doctest::Approx(0.096 * 4.0).epsilon(1e-12));
  CHECK(cost.fleet == doctest::Approx(309.92).epsilon(1e-12));
  CHECK(cost.duration == doctest::Approx(6.9 * 11.0 / 60.0).epsilon(1e-12));
  CHECK(cost.total == doctest::Approx(0.384 + 309.92 + 1.265).epsilon(1e-12));

  Solution sol;
  sol.platoons.push_back(pl);
  sol.unserved = {1};
  const CostBreakdown total = evaluate(sol, inst);
  CHECK(total.unserved == doctest::Approx(2479.36).epsilon(1e-12));
  CHECK(total.total == doctest::Approx(311.569 + 2479.36).epsilon(1e-12));
  CHECK(check_feasibility(sol, inst).empty());
}

TEST_CASE("feasibility checker flags each violation family") {
  const Instance inst = fixtures::line2();
  const Platoon good = fixtures::line2_passenger_platoon(inst);

  Solution sol;
  sol.platoons.push_back(good);
  sol.unserved = {1};

  SUBCASE("missing request") {
    sol.unserved.clear();
    CHECK(!check_feasibility(sol, inst).empty());
  }
  SUBCASE("request both served and unserved") {
    sol.unserved = {0, 1};
    CHECK(!check_feasibility(sol, inst).empty());
  }
  SUBCASE("precedence broken") {
    sol.platoons[0].visits = {inst.dropoff_node(0), inst.pickup_node(0)};
    sol.platoons[0].arrival_times = {0.0, 2.0, 6.0, 11.0};
    CHECK(!check_feasibility(sol, inst).empty());
  }
  SUBCASE("capacity exceeded") {
    sol.platoons[0].config.modules_per_type = {0, 1};  // wrong shelf for passengers
    CHECK(!check_feasibility(sol, inst).empty());
  }
  SUBCASE("platoon too long") {
    sol.platoons[0].config.modules_per_type = {11, 0};
    CHECK(!check_feasibility(sol, inst).empty());
  }
  SUBCASE("fleet budget exhausted") {
    sol.platoons[0].config.modules_per_type = {10, 0};
    Platoon second = good;
    second.origin = inst.virtual_origin(0, 1);
    second.destination = inst.paired_destination(second.origin);
    second.config.modules_per_type = {1, 0};
    second.visits.clear();
    sol.platoons.push_back(second);  // also empty visits
    CHECK(!check_feasibility(sol, inst).empty());
  }
  SUBCASE("depot copy reused") {
    Platoon dup = good;
    sol.platoons.push_back(dup);
    sol.unserved = {1};
    CHECK(!check_feasibility(sol, inst).empty());
  }
  SUBCASE("stale schedule") {
    sol.platoons[0].arrival_times = {0.0, 1.0, 6.0, 11.0};  // spacing below travel
    CHECK(!check_feasibility(sol, inst).empty());
  }
  SUBCASE("time window missed") {
    sol.platoons[0].arrival_times = {1500.0, 1502.0, 1506.0, 1511.0};
    CHECK(!check_feasibility(sol, inst).empty());
  }
}

TEST_CASE("range limit enforced") {
  fixtures::RequestSpec far;
  far.pickup_x = 60.0;
  far.dropoff_x = 120.0;
  const Instance inst = fixtures::build({{0.0, 0.0}}, {far});
  Platoon pl;
  pl.config.modules_per_type = {1, 0};
  pl.origin = 0;
  pl.destination = inst.paired_destination(0);
  pl.visits = {inst.pickup_node(0), inst.dropoff_node(0)};
  REQUIRE(refresh_platoon(pl, inst));
  Solution sol;
  sol.platoons.push_back(pl);
  bool saw_range = false;  // 240 km round trip > 200 km range
  for (const Violation& v : check_feasibility(sol, inst))
    if (v.kind == ViolationKind::Range) saw_range = true;
  CHECK(saw_range);
}

TEST_CASE("instance files round-trip") {
  const Instance inst = fixtures::line2();
  const std::string text = instance_to_json(inst);
  const Instance back = instance_from_json(text);
  CHECK(back.num_requests() == inst.num_requests());
  CHECK(back.num_physical_depots() == inst.num_physical_depots());
  CHECK(back.num_nodes() == inst.num_nodes());
  CHECK(back.params().module_cost_per_period ==
        doctest::Approx(inst.params().module_cost_per_period));
  for (int i = 0; i < inst.num_nodes(); i += 7)
    for (int j = 0; j < inst.num_nodes(); j += 5)
      CHECK(back.distance(i, j) == doctest::Approx(inst.distance(i, j)).epsilon(1e-12));
  CHECK(instance_to_json(back) == text);  // canonical form is stable
}

TEST_CASE("solution files round-trip") {
  const Instance inst = fixtures::line2();
  Solution sol;
  sol.platoons.push_back(fixtures::line2_passenger_platoon(inst));
  sol.unserved = {1};
  const std::string text = solution_to_json(sol, inst);
  const Solution back = solution_from_json(text, inst);
  REQUIRE(back.platoons.size() == 1);
  CHECK(back.platoons[0].origin == sol.platoons[0].origin);
  CHECK(back.platoons[0].destination == sol.platoons[0].destination);
  CHECK(back.platoons[0].visits == sol.platoons[0].visits);
  CHECK(back.platoons[0].config.modules_per_type == sol.platoons[0].config.modules_per_type);
  CHECK(back.unserved == sol.unserved);
  CHECK(evaluate(back, inst).total == doctest::Approx(evaluate(sol, inst).total).epsilon(1e-12));
  CHECK(solution_to_json(back, inst) == text);
}

TEST_CASE("explicit distance matrix overrides coordinates") {
  fixtures::RequestSpec spec;
  spec.pickup_x = 1.0;
  spec.dropoff_x = 2.0;
  using mmp::Node;
  using mmp::NodeKind;
  std::vector<Node> nodes = {
      {0, NodeKind::DepotOrigin, 0.0, 0.0, 0, 0.0, 0.0, 2000.0},
      {1, NodeKind::PassengerPickup, 1.0, 0.0, 1, 0.0, 0.0, 2000.0},
      {2, NodeKind::PassengerDropoff, 2.0, 0.0, -1, 0.0, 0.0, 2000.0},
      {3, NodeKind::DepotDestination, 0.0, 0.0, 0, 0.0, 0.0, 2000.0},
  };
  std::vector<Request> requests = {{0, DemandType::Passenger, 1, 2, 1}};
  Matrix m(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = i == j ? 0.0 : 10.0;
  const Instance inst = build_instance(nodes, requests, ModelParams{}, m);
  CHECK(inst.distance(0, inst.pickup_node(0)) == doctest::Approx(10.0));
  CHECK(inst.travel_time(0, inst.pickup_node(0)) == doctest::Approx(20.0));

  Matrix wrong(3);
  CHECK_THROWS_AS(build_instance(nodes, requests, ModelParams{}, wrong),
                  std::invalid_argument);
}

TEST_CASE("tie-breaking prefers fewer platoons then smaller routes") {
  const Instance inst = fixtures::line2();
  Solution one;
  one.platoons.push_back(fixtures::line2_passenger_platoon(inst));
  one.unserved = {1};
  Solution two = one;
  Platoon extra = two.platoons[0];
  extra.origin = inst.virtual_origin(0, 1);
  extra.destination = inst.paired_destination(extra.origin);
  two.platoons.push_back(extra);

  const CostBreakdown ca = evaluate(one, inst);
  CHECK(better_solution(ca, one, evaluate(two, inst), two));
  CHECK(!better_solution(ca, one, ca, one));
}
