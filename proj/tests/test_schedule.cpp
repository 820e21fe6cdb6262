#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <optional>
#include <vector>

#include "fixtures.hpp"
#include "mmp/alns.hpp"
#include "mmp/rng.hpp"
#include "mmp/scenario.hpp"
#include "mmp/schedule.hpp"
#include "oracles.hpp"

using namespace mmp;

TEST_CASE("waiting pulls earlier arrivals forward up to the window slack") {
  // Stop 1 closes at 10, stop 2 opens at 50; a 40 minute wait appears and only
  // 5 minutes of it can be absorbed by leaving later.
  const std::vector<double> open{0.0, 0.0, 50.0};
  const std::vector<double> close{100.0, 10.0, 60.0};
  const std::vector<double> travel{5.0, 5.0};
  const auto times = schedule_windows(open, close, travel);
  REQUIRE(times.has_value());
  CHECK((*times)[0] == doctest::Approx(5.0));
  CHECK((*times)[1] == doctest::Approx(10.0));
  CHECK((*times)[2] == doctest::Approx(50.0));
  CHECK(times->back() - times->front() == doctest::Approx(45.0));
}

TEST_CASE("departure clamps into the first window") {
  // Launching at the second stop's opening would mean leaving before the
  // depot opens; departure clamps up and the platoon waits downstream.
  const std::vector<double> open{20.0, 0.0};
  const std::vector<double> close{100.0, 200.0};
  const std::vector<double> travel{10.0};
  const auto times = schedule_windows(open, close, travel);
  REQUIRE(times.has_value());
  CHECK((*times)[0] == doctest::Approx(20.0));
  CHECK((*times)[1] == doctest::Approx(30.0));
}

TEST_CASE("infeasible chains are rejected") {
  CHECK(!schedule_windows({0.0, 0.0}, {10.0, 5.0}, {20.0}).has_value());
  CHECK(!schedule_windows({0.0, 90.0, 0.0}, {10.0, 100.0, 50.0}, {5.0, 5.0}).has_value());
}

TEST_CASE("scheduler matches exhaustive departure enumeration") {
  Rng rng(42);
  int feasible_seen = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = rng.uniform_int(2, 8);
    std::vector<double> open(n), close(n), travel(n - 1);
    for (int k = 0; k < n; ++k) {
      open[k] = rng.uniform(0.0, 200.0);
      close[k] = open[k] + rng.uniform(5.0, 60.0);
    }
    for (int k = 0; k + 1 < n; ++k) travel[k] = rng.uniform(0.0, 30.0);

    const auto got = schedule_windows(open, close, travel);
    const auto want = oracle::min_duration(open, close, travel);
    REQUIRE(got.has_value() == want.has_value());
    if (!got) continue;
    ++feasible_seen;
    CHECK(got->back() - got->front() == doctest::Approx(*want).epsilon(1e-9));
    for (int k = 0; k < n; ++k) {
      CHECK((*got)[k] >= open[k] - kTimeTol);
      CHECK((*got)[k] <= close[k] + kTimeTol);
      if (k > 0) CHECK((*got)[k] >= (*got)[k - 1] + travel[k - 1] - kTimeTol);
    }
  }
  CHECK(feasible_seen > 50);  // the generator must exercise both outcomes
  CHECK(feasible_seen < 450);
}

TEST_CASE("scheduler is duration-minimal on generated routes") {
  ScenarioSpec spec;
  spec.n_requests = 16;
  spec.n_depots = 2;
  spec.seed = 7;
  const Instance inst = generate(spec, ModelParams{});

  Solution sol;
  Rng rng(3);
  RemovalLog log;
  for (int r = 0; r < inst.num_requests(); ++r) sol.unserved.push_back(r);
  best_insert(sol, inst, rng, log);
  REQUIRE(!sol.platoons.empty());

  for (const Platoon& pl : sol.platoons) {
    const std::vector<int> seq = full_sequence(pl);
    std::vector<double> open, close, travel;
    for (int node : seq) {
      open.push_back(inst.node(node).tw_open);
      close.push_back(inst.node(node).tw_close);
    }
    for (size_t k = 0; k + 1 < seq.size(); ++k)
      travel.push_back(inst.travel_time(seq[k], seq[k + 1]));
    const auto want = oracle::min_duration(open, close, travel);
    REQUIRE(want.has_value());
    CHECK(route_duration_min(pl) == doctest::Approx(*want).epsilon(1e-9));
  }
}

TEST_CASE("arrival times for a full platoon sequence") {
  const Instance inst = fixtures::line2();
  Platoon pl = fixtures::line2_passenger_platoon(inst);
  const auto times = compute_arrival_times(full_sequence(pl), inst);
  REQUIRE(times.has_value());
  CHECK(*times == std::vector<double>{0.0, 2.0, 6.0, 11.0});

  pl.arrival_times.clear();
  REQUIRE(refresh_platoon(pl, inst));
  CHECK(pl.arrival_times == *times);
}

TEST_CASE("refresh leaves the platoon untouched on failure") {
  fixtures::RequestSpec late;
  late.pickup_open = 900.0;
  late.pickup_close = 910.0;
  fixtures::RequestSpec early;
  early.dropoff_open = 0.0;
  early.dropoff_close = 10.0;
  early.pickup_x = 30.0;  // an hour out, cannot reach the dropoff by minute 10
  early.dropoff_x = 30.0;
  const Instance inst = fixtures::build({{0.0, 0.0}}, {late, early});

  Platoon pl;
  pl.config.modules_per_type = {2, 0};
  pl.origin = inst.virtual_origin(0, 0);
  pl.destination = inst.paired_destination(pl.origin);
  pl.visits = {inst.pickup_node(1), inst.dropoff_node(1)};
  pl.arrival_times = {1.0, 2.0, 3.0, 4.0};
  const std::vector<double> before = pl.arrival_times;
  CHECK(!refresh_platoon(pl, inst));
  CHECK(pl.arrival_times == before);
}

TEST_CASE("loads accumulate per type and respect capacity") {
  const Instance inst = fixtures::line2();

  Platoon pl = fixtures::line2_passenger_platoon(inst);
  LoadCheck check = propagate_loads(pl, inst);
  CHECK(check.ok);
  REQUIRE(check.loads.size() == 4);
  CHECK(check.loads[0] == TypeCount{0, 0});
  CHECK(check.loads[1] == TypeCount{3, 0});
  CHECK(check.loads[2] == TypeCount{0, 0});
  CHECK(check.loads[3] == TypeCount{0, 0});

  // The freight order needs 20 units; one module holds 15.
  Platoon freight;
  freight.config.modules_per_type = {0, 1};
  freight.origin = inst.virtual_origin(0, 1);
  freight.destination = inst.paired_destination(freight.origin);
  freight.visits = {inst.pickup_node(1), inst.dropoff_node(1)};
  REQUIRE(refresh_platoon(freight, inst));
  check = propagate_loads(freight, inst);
  CHECK(!check.ok);
  CHECK(check.violation_visit == 1);
  CHECK(check.violation_type == static_cast<int>(DemandType::Freight));

  freight.config.modules_per_type = {0, 2};
  CHECK(propagate_loads(freight, inst).ok);
}

TEST_CASE("minimal module count covers peak loads per type") {
  const Instance inst = fixtures::line2();
  CHECK(min_config_for_visits({inst.pickup_node(0), inst.dropoff_node(0)}, inst) ==
        TypeCount{1, 0});
  CHECK(min_config_for_visits({inst.pickup_node(1), inst.dropoff_node(1)}, inst) ==
        TypeCount{0, 2});
  CHECK(min_config_for_visits({inst.pickup_node(0), inst.pickup_node(1), inst.dropoff_node(0),
                               inst.dropoff_node(1)},
                              inst) == TypeCount{1, 2});
  CHECK(min_config_for_visits({}, inst) == TypeCount{0, 0});
}

TEST_CASE("route length sums the full loop") {
  const Instance inst = fixtures::line2();
  const Platoon pl = fixtures::line2_passenger_platoon(inst);
  CHECK(route_km(pl, inst) == doctest::Approx(4.0));
  const std::vector<int> seq = full_sequence(pl);
  CHECK(seq == std::vector<int>{pl.origin, inst.pickup_node(0), inst.dropoff_node(0),
                                pl.destination});
}
