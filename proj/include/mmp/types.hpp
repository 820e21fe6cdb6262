#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace mmp {

// Demand types. Modules are single-type; a platoon may mix module types.
inline constexpr int kNumDemandTypes = 2;
enum class DemandType : int { Passenger = 0, Freight = 1 };

using TypeCount = std::array<int, kNumDemandTypes>;

enum class NodeKind : int {
  DepotOrigin = 0,
  DepotDestination,
  PassengerPickup,
  PassengerDropoff,
  FreightPickup,
  FreightDropoff,
};

bool is_pickup_kind(NodeKind kind);
bool is_dropoff_kind(NodeKind kind);
bool is_depot_kind(NodeKind kind);

struct Node {
  int id = -1;
  NodeKind kind = NodeKind::DepotOrigin;
  double x_km = 0.0;
  double y_km = 0.0;
  int demand = 0;          // positive at pickups, negative mirror at dropoffs
  double service_min = 0.0;
  double tw_open = 0.0;    // minutes since midnight
  double tw_close = 0.0;
};

struct Request {
  int id = -1;
  DemandType type = DemandType::Passenger;
  int pickup = -1;   // node id
  int dropoff = -1;  // node id
  int quantity = 0;  // units, shared by pickup (+q) and dropoff (-q)
};

// Cost and fleet parameters. Module-count dependent coefficients live in
// platoon_distance_factor / platoon_fleet_factor.
struct ModelParams {
  double distance_cost_per_km = 0.096;      // per travelled km, scaled by distance factor
  double module_cost_per_period = 309.92;   // per deployed module for the planning period
  double duration_cost_per_hour = 6.9;      // driver cost per route hour
  double unserved_penalty = 2479.36;        // per unserved request
  double train_incentive = 0.6;             // eta in [0, 1], discount for coupled modules
  double speed_kmh = 30.0;
  double range_km = 200.0;                  // max route length per platoon
  int max_modules_per_platoon = 10;         // Z_max
  TypeCount max_modules_per_type{10, 10};   // Z_k fleet budget
  std::array<double, kNumDemandTypes> module_capacity{15.0, 15.0};  // Q_k
  int max_platoons = 20;                    // trips per planning period
  double period_start = 360.0;              // 06:00
  double period_end = 1320.0;               // 22:00
};

struct PlatoonConfig {
  TypeCount modules_per_type{0, 0};

  int total() const { return modules_per_type[0] + modules_per_type[1]; }
};

// One platoon trip: a depot pair plus an ordered request-node sequence.
// arrival_times covers origin, visits..., destination (visits.size() + 2).
struct Platoon {
  PlatoonConfig config;
  int origin = -1;
  int destination = -1;
  std::vector<int> visits;
  std::vector<double> arrival_times;
};

struct Solution {
  std::vector<Platoon> platoons;
  std::vector<int> unserved;  // request ids, kept sorted
};

struct CostBreakdown {
  double distance = 0.0;
  double fleet = 0.0;
  double duration = 0.0;
  double unserved = 0.0;
  double total = 0.0;
};

enum class ViolationKind : int {
  RequestAssignment,  // request served more than once, or neither served nor unserved
  PairSplit,          // pickup and dropoff in different platoons
  Precedence,         // dropoff visited before its pickup
  DepotEndpoints,     // origin/destination not a matching virtual depot pair
  DepotReuse,         // virtual origin used by more than one platoon
  NodeRole,           // depot node inside visits, duplicate or unknown node
  TimeWindow,
  TimeChain,          // consecutive arrivals closer than the travel time
  Range,
  Capacity,
  PlatoonSize,        // platoon length outside [1, Z_max]
  FleetSize,          // per-type module budget exceeded
  PlatoonCount,       // more platoons than allowed trips
  EmptyPlatoon,
  LoadBalance,        // onboard load not zero at the destination
  ScheduleShape,      // arrival vector malformed
};

struct Violation {
  ViolationKind kind;
  int platoon = -1;  // index into Solution::platoons, -1 if solution-level
  int node = -1;     // offending node or request id where meaningful
  std::string detail;
};

const char* to_string(ViolationKind kind);
const char* to_string(NodeKind kind);
const char* to_string(DemandType type);

// Feasibility comparisons on times/loads use one shared tolerance (minutes).
inline constexpr double kTimeTol = 1e-6;

}  // namespace mmp
