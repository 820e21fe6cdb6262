#pragma once

// Hand-built instances with round coordinates so expected costs and
// schedules can be worked out by hand.

#include <vector>

#include "mmp/instance.hpp"
#include "mmp/types.hpp"

namespace fixtures {

struct RequestSpec {
  mmp::DemandType type = mmp::DemandType::Passenger;
  double pickup_x = 0.0, pickup_y = 0.0;
  double dropoff_x = 0.0, dropoff_y = 0.0;
  int quantity = 1;
  double pickup_service = 0.0, dropoff_service = 0.0;
  double pickup_open = 0.0, pickup_close = 1000.0;
  double dropoff_open = 0.0, dropoff_close = 1000.0;
};

inline mmp::Instance build(const std::vector<std::pair<double, double>>& depots,
                           const std::vector<RequestSpec>& specs,
                           mmp::ModelParams params = {}) {
  using mmp::Node;
  using mmp::NodeKind;
  const int n_d = static_cast<int>(depots.size());
  const int n_r = static_cast<int>(specs.size());
  std::vector<Node> nodes;
  int id = 0;
  for (const auto& [x, y] : depots)
    nodes.push_back({id++, NodeKind::DepotOrigin, x, y, 0, 0.0, 0.0, 2000.0});
  for (const RequestSpec& s : specs) {
    const bool pass = s.type == mmp::DemandType::Passenger;
    nodes.push_back({id++, pass ? NodeKind::PassengerPickup : NodeKind::FreightPickup,
                     s.pickup_x, s.pickup_y, s.quantity, s.pickup_service, s.pickup_open,
                     s.pickup_close});
  }
  for (const RequestSpec& s : specs) {
    const bool pass = s.type == mmp::DemandType::Passenger;
    nodes.push_back({id++, pass ? NodeKind::PassengerDropoff : NodeKind::FreightDropoff,
                     s.dropoff_x, s.dropoff_y, -s.quantity, s.dropoff_service, s.dropoff_open,
                     s.dropoff_close});
  }
  for (const auto& [x, y] : depots)
    nodes.push_back({id++, NodeKind::DepotDestination, x, y, 0, 0.0, 0.0, 2000.0});

  std::vector<mmp::Request> requests;
  for (int r = 0; r < n_r; ++r)
    requests.push_back({r, specs[r].type, n_d + r, n_d + n_r + r, specs[r].quantity});
  return mmp::build_instance(nodes, requests, params);
}

// One depot at the origin, two requests strung out along the x axis: a
// passenger triple at 1->2 km and an oversized freight order (two modules)
// at 3->4 km. All windows wide open.
inline mmp::Instance line2() {
  RequestSpec passenger;
  passenger.type = mmp::DemandType::Passenger;
  passenger.pickup_x = 1.0;
  passenger.dropoff_x = 2.0;
  passenger.quantity = 3;
  passenger.pickup_service = 2.0;
  passenger.dropoff_service = 1.0;
  RequestSpec freight;
  freight.type = mmp::DemandType::Freight;
  freight.pickup_x = 3.0;
  freight.dropoff_x = 4.0;
  freight.quantity = 20;
  return build({{0.0, 0.0}}, {passenger, freight});
}

// Serves only the passenger request of line2 with a single module.
inline mmp::Platoon line2_passenger_platoon(const mmp::Instance& instance) {
  mmp::Platoon pl;
  pl.config.modules_per_type = {1, 0};
  pl.origin = instance.virtual_origin(0, 0);
  pl.destination = instance.paired_destination(pl.origin);
  pl.visits = {instance.pickup_node(0), instance.dropoff_node(0)};
  pl.arrival_times = {0.0, 2.0, 6.0, 11.0};
  return pl;
}

}  // namespace fixtures
