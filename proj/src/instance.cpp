#include "mmp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mmp {

bool is_pickup_kind(NodeKind kind) {
  return kind == NodeKind::PassengerPickup || kind == NodeKind::FreightPickup;
}

bool is_dropoff_kind(NodeKind kind) {
  return kind == NodeKind::PassengerDropoff || kind == NodeKind::FreightDropoff;
}

bool is_depot_kind(NodeKind kind) {
  return kind == NodeKind::DepotOrigin || kind == NodeKind::DepotDestination;
}

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::DepotOrigin: return "depot_origin";
    case NodeKind::DepotDestination: return "depot_destination";
    case NodeKind::PassengerPickup: return "passenger_pickup";
    case NodeKind::PassengerDropoff: return "passenger_dropoff";
    case NodeKind::FreightPickup: return "freight_pickup";
    case NodeKind::FreightDropoff: return "freight_dropoff";
  }
  return "unknown";
}

const char* to_string(DemandType type) {
  return type == DemandType::Passenger ? "passenger" : "freight";
}

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::RequestAssignment: return "request_assignment";
    case ViolationKind::PairSplit: return "pair_split";
    case ViolationKind::Precedence: return "precedence";
    case ViolationKind::DepotEndpoints: return "depot_endpoints";
    case ViolationKind::DepotReuse: return "depot_reuse";
    case ViolationKind::NodeRole: return "node_role";
    case ViolationKind::TimeWindow: return "time_window";
    case ViolationKind::TimeChain: return "time_chain";
    case ViolationKind::Range: return "range";
    case ViolationKind::Capacity: return "capacity";
    case ViolationKind::PlatoonSize: return "platoon_size";
    case ViolationKind::FleetSize: return "fleet_size";
    case ViolationKind::PlatoonCount: return "platoon_count";
    case ViolationKind::EmptyPlatoon: return "empty_platoon";
    case ViolationKind::LoadBalance: return "load_balance";
    case ViolationKind::ScheduleShape: return "schedule_shape";
  }
  return "unknown";
}

int Instance::request_of(int node) const {
  if (is_pickup(node)) return node - n_virtual_;
  if (is_dropoff(node)) return node - n_virtual_ - num_requests();
  return -1;
}

int Instance::physical_depot_of(int virtual_id) const {
  int origin = virtual_id;
  if (is_destination(virtual_id)) origin = paired_origin(virtual_id);
  if (!is_origin(origin)) throw std::invalid_argument("not a depot node");
  return origin / params_.max_platoons;
}

double platoon_distance_factor(int platoon_len) {
  if (platoon_len < 1) throw std::invalid_argument("platoon length must be >= 1");
  const double p = platoon_len;
  return (1.0 + 0.95 * (p - 1.0)) / p;
}

double platoon_fleet_factor(int platoon_len, double eta) {
  if (platoon_len < 1) throw std::invalid_argument("platoon length must be >= 1");
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("train incentive must be in [0, 1]");
  const double p = platoon_len;
  return (1.0 + (1.0 - eta) * (p - 1.0)) / p;
}

double big_h(const Instance& instance) {
  double h = 0.0;
  const int n = instance.num_nodes();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      h = std::max(h, instance.node(i).tw_close + instance.travel_time(i, j) -
                          instance.node(j).tw_open);
    }
  }
  return h;
}

CapacityCostParams capacity_cost_params(double capacity) {
  if (capacity <= 0.0) throw std::invalid_argument("capacity must be positive");
  return {0.003599 * capacity + 0.04162, 0.1753 * capacity + 16.8};
}

ModelParams with_module_capacity(const ModelParams& params, double capacity) {
  const CapacityCostParams cost = capacity_cost_params(capacity);
  ModelParams out = params;
  out.module_capacity = {capacity, capacity};
  const double period_h = (params.period_end - params.period_start) / 60.0;
  out.distance_cost_per_km = cost.distance_cost_per_km;
  out.module_cost_per_period = cost.module_cost_per_hour * period_h;
  // Penalty for one unserved request tracks the module cost times mean demand.
  out.unserved_penalty = out.module_cost_per_period * 8.0;
  return out;
}

namespace {

void validate_params(const ModelParams& p) {
  if (p.speed_kmh <= 0.0) throw std::invalid_argument("speed must be positive");
  if (p.range_km <= 0.0) throw std::invalid_argument("range must be positive");
  if (p.max_modules_per_platoon < 1) throw std::invalid_argument("Z_max must be >= 1");
  if (p.max_platoons < 1) throw std::invalid_argument("max_platoons must be >= 1");
  if (p.train_incentive < 0.0 || p.train_incentive > 1.0)
    throw std::invalid_argument("train incentive must be in [0, 1]");
  for (double q : p.module_capacity)
    if (q <= 0.0) throw std::invalid_argument("module capacity must be positive");
  for (int z : p.max_modules_per_type)
    if (z < 0) throw std::invalid_argument("fleet budget must be >= 0");
  if (p.period_end <= p.period_start) throw std::invalid_argument("empty planning period");
}

double euclid(const Node& a, const Node& b) {
  return std::hypot(a.x_km - b.x_km, a.y_km - b.y_km);
}

}  // namespace

Instance build_instance(const std::vector<Node>& nodes, const std::vector<Request>& requests,
                        const ModelParams& params,
                        const std::optional<Matrix>& explicit_distance) {
  validate_params(params);

  const int n_r = static_cast<int>(requests.size());
  int n_d = 0;
  while (n_d < static_cast<int>(nodes.size()) && nodes[n_d].kind == NodeKind::DepotOrigin) ++n_d;
  if (n_d == 0) throw std::invalid_argument("instance needs at least one depot");
  const int physical_count = 2 * n_d + 2 * n_r;
  if (static_cast<int>(nodes.size()) != physical_count)
    throw std::invalid_argument("node list size does not match depot/request counts");

  // Physical layout: origins, pickups, dropoffs, destinations.
  for (int i = 0; i < physical_count; ++i) {
    const Node& nd = nodes[i];
    if (i >= n_d + 2 * n_r && nd.kind != NodeKind::DepotDestination)
      throw std::invalid_argument("destination block holds a non-depot node");
    if (i >= n_d && i < n_d + n_r && !is_pickup_kind(nd.kind))
      throw std::invalid_argument("pickup block holds node " + std::to_string(i) +
                                  " of kind " + to_string(nd.kind));
    if (i >= n_d + n_r && i < n_d + 2 * n_r && !is_dropoff_kind(nd.kind))
      throw std::invalid_argument("dropoff block holds node " + std::to_string(i) +
                                  " of kind " + to_string(nd.kind));
    if (nd.tw_close < nd.tw_open)
      throw std::invalid_argument("node " + std::to_string(i) + " has an empty time window");
    if (nd.service_min < 0.0) throw std::invalid_argument("negative service time");
  }

  for (const Request& r : requests) {
    if (r.pickup != n_d + r.id || r.dropoff != n_d + n_r + r.id)
      throw std::invalid_argument("request " + std::to_string(r.id) +
                                  " does not follow the pickup/dropoff indexing scheme");
    if (r.quantity <= 0) throw std::invalid_argument("request quantity must be positive");
    const Node& pu = nodes[r.pickup];
    const Node& dl = nodes[r.dropoff];
    if (pu.demand != r.quantity || dl.demand != -r.quantity)
      throw std::invalid_argument("request " + std::to_string(r.id) +
                                  " demand does not balance to zero");
    const bool pass = r.type == DemandType::Passenger;
    if (pass && pu.kind != NodeKind::PassengerPickup)
      throw std::invalid_argument("passenger request with non-passenger pickup node");
    if (!pass && pu.kind != NodeKind::FreightPickup)
      throw std::invalid_argument("freight request with non-freight pickup node");
    if (pass && dl.kind != NodeKind::PassengerDropoff)
      throw std::invalid_argument("passenger request with non-passenger dropoff node");
    if (!pass && dl.kind != NodeKind::FreightDropoff)
      throw std::invalid_argument("freight request with non-freight dropoff node");
  }

  if (explicit_distance && explicit_distance->size() != physical_count)
    throw std::invalid_argument("explicit distance matrix has wrong dimensions");

  Instance inst;
  inst.params_ = params;
  inst.n_depots_ = n_d;
  inst.n_virtual_ = n_d * params.max_platoons;
  inst.physical_nodes_ = nodes;
  inst.explicit_distance_ = explicit_distance;
  inst.requests_ = requests;

  const int v = inst.n_virtual_;
  const int total = 2 * v + 2 * n_r;
  inst.nodes_.resize(total);

  // Map every expanded node to its physical source for coordinates/windows.
  std::vector<int> physical_of(total);
  for (int id = 0; id < total; ++id) {
    int src;
    if (id < v) src = id / params.max_platoons;
    else if (id < v + 2 * n_r) src = n_d + (id - v);
    else src = n_d + 2 * n_r + (id - v - 2 * n_r) / params.max_platoons;
    physical_of[id] = src;
    Node nd = nodes[src];
    nd.id = id;
    inst.nodes_[id] = nd;
  }

  // Requests now reference expanded ids.
  for (Request& r : inst.requests_) {
    r.pickup = inst.pickup_node(r.id);
    r.dropoff = inst.dropoff_node(r.id);
  }

  inst.distance_ = Matrix(total);
  inst.travel_ = Matrix(total);
  for (int i = 0; i < total; ++i) {
    for (int j = 0; j < total; ++j) {
      double d;
      if (explicit_distance) d = (*explicit_distance)(physical_of[i], physical_of[j]);
      else d = euclid(inst.nodes_[i], inst.nodes_[j]);
      inst.distance_(i, j) = d;
      // Travel time carries the service time of the departure node; the
      // diagonal therefore equals the node's own service time.
      inst.travel_(i, j) =
          (i == j ? 0.0 : d / params.speed_kmh * 60.0) + inst.nodes_[i].service_min;
    }
  }
  return inst;
}

}  // namespace mmp
