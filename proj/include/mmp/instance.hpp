#pragma once

#include <optional>
#include <vector>

#include "mmp/types.hpp"

namespace mmp {

// Dense row-major square table for distances and travel times.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int n, double fill = 0.0) : n_(n), cells_(static_cast<size_t>(n) * n, fill) {}

  double operator()(int i, int j) const { return cells_[static_cast<size_t>(i) * n_ + j]; }
  double& operator()(int i, int j) { return cells_[static_cast<size_t>(i) * n_ + j]; }
  int size() const { return n_; }

 private:
  int n_ = 0;
  std::vector<double> cells_;
};

// Built problem instance. Node ids follow the block layout
//   [0, V)                virtual depot origins (V = physical depots * max_platoons,
//                         copy c of depot d sits at d * max_platoons + c)
//   [V, V+R)              pickups, request r at V + r
//   [V+R, V+2R)           dropoffs, request r at V + R + r
//   [V+2R, 2V+2R)         virtual depot destinations, paired origin + V + 2R
// The physical node list (depot origins, pickups, dropoffs, depot destinations)
// is what instance files store; expansion to virtual copies is canonical.
class Instance {
 public:
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_requests() const { return static_cast<int>(requests_.size()); }
  int num_physical_depots() const { return n_depots_; }
  int num_virtual_origins() const { return n_virtual_; }

  bool is_origin(int id) const { return id >= 0 && id < n_virtual_; }
  bool is_pickup(int id) const { return id >= n_virtual_ && id < n_virtual_ + num_requests(); }
  bool is_dropoff(int id) const {
    return id >= n_virtual_ + num_requests() && id < n_virtual_ + 2 * num_requests();
  }
  bool is_destination(int id) const {
    return id >= n_virtual_ + 2 * num_requests() && id < num_nodes();
  }

  int pickup_node(int request) const { return n_virtual_ + request; }
  int dropoff_node(int request) const { return n_virtual_ + num_requests() + request; }
  int request_of(int node) const;  // -1 for depot nodes
  int paired_destination(int origin) const { return origin + n_virtual_ + 2 * num_requests(); }
  int paired_origin(int destination) const { return destination - n_virtual_ - 2 * num_requests(); }
  int physical_depot_of(int virtual_id) const;
  int virtual_origin(int depot, int copy) const { return depot * params_.max_platoons + copy; }

  const Node& node(int id) const { return nodes_[id]; }
  const Request& request(int id) const { return requests_[id]; }
  const std::vector<Request>& requests() const { return requests_; }
  const ModelParams& params() const { return params_; }

  double distance(int i, int j) const { return distance_(i, j); }
  double travel_time(int i, int j) const { return travel_(i, j); }

  const std::vector<Node>& physical_nodes() const { return physical_nodes_; }
  const std::optional<Matrix>& explicit_distance() const { return explicit_distance_; }

 private:
  friend Instance build_instance(const std::vector<Node>&, const std::vector<Request>&,
                                 const ModelParams&, const std::optional<Matrix>&);

  std::vector<Node> nodes_;
  std::vector<Request> requests_;
  std::vector<Node> physical_nodes_;
  std::optional<Matrix> explicit_distance_;
  ModelParams params_;
  Matrix distance_;
  Matrix travel_;
  int n_depots_ = 0;
  int n_virtual_ = 0;
};

// nodes: physical layout (depot origins, pickups, dropoffs, depot destinations
// in that order); requests reference physical pickup/dropoff ids. An explicit
// distance matrix, when given, has physical dimensions and overrides Euclidean
// distances; virtual copies inherit their depot's rows and columns.
Instance build_instance(const std::vector<Node>& nodes, const std::vector<Request>& requests,
                        const ModelParams& params,
                        const std::optional<Matrix>& explicit_distance = std::nullopt);

// Per-km scaling W_p of a platoon with p coupled modules; W_1 = 1, decreasing,
// while W_p * p (total consumption) grows with p.
double platoon_distance_factor(int platoon_len);

// Fleet scaling U_p; a platoon of p modules costs p * U_p module-periods,
// coupled modules discounted by the train incentive eta.
double platoon_fleet_factor(int platoon_len, double eta);

// Smallest horizon constant that deactivates time propagation between any
// node pair: max(0, max_{i,j}(tw_close_i + travel(i,j) - tw_open_j)).
double big_h(const Instance& instance);

struct CapacityCostParams {
  double distance_cost_per_km;   // per travelled km for one module of capacity q
  double module_cost_per_hour;   // per module and hour
};

// Linear cost-estimation model over module capacity (units).
CapacityCostParams capacity_cost_params(double capacity);

// Rescale capacity-dependent params: Q_k, distance cost, module cost per
// period, and the unserved penalty tied to it.
ModelParams with_module_capacity(const ModelParams& params, double capacity);

}  // namespace mmp
