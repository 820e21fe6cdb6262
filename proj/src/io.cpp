#include "mmp/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "mmp/evaluate.hpp"
#include "mmp/schedule.hpp"

namespace mmp {

using nlohmann::json;

namespace {

NodeKind node_kind_from(const std::string& text) {
  if (text == "depot_origin") return NodeKind::DepotOrigin;
  if (text == "depot_destination") return NodeKind::DepotDestination;
  if (text == "passenger_pickup") return NodeKind::PassengerPickup;
  if (text == "passenger_dropoff") return NodeKind::PassengerDropoff;
  if (text == "freight_pickup") return NodeKind::FreightPickup;
  if (text == "freight_dropoff") return NodeKind::FreightDropoff;
  throw std::invalid_argument("unknown node kind: " + text);
}

DemandType demand_type_from(const std::string& text) {
  if (text == "passenger") return DemandType::Passenger;
  if (text == "freight") return DemandType::Freight;
  throw std::invalid_argument("unknown request type: " + text);
}

json params_to_json(const ModelParams& p) {
  json out;
  out["distance_cost_per_km"] = p.distance_cost_per_km;
  out["module_cost_per_period"] = p.module_cost_per_period;
  out["duration_cost_per_hour"] = p.duration_cost_per_hour;
  out["unserved_penalty"] = p.unserved_penalty;
  out["train_incentive"] = p.train_incentive;
  out["speed_kmh"] = p.speed_kmh;
  out["range_km"] = p.range_km;
  out["max_modules_per_platoon"] = p.max_modules_per_platoon;
  out["max_modules_per_type"] = p.max_modules_per_type;
  out["module_capacity"] = p.module_capacity;
  out["max_platoons"] = p.max_platoons;
  out["planning_period"] = {p.period_start, p.period_end};
  return out;
}

ModelParams params_from_json(const json& in) {
  ModelParams p;
  p.distance_cost_per_km = in.at("distance_cost_per_km").get<double>();
  p.module_cost_per_period = in.at("module_cost_per_period").get<double>();
  p.duration_cost_per_hour = in.at("duration_cost_per_hour").get<double>();
  p.unserved_penalty = in.at("unserved_penalty").get<double>();
  p.train_incentive = in.at("train_incentive").get<double>();
  p.speed_kmh = in.at("speed_kmh").get<double>();
  p.range_km = in.at("range_km").get<double>();
  p.max_modules_per_platoon = in.at("max_modules_per_platoon").get<int>();
  const auto& types = in.at("max_modules_per_type");
  if (types.size() != kNumDemandTypes) throw std::invalid_argument("bad fleet budget array");
  for (int k = 0; k < kNumDemandTypes; ++k) p.max_modules_per_type[k] = types[k].get<int>();
  const auto& caps = in.at("module_capacity");
  if (caps.size() != kNumDemandTypes) throw std::invalid_argument("bad capacity array");
  for (int k = 0; k < kNumDemandTypes; ++k) p.module_capacity[k] = caps[k].get<double>();
  p.max_platoons = in.at("max_platoons").get<int>();
  const auto& period = in.at("planning_period");
  if (period.size() != 2) throw std::invalid_argument("bad planning period");
  p.period_start = period[0].get<double>();
  p.period_end = period[1].get<double>();
  return p;
}

}  // namespace

std::string instance_to_json(const Instance& instance) {
  json out;
  out["format"] = "mmp-instance";
  json nodes = json::array();
  int id = 0;
  for (const Node& nd : instance.physical_nodes()) {
    json row;
    row["id"] = id++;
    row["kind"] = to_string(nd.kind);
    row["x_km"] = nd.x_km;
    row["y_km"] = nd.y_km;
    row["demand"] = nd.demand;
    row["service_min"] = nd.service_min;
    row["tw"] = {nd.tw_open, nd.tw_close};
    nodes.push_back(std::move(row));
  }
  out["nodes"] = std::move(nodes);

  json requests = json::array();
  const int n_d = instance.num_physical_depots();
  const int n_r = instance.num_requests();
  for (const Request& r : instance.requests()) {
    json row;
    row["id"] = r.id;
    row["type"] = to_string(r.type);
    // Physical ids: the expanded pickup/dropoff ids map back by block offset.
    row["pickup"] = n_d + r.id;
    row["dropoff"] = n_d + n_r + r.id;
    row["quantity"] = r.quantity;
    requests.push_back(std::move(row));
  }
  out["requests"] = std::move(requests);
  out["params"] = params_to_json(instance.params());

  if (instance.explicit_distance()) {
    const Matrix& m = *instance.explicit_distance();
    json rows = json::array();
    for (int i = 0; i < m.size(); ++i) {
      json row = json::array();
      for (int j = 0; j < m.size(); ++j) row.push_back(m(i, j));
      rows.push_back(std::move(row));
    }
    out["distance_matrix"] = std::move(rows);
  }
  return out.dump(2) + "\n";
}

Instance instance_from_json(const std::string& text) {
  const json in = json::parse(text);
  if (in.value("format", "") != "mmp-instance")
    throw std::invalid_argument("not an instance file");

  std::vector<Node> nodes;
  for (const json& row : in.at("nodes")) {
    Node nd;
    nd.id = row.at("id").get<int>();
    nd.kind = node_kind_from(row.at("kind").get<std::string>());
    nd.x_km = row.at("x_km").get<double>();
    nd.y_km = row.at("y_km").get<double>();
    nd.demand = row.at("demand").get<int>();
    nd.service_min = row.at("service_min").get<double>();
    const auto& tw = row.at("tw");
    if (tw.size() != 2) throw std::invalid_argument("bad time window");
    nd.tw_open = tw[0].get<double>();
    nd.tw_close = tw[1].get<double>();
    if (nd.id != static_cast<int>(nodes.size()))
      throw std::invalid_argument("node ids must be consecutive from 0");
    nodes.push_back(nd);
  }

  std::vector<Request> requests;
  for (const json& row : in.at("requests")) {
    Request r;
    r.id = row.at("id").get<int>();
    r.type = demand_type_from(row.at("type").get<std::string>());
    r.pickup = row.at("pickup").get<int>();
    r.dropoff = row.at("dropoff").get<int>();
    r.quantity = row.at("quantity").get<int>();
    if (r.id != static_cast<int>(requests.size()))
      throw std::invalid_argument("request ids must be consecutive from 0");
    requests.push_back(r);
  }

  const ModelParams params = params_from_json(in.at("params"));

  std::optional<Matrix> explicit_distance;
  if (in.contains("distance_matrix")) {
    const json& rows = in.at("distance_matrix");
    Matrix m(static_cast<int>(rows.size()));
    if (m.size() != static_cast<int>(nodes.size()))
      throw std::invalid_argument("distance matrix does not match node count");
    for (int i = 0; i < m.size(); ++i) {
      if (static_cast<int>(rows[i].size()) != m.size())
        throw std::invalid_argument("distance matrix is not square");
      for (int j = 0; j < m.size(); ++j) m(i, j) = rows[i][j].get<double>();
    }
    explicit_distance = std::move(m);
  }

  return build_instance(nodes, requests, params, explicit_distance);
}

std::string solution_to_json(const Solution& solution, const Instance& instance) {
  json out;
  out["format"] = "mmp-solution";
  json platoons = json::array();
  for (const Platoon& pl : solution.platoons) {
    json row;
    row["modules_per_type"] = pl.config.modules_per_type;
    row["origin"] = pl.origin;
    row["visits"] = pl.visits;
    row["arrivals"] = pl.arrival_times;
    platoons.push_back(std::move(row));
  }
  out["platoons"] = std::move(platoons);
  out["unserved"] = solution.unserved;
  const CostBreakdown cost = evaluate(solution, instance);
  out["cost"] = {{"distance", cost.distance},
                 {"fleet", cost.fleet},
                 {"duration", cost.duration},
                 {"unserved", cost.unserved},
                 {"total", cost.total}};
  return out.dump(2) + "\n";
}

Solution solution_from_json(const std::string& text, const Instance& instance) {
  const json in = json::parse(text);
  if (in.value("format", "") != "mmp-solution")
    throw std::invalid_argument("not a solution file");
  Solution solution;
  for (const json& row : in.at("platoons")) {
    Platoon pl;
    const auto& modules = row.at("modules_per_type");
    if (modules.size() != kNumDemandTypes) throw std::invalid_argument("bad module array");
    for (int k = 0; k < kNumDemandTypes; ++k)
      pl.config.modules_per_type[k] = modules[k].get<int>();
    pl.origin = row.at("origin").get<int>();
    if (!instance.is_origin(pl.origin))
      throw std::invalid_argument("platoon origin is not a depot origin node");
    pl.destination = instance.paired_destination(pl.origin);
    pl.visits = row.at("visits").get<std::vector<int>>();
    pl.arrival_times = row.at("arrivals").get<std::vector<double>>();
    solution.platoons.push_back(std::move(pl));
  }
  solution.unserved = in.at("unserved").get<std::vector<int>>();
  return solution;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void save_instance(const Instance& instance, const std::filesystem::path& path) {
  write_text_file(path, instance_to_json(instance));
}

Instance load_instance(const std::filesystem::path& path) {
  return instance_from_json(read_text_file(path));
}

void save_solution(const Solution& solution, const Instance& instance,
                   const std::filesystem::path& path) {
  write_text_file(path, solution_to_json(solution, instance));
}

Solution load_solution(const std::filesystem::path& path, const Instance& instance) {
  return solution_from_json(read_text_file(path), instance);
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

}  // namespace mmp
