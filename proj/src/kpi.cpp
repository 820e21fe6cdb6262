#include "mmp/kpi.hpp"

#include <json.hpp>

#include "mmp/evaluate.hpp"
#include "mmp/io.hpp"
#include "mmp/schedule.hpp"

namespace mmp {

KpiReport compute_kpis(const Solution& solution, const Instance& instance) {
  KpiReport report;
  report.cost = evaluate(solution, instance);
  report.n_platoons = static_cast<int>(solution.platoons.size());
  report.n_unserved = static_cast<int>(solution.unserved.size());
  report.n_served = instance.num_requests() - report.n_unserved;

  double request_km_sum = 0.0;
  double request_min_sum = 0.0;
  for (const Platoon& pl : solution.platoons) {
    for (int k = 0; k < kNumDemandTypes; ++k)
      report.modules_per_type[k] += pl.config.modules_per_type[k];

    const std::vector<int> seq = full_sequence(pl);
    const LoadCheck loads = propagate_loads(pl, instance);
    report.total_duration_min += route_duration_min(pl);
    for (size_t p = 0; p + 1 < seq.size(); ++p) {
      const double leg = instance.distance(seq[p], seq[p + 1]);
      report.platoon_km += leg;
      if (loads.loads[p][0] + loads.loads[p][1] == 0) report.empty_km += leg;
    }

    for (size_t p = 0; p < pl.visits.size(); ++p) {
      const int node = pl.visits[p];
      if (!instance.is_pickup(node)) continue;
      const int r = instance.request_of(node);
      report.served_requests_per_type[static_cast<int>(instance.request(r).type)] += 1;
      report.served_units += instance.request(r).quantity;
      size_t drop = p + 1;
      while (drop < pl.visits.size() && pl.visits[drop] != instance.dropoff_node(r)) ++drop;
      if (drop >= pl.visits.size()) continue;  // malformed pair, skip its mileage
      for (size_t q = p; q < drop; ++q)
        request_km_sum += instance.distance(pl.visits[q], pl.visits[q + 1]);
      request_min_sum += pl.arrival_times[drop + 1] - pl.arrival_times[p + 1];
    }
  }
  report.total_modules = report.modules_per_type[0] + report.modules_per_type[1];

  double capacity = 0.0;
  for (int k = 0; k < kNumDemandTypes; ++k)
    capacity += instance.params().module_capacity[k] * report.modules_per_type[k];

  if (report.n_platoons > 0)
    report.avg_platoon_length = static_cast<double>(report.total_modules) / report.n_platoons;
  if (report.platoon_km > 0.0) {
    report.empty_km_share = report.empty_km / report.platoon_km;
    report.load_per_platoon_km = report.served_units / report.platoon_km;
  }
  if (capacity > 0.0) report.fill_rate = report.served_units / capacity;
  if (report.n_served > 0) {
    report.avg_request_km = request_km_sum / report.n_served;
    report.avg_request_min = request_min_sum / report.n_served;
  }
  return report;
}

std::string kpi_csv_header() {
  return "total_cost,distance_cost,fleet_cost,duration_cost,unserved_cost,"
         "n_platoons,total_modules,modules_passenger,modules_freight,"
         "n_served,n_unserved,served_passenger,served_freight,served_units,"
         "fill_rate,platoon_km,empty_km,empty_km_share,avg_platoon_length,"
         "load_per_platoon_km,avg_request_km,avg_request_min,total_duration_min";
}

std::string kpi_csv_row(const KpiReport& r) {
  std::string out;
  const auto num = [&](double v) {
    out += format_double(v);
    out += ',';
  };
  const auto count = [&](int v) {
    out += std::to_string(v);
    out += ',';
  };
  num(r.cost.total);
  num(r.cost.distance);
  num(r.cost.fleet);
  num(r.cost.duration);
  num(r.cost.unserved);
  count(r.n_platoons);
  count(r.total_modules);
  count(r.modules_per_type[0]);
  count(r.modules_per_type[1]);
  count(r.n_served);
  count(r.n_unserved);
  count(r.served_requests_per_type[0]);
  count(r.served_requests_per_type[1]);
  num(r.served_units);
  num(r.fill_rate);
  num(r.platoon_km);
  num(r.empty_km);
  num(r.empty_km_share);
  num(r.avg_platoon_length);
  num(r.load_per_platoon_km);
  num(r.avg_request_km);
  num(r.avg_request_min);
  out += format_double(r.total_duration_min);
  return out;
}

std::string kpi_to_json(const KpiReport& r) {
  nlohmann::json j;
  j["cost"] = {{"distance", r.cost.distance},
               {"fleet", r.cost.fleet},
               {"duration", r.cost.duration},
               {"unserved", r.cost.unserved},
               {"total", r.cost.total}};
  j["n_platoons"] = r.n_platoons;
  j["n_served"] = r.n_served;
  j["n_unserved"] = r.n_unserved;
  j["served_requests_per_type"] = r.served_requests_per_type;
  j["modules_per_type"] = r.modules_per_type;
  j["total_modules"] = r.total_modules;
  j["served_units"] = r.served_units;
  j["avg_platoon_length"] = r.avg_platoon_length;
  j["platoon_km"] = r.platoon_km;
  j["empty_km"] = r.empty_km;
  j["empty_km_share"] = r.empty_km_share;
  j["fill_rate"] = r.fill_rate;
  j["load_per_platoon_km"] = r.load_per_platoon_km;
  j["avg_request_km"] = r.avg_request_km;
  j["avg_request_min"] = r.avg_request_min;
  j["total_duration_min"] = r.total_duration_min;
  return j.dump(2) + "\n";
}

}  // namespace mmp
