#include "mmp/scenario.hpp"

#include <cmath>
#include <stdexcept>

#include "mmp/schedule.hpp"

namespace mmp {

namespace {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double dist(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Gaussian draw rejected until it falls inside the square area.
Point gaussian_in_area(Rng& rng, const Point& mean, double sigma, double side) {
  for (;;) {
    const double x = rng.normal(mean.x, sigma);
    const double y = rng.normal(mean.y, sigma);
    if (x >= 0.0 && x <= side && y >= 0.0 && y <= side) return {x, y};
  }
}

}  // namespace

std::string class_name(const ScenarioSpec& spec) {
  std::string name = spec.spatial == SpatialPattern::Clustered ? "clustered" : "distributed";
  name += spec.temporal == TemporalPattern::Even ? "-even" : "-peak";
  return name;
}

void apply_class_name(ScenarioSpec& spec, const std::string& name) {
  if (name == "clustered-even") {
    spec.spatial = SpatialPattern::Clustered;
    spec.temporal = TemporalPattern::Even;
  } else if (name == "clustered-peak") {
    spec.spatial = SpatialPattern::Clustered;
    spec.temporal = TemporalPattern::Peak;
  } else if (name == "distributed-even") {
    spec.spatial = SpatialPattern::Distributed;
    spec.temporal = TemporalPattern::Even;
  } else if (name == "distributed-peak") {
    spec.spatial = SpatialPattern::Distributed;
    spec.temporal = TemporalPattern::Peak;
  } else {
    throw std::invalid_argument("unknown scenario class: " + name);
  }
}

std::vector<double> sample_anchor_times(const ScenarioSpec& spec, const ModelParams& params,
                                        Rng& rng) {
  std::vector<double> anchors(spec.n_requests);
  const double start = params.period_start;
  const double end = params.period_end;
  if (spec.temporal == TemporalPattern::Even) {
    for (double& t : anchors) t = rng.uniform(start, end);
  } else {
    const double mid = 0.5 * (start + end);
    for (double& t : anchors) {
      do {
        t = rng.normal(mid, 120.0);
      } while (t < start || t > end);
    }
  }
  return anchors;
}

RequestWindows sample_time_windows(DemandType type, double anchor,
                                   double pickup_to_dropoff_min, const ModelParams& params,
                                   Rng& rng) {
  RequestWindows w;
  if (type == DemandType::Passenger) {
    const double half = rng.uniform(5.0, 20.0);
    w.pickup_open = rng.uniform(anchor - half, anchor + half);
    w.pickup_close = w.pickup_open + half;
    const double drop_half = rng.uniform(5.0, 20.0);
    double open = rng.uniform(w.pickup_open - pickup_to_dropoff_min, w.pickup_open + 60.0);
    // A dropoff window closing before the earliest possible arrival cannot be
    // served at all; lift it to the direct-arrival time.
    if (open + drop_half < w.pickup_open + pickup_to_dropoff_min)
      open = w.pickup_open + pickup_to_dropoff_min;
    w.dropoff_open = open;
    w.dropoff_close = open + drop_half;
  } else {
    w.pickup_open = params.period_start;
    w.pickup_close = params.period_end;
    const double half = rng.uniform(5.0, 20.0);
    w.dropoff_open = rng.uniform(anchor - half, anchor + half);
    w.dropoff_close = w.dropoff_open + half;
  }
  return w;
}

Instance generate(const ScenarioSpec& spec, const ModelParams& params) {
  if (spec.n_requests < 1) throw std::invalid_argument("need at least one request");
  if (spec.n_depots < 1) throw std::invalid_argument("need at least one depot");
  if (spec.area_km <= 0.0) throw std::invalid_argument("area side must be positive");
  if (spec.passenger_share < 0.0 || spec.passenger_share > 1.0)
    throw std::invalid_argument("passenger share must be in [0, 1]");
  for (double cap : params.module_capacity)
    if (cap < 15.0)
      throw std::invalid_argument("module capacity below the maximum demand quantity");

  Rng rng(spec.seed);
  const double side = spec.area_km;
  const Point center{side / 2.0, side / 2.0};
  const double depot_sigma = side / 4.0;
  const double cluster_sigma = 0.5;

  std::vector<Point> depots(spec.n_depots);
  for (Point& d : depots) d = gaussian_in_area(rng, center, depot_sigma, side);

  const int n_r = spec.n_requests;
  const int n_pass = static_cast<int>(std::lround(spec.passenger_share * n_r));

  const auto spread_point = [&](Rng& r) {
    if (spec.spatial == SpatialPattern::Clustered) {
      const Point& around = depots[r.uniform_int(0, spec.n_depots - 1)];
      return gaussian_in_area(r, around, cluster_sigma, side);
    }
    return gaussian_in_area(r, center, depot_sigma, side);
  };

  std::vector<Point> pickup_at(n_r), dropoff_at(n_r);
  std::vector<DemandType> type_of(n_r);
  for (int r = 0; r < n_r; ++r) {
    type_of[r] = r < n_pass ? DemandType::Passenger : DemandType::Freight;
    if (type_of[r] == DemandType::Passenger) {
      pickup_at[r] = spread_point(rng);
    } else {
      pickup_at[r] = depots[rng.uniform_int(0, spec.n_depots - 1)];
    }
    dropoff_at[r] = spread_point(rng);
  }

  std::vector<int> quantity(n_r), pickup_service(n_r), dropoff_service(n_r);
  for (int r = 0; r < n_r; ++r) quantity[r] = rng.uniform_int(1, 15);
  for (int r = 0; r < n_r; ++r) pickup_service[r] = rng.uniform_int(1, 5);
  for (int r = 0; r < n_r; ++r) dropoff_service[r] = rng.uniform_int(1, 5);

  const std::vector<double> anchors = sample_anchor_times(spec, params, rng);

  // Direct single-platoon service from some depot must stay possible; redraw
  // the window tuple until it is.
  std::vector<RequestWindows> windows(n_r);
  for (int r = 0; r < n_r; ++r) {
    const double direct_travel =
        dist(pickup_at[r], dropoff_at[r]) / params.speed_kmh * 60.0 + pickup_service[r];
    bool ok = false;
    for (int attempt = 0; attempt < 10000 && !ok; ++attempt) {
      windows[r] = sample_time_windows(type_of[r], anchors[r], direct_travel, params, rng);
      for (const Point& depot : depots) {
        const double leg_in = dist(depot, pickup_at[r]);
        const double leg_out = dist(dropoff_at[r], depot);
        const double km = leg_in + dist(pickup_at[r], dropoff_at[r]) + leg_out;
        if (km > params.range_km) continue;
        const std::vector<double> tw_open{params.period_start, windows[r].pickup_open,
                                          windows[r].dropoff_open, params.period_start};
        const std::vector<double> tw_close{params.period_end, windows[r].pickup_close,
                                           windows[r].dropoff_close, params.period_end};
        const std::vector<double> travel{
            leg_in / params.speed_kmh * 60.0, direct_travel,
            leg_out / params.speed_kmh * 60.0 + dropoff_service[r]};
        if (schedule_windows(tw_open, tw_close, travel)) {
          ok = true;
          break;
        }
      }
    }
    if (!ok)
      throw std::runtime_error("could not draw serviceable windows for request " +
                               std::to_string(r));
  }

  std::vector<Node> nodes;
  nodes.reserve(2 * spec.n_depots + 2 * n_r);
  int id = 0;
  for (const Point& d : depots) {
    Node nd;
    nd.id = id++;
    nd.kind = NodeKind::DepotOrigin;
    nd.x_km = d.x;
    nd.y_km = d.y;
    nd.tw_open = params.period_start;
    nd.tw_close = params.period_end;
    nodes.push_back(nd);
  }
  for (int r = 0; r < n_r; ++r) {
    Node nd;
    nd.id = id++;
    nd.kind = type_of[r] == DemandType::Passenger ? NodeKind::PassengerPickup
                                                  : NodeKind::FreightPickup;
    nd.x_km = pickup_at[r].x;
    nd.y_km = pickup_at[r].y;
    nd.demand = quantity[r];
    nd.service_min = pickup_service[r];
    nd.tw_open = windows[r].pickup_open;
    nd.tw_close = windows[r].pickup_close;
    nodes.push_back(nd);
  }
  for (int r = 0; r < n_r; ++r) {
    Node nd;
    nd.id = id++;
    nd.kind = type_of[r] == DemandType::Passenger ? NodeKind::PassengerDropoff
                                                  : NodeKind::FreightDropoff;
    nd.x_km = dropoff_at[r].x;
    nd.y_km = dropoff_at[r].y;
    nd.demand = -quantity[r];
    nd.service_min = dropoff_service[r];
    nd.tw_open = windows[r].dropoff_open;
    nd.tw_close = windows[r].dropoff_close;
    nodes.push_back(nd);
  }
  for (const Point& d : depots) {
    Node nd;
    nd.id = id++;
    nd.kind = NodeKind::DepotDestination;
    nd.x_km = d.x;
    nd.y_km = d.y;
    nd.tw_open = params.period_start;
    nd.tw_close = params.period_end;
    nodes.push_back(nd);
  }

  std::vector<Request> requests(n_r);
  for (int r = 0; r < n_r; ++r) {
    requests[r].id = r;
    requests[r].type = type_of[r];
    requests[r].pickup = spec.n_depots + r;
    requests[r].dropoff = spec.n_depots + n_r + r;
    requests[r].quantity = quantity[r];
  }

  return build_instance(nodes, requests, params);
}

}  // namespace mmp
