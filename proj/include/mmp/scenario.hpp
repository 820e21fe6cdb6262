#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmp/instance.hpp"
#include "mmp/rng.hpp"
#include "mmp/types.hpp"

namespace mmp {

enum class SpatialPattern : int { Clustered = 0, Distributed = 1 };
enum class TemporalPattern : int { Even = 0, Peak = 1 };

struct ScenarioSpec {
  int n_requests = 80;
  int n_depots = 5;
  double area_km = 3.5;  // square side length
  SpatialPattern spatial = SpatialPattern::Clustered;
  TemporalPattern temporal = TemporalPattern::Even;
  double passenger_share = 0.5;
  std::uint64_t seed = 1;
};

// "clustered-even", "clustered-peak", "distributed-even", "distributed-peak".
std::string class_name(const ScenarioSpec& spec);
void apply_class_name(ScenarioSpec& spec, const std::string& name);

// Desired arrival anchors, one per request: uniform over the planning period
// (Even) or truncated normal around its midpoint with 120 min deviation (Peak).
std::vector<double> sample_anchor_times(const ScenarioSpec& spec, const ModelParams& params,
                                        Rng& rng);

struct RequestWindows {
  double pickup_open = 0.0;
  double pickup_close = 0.0;
  double dropoff_open = 0.0;
  double dropoff_close = 0.0;
};

// Windows around an anchor. Passengers get a tight pickup window (half-width
// U(5,20)) and a dropoff opening drawn up to 60 min after the pickup opening;
// freight may be collected all period but must arrive in a tight window.
// pickup_to_dropoff_min is the direct travel time including pickup service.
RequestWindows sample_time_windows(DemandType type, double anchor,
                                   double pickup_to_dropoff_min, const ModelParams& params,
                                   Rng& rng);

// Random instance: depot and request locations per the spatial pattern, demand
// U{1..15}, service U{1..5} min, windows per the temporal pattern. Every
// request is guaranteed directly serviceable by a single-module platoon from
// at least one depot (windows are redrawn until that holds).
Instance generate(const ScenarioSpec& spec, const ModelParams& params);

}  // namespace mmp
