#pragma once

#include <string>

#include "mmp/instance.hpp"
#include "mmp/types.hpp"

namespace mmp {

struct KpiReport {
  CostBreakdown cost{};
  int n_platoons = 0;
  int n_served = 0;
  int n_unserved = 0;
  TypeCount served_requests_per_type{0, 0};
  TypeCount modules_per_type{0, 0};
  int total_modules = 0;
  double served_units = 0.0;
  double avg_platoon_length = 0.0;  // deployed modules per platoon
  double platoon_km = 0.0;
  double empty_km = 0.0;            // legs driven with nothing on board
  double empty_km_share = 0.0;
  double fill_rate = 0.0;           // served units over deployed capacity
  double load_per_platoon_km = 0.0;
  double avg_request_km = 0.0;      // along-route pickup-to-dropoff distance
  double avg_request_min = 0.0;     // scheduled pickup-to-dropoff time
  double total_duration_min = 0.0;
};

KpiReport compute_kpis(const Solution& solution, const Instance& instance);

// Header and row share one fixed column order so rows from different
// reports can be concatenated into a single table.
std::string kpi_csv_header();
std::string kpi_csv_row(const KpiReport& report);
std::string kpi_to_json(const KpiReport& report);

}  // namespace mmp
