#include "mmp/schedule.hpp"

#include <algorithm>
#include <cmath>

namespace mmp {

std::optional<std::vector<double>> schedule_windows(const std::vector<double>& tw_open,
                                                    const std::vector<double>& tw_close,
                                                    const std::vector<double>& travel) {
  const int n = static_cast<int>(tw_open.size());
  if (n < 2) return std::nullopt;

  std::vector<double> s(n);
  double depart = tw_open[1] - travel[0];
  depart = std::min(depart, tw_close[0]);
  depart = std::max(depart, tw_open[0]);
  s[0] = depart;

  for (int i = 1; i < n; ++i) {
    s[i] = s[i - 1] + travel[i - 1];
    if (s[i] > tw_close[i] + kTimeTol) return std::nullopt;
    if (s[i] < tw_open[i]) {
      // Waiting: push the whole prefix forward as far as its windows allow.
      double slack = tw_open[i] - s[i];
      for (int u = 0; u < i; ++u) slack = std::min(slack, tw_close[u] - s[u]);
      if (slack > 0.0) {
        for (int u = 0; u <= i; ++u) s[u] += slack;
      }
      if (s[i] < tw_open[i]) s[i] = tw_open[i];
    }
  }
  return s;
}

std::optional<std::vector<double>> compute_arrival_times(const std::vector<int>& sequence,
                                                         const Instance& instance) {
  const int n = static_cast<int>(sequence.size());
  if (n < 2) return std::nullopt;
  std::vector<double> tw_open(n), tw_close(n), travel(n - 1);
  for (int i = 0; i < n; ++i) {
    const Node& nd = instance.node(sequence[i]);
    tw_open[i] = nd.tw_open;
    tw_close[i] = nd.tw_close;
    if (i + 1 < n) travel[i] = instance.travel_time(sequence[i], sequence[i + 1]);
  }
  return schedule_windows(tw_open, tw_close, travel);
}

std::vector<int> full_sequence(const Platoon& platoon) {
  std::vector<int> seq;
  seq.reserve(platoon.visits.size() + 2);
  seq.push_back(platoon.origin);
  seq.insert(seq.end(), platoon.visits.begin(), platoon.visits.end());
  seq.push_back(platoon.destination);
  return seq;
}

double route_km(const Platoon& platoon, const Instance& instance) {
  const std::vector<int> seq = full_sequence(platoon);
  double km = 0.0;
  for (size_t i = 0; i + 1 < seq.size(); ++i) km += instance.distance(seq[i], seq[i + 1]);
  return km;
}

LoadCheck propagate_loads(const Platoon& platoon, const Instance& instance) {
  LoadCheck result;
  result.loads.assign(platoon.visits.size() + 2, TypeCount{0, 0});
  TypeCount load{0, 0};
  const ModelParams& params = instance.params();
  for (size_t i = 0; i < platoon.visits.size(); ++i) {
    const int node = platoon.visits[i];
    const int request = instance.request_of(node);
    if (request >= 0) {
      const int k = static_cast<int>(instance.request(request).type);
      load[k] += instance.node(node).demand;
      const double cap = params.module_capacity[k] * platoon.config.modules_per_type[k];
      if (load[k] > cap + kTimeTol || load[k] < 0) {
        if (result.ok) {
          result.ok = false;
          result.violation_visit = static_cast<int>(i) + 1;
          result.violation_type = k;
        }
      }
    }
    result.loads[i + 1] = load;
  }
  result.loads.back() = load;
  if (result.ok && (load[0] != 0 || load[1] != 0)) {
    result.ok = false;
    result.violation_visit = static_cast<int>(platoon.visits.size()) + 1;
    result.violation_type = load[0] != 0 ? 0 : 1;
  }
  return result;
}

TypeCount min_config_for_visits(const std::vector<int>& visits, const Instance& instance) {
  TypeCount load{0, 0};
  std::array<int, kNumDemandTypes> peak{0, 0};
  for (int node : visits) {
    const int request = instance.request_of(node);
    if (request < 0) continue;
    const int k = static_cast<int>(instance.request(request).type);
    load[k] += instance.node(node).demand;
    peak[k] = std::max(peak[k], load[k]);
  }
  TypeCount config{0, 0};
  for (int k = 0; k < kNumDemandTypes; ++k) {
    const double cap = instance.params().module_capacity[k];
    config[k] = peak[k] > 0 ? static_cast<int>(std::ceil(static_cast<double>(peak[k]) / cap))
                            : 0;
  }
  return config;
}

bool refresh_platoon(Platoon& platoon, const Instance& instance) {
  const auto times = compute_arrival_times(full_sequence(platoon), instance);
  if (!times) return false;
  platoon.arrival_times = *times;
  return true;
}

}  // namespace mmp
