#include "mmp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "mmp/evaluate.hpp"
#include "mmp/feasibility.hpp"
#include "mmp/io.hpp"
#include "mmp/rng.hpp"
#include "mmp/schedule.hpp"

namespace mmp {

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Stored requests point at expanded node ids; builders expect physical ones.
std::vector<Request> physical_requests(const Instance& instance) {
  const int n_d = instance.num_physical_depots();
  const int n_r = instance.num_requests();
  std::vector<Request> out(instance.requests());
  for (Request& r : out) {
    r.pickup = n_d + r.id;
    r.dropoff = n_d + n_r + r.id;
  }
  return out;
}

void insert_sorted_unique(std::vector<int>& values, int value) {
  auto it = std::lower_bound(values.begin(), values.end(), value);
  if (it == values.end() || *it != value) values.insert(it, value);
}

}  // namespace

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::Conventional: return "conventional";
    case Mode::ModularSeparated: return "modular_separated";
    case Mode::ModularConsolidated: return "modular_consolidated";
  }
  return "unknown";
}

Mode mode_from_name(const std::string& name) {
  if (name == "conventional") return Mode::Conventional;
  if (name == "modular_separated") return Mode::ModularSeparated;
  if (name == "modular_consolidated") return Mode::ModularConsolidated;
  throw std::invalid_argument("unknown mode: " + name);
}

Instance make_conventional_instance(const Instance& original) {
  ModelParams params = original.params();
  params.max_modules_per_platoon = 1;
  return build_instance(original.physical_nodes(), physical_requests(original), params,
                        original.explicit_distance());
}

SubInstance make_sub_instance(const Instance& original, DemandType type) {
  const int k = static_cast<int>(type);
  const int n_d = original.num_physical_depots();
  const int n_r = original.num_requests();
  const std::vector<Node>& phys = original.physical_nodes();

  std::vector<int> keep;
  for (int r = 0; r < n_r; ++r)
    if (original.request(r).type == type) keep.push_back(r);
  const int m = static_cast<int>(keep.size());

  std::vector<Node> nodes;
  nodes.reserve(2 * n_d + 2 * m);
  const auto renumbered = [&](int phys_index, int new_id) {
    Node nd = phys[phys_index];
    nd.id = new_id;
    nodes.push_back(nd);
  };
  for (int d = 0; d < n_d; ++d) renumbered(d, d);
  for (int j = 0; j < m; ++j) renumbered(n_d + keep[j], n_d + j);
  for (int j = 0; j < m; ++j) renumbered(n_d + n_r + keep[j], n_d + m + j);
  for (int d = 0; d < n_d; ++d) renumbered(n_d + 2 * n_r + d, n_d + 2 * m + d);

  std::vector<Request> requests(m);
  for (int j = 0; j < m; ++j)
    requests[j] = {j, type, n_d + j, n_d + m + j, original.request(keep[j]).quantity};

  ModelParams params = original.params();
  params.max_modules_per_type[1 - k] = 0;
  params.max_modules_per_platoon =
      std::clamp(params.max_modules_per_type[k], 1, params.max_modules_per_platoon);

  std::optional<Matrix> matrix;
  if (original.explicit_distance()) {
    std::vector<int> kept_phys;
    kept_phys.reserve(nodes.size());
    for (int d = 0; d < n_d; ++d) kept_phys.push_back(d);
    for (int j = 0; j < m; ++j) kept_phys.push_back(n_d + keep[j]);
    for (int j = 0; j < m; ++j) kept_phys.push_back(n_d + n_r + keep[j]);
    for (int d = 0; d < n_d; ++d) kept_phys.push_back(n_d + 2 * n_r + d);
    Matrix sub(static_cast<int>(kept_phys.size()));
    for (size_t i = 0; i < kept_phys.size(); ++i)
      for (size_t j = 0; j < kept_phys.size(); ++j)
        sub(static_cast<int>(i), static_cast<int>(j)) =
            (*original.explicit_distance())(kept_phys[i], kept_phys[j]);
    matrix = std::move(sub);
  }

  return SubInstance{build_instance(nodes, requests, params, matrix), std::move(keep)};
}

Solution merge_sub_solutions(const Instance& original, const SubInstance& passenger,
                             const Solution& passenger_best, const SubInstance& freight,
                             const Solution& freight_best) {
  const auto remap_visits = [&](const SubInstance& sub, const std::vector<int>& visits) {
    std::vector<int> out;
    out.reserve(visits.size());
    for (int node : visits) {
      const int orig = sub.to_original.at(sub.instance.request_of(node));
      out.push_back(sub.instance.is_pickup(node) ? original.pickup_node(orig)
                                                 : original.dropoff_node(orig));
    }
    return out;
  };

  Solution merged;
  for (const Platoon& pl : passenger_best.platoons) {
    Platoon np;
    np.origin = pl.origin;  // depot copies share the layout of the original
    np.destination = original.paired_destination(np.origin);
    np.visits = remap_visits(passenger, pl.visits);
    np.config = pl.config;
    if (!refresh_platoon(np, original))
      throw std::runtime_error("merge produced an unschedulable passenger route");
    merged.platoons.push_back(std::move(np));
  }
  for (const Platoon& pl : freight_best.platoons) {
    if (static_cast<int>(merged.platoons.size()) >= original.params().max_platoons)
      throw std::runtime_error("separated solutions exceed the joint platoon budget");
    const int depot = freight.instance.physical_depot_of(pl.origin);
    const int origin = free_virtual_origin(merged, original, depot);
    if (origin < 0)
      throw std::runtime_error("separated solutions exceed the depot copy budget");
    Platoon np;
    np.origin = origin;
    np.destination = original.paired_destination(origin);
    np.visits = remap_visits(freight, pl.visits);
    np.config = pl.config;
    if (!refresh_platoon(np, original))
      throw std::runtime_error("merge produced an unschedulable freight route");
    merged.platoons.push_back(std::move(np));
  }
  for (int r : passenger_best.unserved) insert_sorted_unique(merged.unserved, passenger.to_original.at(r));
  for (int r : freight_best.unserved) insert_sorted_unique(merged.unserved, freight.to_original.at(r));

  const std::vector<Violation> violations = check_feasibility(merged, original);
  if (!violations.empty())
    throw std::runtime_error("separated merge is infeasible: " + violations.front().detail);
  return merged;
}

Solution split_to_single_modules(const Solution& modular, const Instance& instance) {
  const ModelParams& params = instance.params();
  Solution out;
  out.unserved = modular.unserved;

  for (const Platoon& pl : modular.platoons) {
    const int depot = instance.physical_depot_of(pl.origin);
    for (int k = 0; k < kNumDemandTypes; ++k) {
      std::vector<int> ordered;
      for (int node : pl.visits) {
        if (!instance.is_pickup(node)) continue;
        const int r = instance.request_of(node);
        if (static_cast<int>(instance.request(r).type) == k) ordered.push_back(r);
      }
      if (ordered.empty()) continue;

      const auto group_visits = [&](const std::vector<int>& group) {
        std::vector<int> wanted;
        for (int r : group) {
          wanted.push_back(instance.pickup_node(r));
          wanted.push_back(instance.dropoff_node(r));
        }
        std::vector<int> visits;
        for (int node : pl.visits)
          if (std::find(wanted.begin(), wanted.end(), node) != wanted.end())
            visits.push_back(node);
        return visits;
      };
      const auto flush = [&](std::vector<int>& group) {
        if (group.empty()) return;
        bool placed = false;
        if (static_cast<int>(out.platoons.size()) < params.max_platoons &&
            fleet_used(out)[k] + 1 <= params.max_modules_per_type[k]) {
          const int origin = free_virtual_origin(out, instance, depot);
          if (origin >= 0) {
            Platoon np;
            np.origin = origin;
            np.destination = instance.paired_destination(origin);
            np.visits = group_visits(group);
            np.config.modules_per_type[k] = 1;
            if (route_km(np, instance) <= params.range_km + kTimeTol &&
                refresh_platoon(np, instance)) {
              out.platoons.push_back(std::move(np));
              placed = true;
            }
          }
        }
        if (!placed)
          for (int r : group) insert_sorted_unique(out.unserved, r);
        group.clear();
      };

      std::vector<int> group;
      for (int r : ordered) {
        std::vector<int> tentative = group;
        tentative.push_back(r);
        if (min_config_for_visits(group_visits(tentative), instance)[k] <= 1) {
          group = std::move(tentative);
          continue;
        }
        flush(group);
        if (min_config_for_visits(group_visits({r}), instance)[k] <= 1)
          group = {r};
        else
          insert_sorted_unique(out.unserved, r);  // single request overfills a module
      }
      flush(group);
    }
  }
  return out;
}

ModeRunResult run_mode(const Instance& instance, Mode mode, const AlnsParams& alns,
                       const Solution* separated_best) {
  const auto start = std::chrono::steady_clock::now();
  ModeRunResult out;
  out.mode = mode;

  switch (mode) {
    case Mode::ModularConsolidated: {
      EnsembleResult ens = solve_ensemble(instance, alns);
      out.solution = std::move(ens.best.best);
      out.run_totals = std::move(ens.run_totals);
      break;
    }
    case Mode::ModularSeparated: {
      const SubInstance passenger = make_sub_instance(instance, DemandType::Passenger);
      const SubInstance freight = make_sub_instance(instance, DemandType::Freight);
      AlnsParams freight_alns = alns;
      freight_alns.seed = mix_seed(alns.seed, 1);
      const EnsembleResult ens_p = solve_ensemble(passenger.instance, alns);
      const EnsembleResult ens_f = solve_ensemble(freight.instance, freight_alns);
      out.solution =
          merge_sub_solutions(instance, passenger, ens_p.best.best, freight, ens_f.best.best);
      out.run_totals.resize(ens_p.run_totals.size());
      for (size_t i = 0; i < out.run_totals.size(); ++i)
        out.run_totals[i] = ens_p.run_totals[i] + ens_f.run_totals[i];
      break;
    }
    case Mode::Conventional: {
      Solution seed_source;
      if (separated_best) {
        seed_source = *separated_best;
      } else {
        AlnsParams sep_alns = alns;
        sep_alns.seed = mix_seed(alns.seed, 2);
        seed_source = run_mode(instance, Mode::ModularSeparated, sep_alns).solution;
      }
      const Instance conventional = make_conventional_instance(instance);
      const Solution initial = split_to_single_modules(seed_source, conventional);
      EnsembleResult ens = solve_ensemble(conventional, alns, initial);
      out.solution = std::move(ens.best.best);
      out.run_totals = std::move(ens.run_totals);
      break;
    }
  }

  out.cost = evaluate(out.solution, instance);
  out.kpis = compute_kpis(out.solution, instance);
  out.wall_time_s = seconds_since(start);
  return out;
}

namespace {

void reject_unknown_keys(const json& object, const std::vector<std::string>& allowed,
                         const std::string& where) {
  for (const auto& item : object.items())
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw std::invalid_argument("unknown key '" + item.key() + "' in " + where);
}

void apply_alns_overrides(AlnsParams& p, const json& in) {
  reject_unknown_keys(
      in,
      {"score_new_best", "score_improving", "score_accepted", "score_rejected", "weight_decay",
       "max_iterations", "min_iterations", "lookback_window", "improvement_threshold",
       "temp_start", "temp_end", "cooling_rate", "shaw_distance_weight", "shaw_time_weight",
       "shaw_load_weight", "shaw_rank_power", "worst_rank_power", "max_removal_fraction",
       "min_removals", "ensemble_size"},
      "alns");
  p.score_new_best = in.value("score_new_best", p.score_new_best);
  p.score_improving = in.value("score_improving", p.score_improving);
  p.score_accepted = in.value("score_accepted", p.score_accepted);
  p.score_rejected = in.value("score_rejected", p.score_rejected);
  p.weight_decay = in.value("weight_decay", p.weight_decay);
  p.max_iterations = in.value("max_iterations", p.max_iterations);
  p.min_iterations = in.value("min_iterations", p.min_iterations);
  p.lookback_window = in.value("lookback_window", p.lookback_window);
  p.improvement_threshold = in.value("improvement_threshold", p.improvement_threshold);
  p.temp_start = in.value("temp_start", p.temp_start);
  p.temp_end = in.value("temp_end", p.temp_end);
  p.cooling_rate = in.value("cooling_rate", p.cooling_rate);
  p.shaw_distance_weight = in.value("shaw_distance_weight", p.shaw_distance_weight);
  p.shaw_time_weight = in.value("shaw_time_weight", p.shaw_time_weight);
  p.shaw_load_weight = in.value("shaw_load_weight", p.shaw_load_weight);
  p.shaw_rank_power = in.value("shaw_rank_power", p.shaw_rank_power);
  p.worst_rank_power = in.value("worst_rank_power", p.worst_rank_power);
  p.max_removal_fraction = in.value("max_removal_fraction", p.max_removal_fraction);
  p.min_removals = in.value("min_removals", p.min_removals);
  p.ensemble_size = in.value("ensemble_size", p.ensemble_size);
}

json alns_to_json(const AlnsParams& p) {
  json out;
  out["score_new_best"] = p.score_new_best;
  out["score_improving"] = p.score_improving;
  out["score_accepted"] = p.score_accepted;
  out["score_rejected"] = p.score_rejected;
  out["weight_decay"] = p.weight_decay;
  out["max_iterations"] = p.max_iterations;
  out["min_iterations"] = p.min_iterations;
  out["lookback_window"] = p.lookback_window;
  out["improvement_threshold"] = p.improvement_threshold;
  out["temp_start"] = p.temp_start;
  out["temp_end"] = p.temp_end;
  out["cooling_rate"] = p.cooling_rate;
  out["shaw_distance_weight"] = p.shaw_distance_weight;
  out["shaw_time_weight"] = p.shaw_time_weight;
  out["shaw_load_weight"] = p.shaw_load_weight;
  out["shaw_rank_power"] = p.shaw_rank_power;
  out["worst_rank_power"] = p.worst_rank_power;
  out["max_removal_fraction"] = p.max_removal_fraction;
  out["min_removals"] = p.min_removals;
  out["ensemble_size"] = p.ensemble_size;
  return out;
}

void apply_model_overrides(ModelParams& p, const json& in) {
  reject_unknown_keys(
      in,
      {"distance_cost_per_km", "module_cost_per_period", "duration_cost_per_hour",
       "unserved_penalty", "train_incentive", "speed_kmh", "range_km",
       "max_modules_per_platoon", "max_modules_per_type", "module_capacity", "max_platoons",
       "planning_period"},
      "model");
  p.distance_cost_per_km = in.value("distance_cost_per_km", p.distance_cost_per_km);
  p.module_cost_per_period = in.value("module_cost_per_period", p.module_cost_per_period);
  p.duration_cost_per_hour = in.value("duration_cost_per_hour", p.duration_cost_per_hour);
  p.unserved_penalty = in.value("unserved_penalty", p.unserved_penalty);
  p.train_incentive = in.value("train_incentive", p.train_incentive);
  p.speed_kmh = in.value("speed_kmh", p.speed_kmh);
  p.range_km = in.value("range_km", p.range_km);
  p.max_modules_per_platoon = in.value("max_modules_per_platoon", p.max_modules_per_platoon);
  if (in.contains("max_modules_per_type")) {
    const auto& arr = in.at("max_modules_per_type");
    if (arr.size() != kNumDemandTypes) throw std::invalid_argument("bad fleet budget array");
    for (int k = 0; k < kNumDemandTypes; ++k) p.max_modules_per_type[k] = arr[k].get<int>();
  }
  if (in.contains("module_capacity")) {
    const auto& arr = in.at("module_capacity");
    if (arr.size() != kNumDemandTypes) throw std::invalid_argument("bad capacity array");
    for (int k = 0; k < kNumDemandTypes; ++k) p.module_capacity[k] = arr[k].get<double>();
  }
  p.max_platoons = in.value("max_platoons", p.max_platoons);
  if (in.contains("planning_period")) {
    const auto& arr = in.at("planning_period");
    if (arr.size() != 2) throw std::invalid_argument("bad planning period");
    p.period_start = arr[0].get<double>();
    p.period_end = arr[1].get<double>();
  }
}

json model_to_json(const ModelParams& p) {
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

std::vector<double> sweep_values(const json& in, const char* key) {
  std::vector<double> out;
  for (const json& v : in.at(key)) out.push_back(v.get<double>());
  if (out.empty()) throw std::invalid_argument(std::string("empty sweep array: ") + key);
  return out;
}

}  // namespace

ExperimentPlan plan_from_json(const std::string& text) {
  const json in = json::parse(text);
  reject_unknown_keys(
      in, {"format", "name", "base_seed", "modes", "scenarios", "sweep", "alns", "model"},
      "plan");
  if (in.value("format", "") != "mmp-plan") throw std::invalid_argument("not a plan file");

  ExperimentPlan plan;
  plan.name = in.value("name", plan.name);
  plan.base_seed = in.value("base_seed", plan.base_seed);

  if (in.contains("modes")) {
    plan.modes.clear();
    for (const json& m : in.at("modes")) plan.modes.push_back(mode_from_name(m.get<std::string>()));
  }
  if (plan.modes.empty()) throw std::invalid_argument("plan needs at least one mode");

  if (in.contains("scenarios")) {
    for (const json& row : in.at("scenarios")) {
      reject_unknown_keys(
          row, {"class", "n_requests", "n_depots", "area_km", "passenger_share", "count"},
          "scenario");
      ScenarioLine line;
      if (row.contains("class")) apply_class_name(line.spec, row.at("class").get<std::string>());
      line.spec.n_requests = row.value("n_requests", line.spec.n_requests);
      line.spec.n_depots = row.value("n_depots", line.spec.n_depots);
      line.spec.area_km = row.value("area_km", line.spec.area_km);
      line.spec.passenger_share = row.value("passenger_share", line.spec.passenger_share);
      line.count = row.value("count", line.count);
      if (line.count < 1) throw std::invalid_argument("scenario count must be >= 1");
      plan.scenarios.push_back(line);
    }
  }
  if (plan.scenarios.empty()) throw std::invalid_argument("plan needs at least one scenario");

  if (in.contains("sweep")) {
    const json& sw = in.at("sweep");
    reject_unknown_keys(sw, {"module_capacity", "range_km", "train_incentive"}, "sweep");
    if (sw.contains("module_capacity"))
      plan.sweep.module_capacity = sweep_values(sw, "module_capacity");
    if (sw.contains("range_km")) plan.sweep.range_km = sweep_values(sw, "range_km");
    if (sw.contains("train_incentive"))
      plan.sweep.train_incentive = sweep_values(sw, "train_incentive");
  }

  if (in.contains("alns")) apply_alns_overrides(plan.alns, in.at("alns"));
  if (in.contains("model")) apply_model_overrides(plan.model, in.at("model"));
  return plan;
}

std::string plan_to_json(const ExperimentPlan& plan) {
  json out;
  out["format"] = "mmp-plan";
  out["name"] = plan.name;
  out["base_seed"] = plan.base_seed;
  json modes = json::array();
  for (Mode m : plan.modes) modes.push_back(mode_name(m));
  out["modes"] = std::move(modes);
  json scenarios = json::array();
  for (const ScenarioLine& line : plan.scenarios) {
    json row;
    row["class"] = class_name(line.spec);
    row["n_requests"] = line.spec.n_requests;
    row["n_depots"] = line.spec.n_depots;
    row["area_km"] = line.spec.area_km;
    row["passenger_share"] = line.spec.passenger_share;
    row["count"] = line.count;
    scenarios.push_back(std::move(row));
  }
  out["scenarios"] = std::move(scenarios);
  json sweep;
  if (!plan.sweep.module_capacity.empty()) sweep["module_capacity"] = plan.sweep.module_capacity;
  if (!plan.sweep.range_km.empty()) sweep["range_km"] = plan.sweep.range_km;
  if (!plan.sweep.train_incentive.empty()) sweep["train_incentive"] = plan.sweep.train_incentive;
  if (!sweep.empty()) out["sweep"] = std::move(sweep);
  out["alns"] = alns_to_json(plan.alns);
  out["model"] = model_to_json(plan.model);
  return out.dump(2) + "\n";
}

namespace {

struct GridPoint {
  ModelParams params;  // model params in force at this point
  double module_capacity = 0.0;
  double range_km = 0.0;
  double train_incentive = 0.0;
  std::string tag;
};

std::vector<GridPoint> build_grid(const ExperimentPlan& plan) {
  const SweepGrid& sw = plan.sweep;
  const std::vector<double> caps =
      sw.module_capacity.empty() ? std::vector<double>{plan.model.module_capacity[0]}
                                 : sw.module_capacity;
  const std::vector<double> ranges =
      sw.range_km.empty() ? std::vector<double>{plan.model.range_km} : sw.range_km;
  const std::vector<double> etas = sw.train_incentive.empty()
                                       ? std::vector<double>{plan.model.train_incentive}
                                       : sw.train_incentive;
  std::vector<GridPoint> grid;
  for (double cap : caps) {
    for (double range : ranges) {
      for (double eta : etas) {
        GridPoint point;
        point.params = plan.model;
        if (!sw.module_capacity.empty()) point.params = with_module_capacity(point.params, cap);
        if (!sw.range_km.empty()) point.params.range_km = range;
        if (!sw.train_incentive.empty()) point.params.train_incentive = eta;
        point.module_capacity = point.params.module_capacity[0];
        point.range_km = point.params.range_km;
        point.train_incentive = point.params.train_incentive;
        point.tag = "cap" + format_double(point.module_capacity) + "-rng" +
                    format_double(point.range_km) + "-eta" +
                    format_double(point.train_incentive);
        grid.push_back(std::move(point));
      }
    }
  }
  return grid;
}

struct ModeCell {
  bool requested = false;
  bool ok = false;
  std::string error;
  ModeRunResult result;
};

struct Cell {
  int instance_index = 0;
  int grid_index = 0;
  std::array<ModeCell, 3> modes;
  double wall_time_s = 0.0;
  std::string build_error;
};

}  // namespace

void run_plan(const ExperimentPlan& plan, const std::filesystem::path& outdir, int threads) {
  const auto start = std::chrono::steady_clock::now();
  if (plan.modes.empty()) throw std::invalid_argument("plan needs at least one mode");
  if (plan.scenarios.empty()) throw std::invalid_argument("plan needs at least one scenario");

  // Instances are generated up front with the most restrictive sweep range so
  // every sweep point can serve every request.
  ModelParams generation_params = plan.model;
  if (!plan.sweep.range_km.empty())
    generation_params.range_km =
        *std::min_element(plan.sweep.range_km.begin(), plan.sweep.range_km.end());

  struct NamedInstance {
    std::string name;
    std::uint64_t seed = 0;
    std::string scenario_class;
    int n_requests = 0;
    int n_depots = 0;
    Instance instance;
  };
  std::vector<NamedInstance> instances;
  for (size_t s = 0; s < plan.scenarios.size(); ++s) {
    const ScenarioLine& line = plan.scenarios[s];
    for (int i = 0; i < line.count; ++i) {
      ScenarioSpec spec = line.spec;
      spec.seed = mix_seed(plan.base_seed, (static_cast<std::uint64_t>(s) << 20) +
                                               static_cast<std::uint64_t>(i));
      NamedInstance named{class_name(spec) + "-n" + std::to_string(spec.n_requests) + "-d" +
                              std::to_string(spec.n_depots) + "-" + std::to_string(i),
                          spec.seed,
                          class_name(spec),
                          spec.n_requests,
                          spec.n_depots,
                          generate(spec, generation_params)};
      save_instance(named.instance, outdir / "instances" / (named.name + ".json"));
      instances.push_back(std::move(named));
    }
  }

  const std::vector<GridPoint> grid = build_grid(plan);

  std::vector<Cell> cells;
  for (size_t i = 0; i < instances.size(); ++i)
    for (size_t g = 0; g < grid.size(); ++g)
      cells.push_back(Cell{static_cast<int>(i), static_cast<int>(g), {}, 0.0, ""});
  const auto requested = [&](Mode m) {
    return std::find(plan.modes.begin(), plan.modes.end(), m) != plan.modes.end();
  };

  const auto run_cell = [&](Cell& cell) {
    const auto cell_start = std::chrono::steady_clock::now();
    const NamedInstance& base = instances[cell.instance_index];
    const GridPoint& point = grid[cell.grid_index];
    for (Mode m : plan.modes) cell.modes[static_cast<int>(m)].requested = true;

    std::optional<Instance> built;
    try {
      built = build_instance(base.instance.physical_nodes(), physical_requests(base.instance),
                             point.params, base.instance.explicit_distance());
    } catch (const std::exception& e) {
      cell.build_error = e.what();
      for (ModeCell& mc : cell.modes)
        if (mc.requested) mc.error = cell.build_error;
      cell.wall_time_s = seconds_since(cell_start);
      return;
    }
    const Instance& inst = *built;

    const auto seed_for = [&](Mode m) {
      return mix_seed(base.seed, static_cast<std::uint64_t>(cell.grid_index) * 16 +
                                     static_cast<std::uint64_t>(m) + 1);
    };
    const auto run_into = [&](Mode m, const Solution* sep) -> ModeCell& {
      ModeCell& mc = cell.modes[static_cast<int>(m)];
      try {
        AlnsParams alns = plan.alns;
        alns.seed = seed_for(m);
        mc.result = run_mode(inst, m, alns, sep);
        mc.ok = true;
      } catch (const std::exception& e) {
        mc.error = e.what();
      }
      return mc;
    };

    // Conventional runs are seeded from the separated best, so that mode is
    // computed first whenever either needs it.
    const Solution* separated = nullptr;
    ModeCell side;  // separated result kept only as a seed when not requested
    if (requested(Mode::ModularSeparated)) {
      ModeCell& mc = run_into(Mode::ModularSeparated, nullptr);
      if (mc.ok) separated = &mc.result.solution;
    } else if (requested(Mode::Conventional)) {
      side.requested = true;
      try {
        AlnsParams alns = plan.alns;
        alns.seed = seed_for(Mode::ModularSeparated);
        side.result = run_mode(inst, Mode::ModularSeparated, alns, nullptr);
        side.ok = true;
        separated = &side.result.solution;
      } catch (const std::exception& e) {
        side.error = e.what();
      }
    }
    if (requested(Mode::Conventional)) {
      if (separated) {
        run_into(Mode::Conventional, separated);
      } else {
        cell.modes[static_cast<int>(Mode::Conventional)].error =
            "separated seed failed: " +
            (requested(Mode::ModularSeparated)
                 ? cell.modes[static_cast<int>(Mode::ModularSeparated)].error
                 : side.error);
      }
    }
    if (requested(Mode::ModularConsolidated)) run_into(Mode::ModularConsolidated, nullptr);
    cell.wall_time_s = seconds_since(cell_start);
  };

  const int n_workers = std::max(1, threads);
  if (n_workers == 1) {
    for (Cell& cell : cells) run_cell(cell);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < n_workers; ++t)
      pool.emplace_back([&] {
        for (;;) {
          const size_t at = next.fetch_add(1);
          if (at >= cells.size()) return;
          run_cell(cells[at]);
        }
      });
    for (std::thread& t : pool) t.join();
  }

  // Persist solutions, re-validating each file the way a consumer would read it.
  for (Cell& cell : cells) {
    const NamedInstance& base = instances[cell.instance_index];
    const GridPoint& point = grid[cell.grid_index];
    for (ModeCell& mc : cell.modes) {
      if (!mc.requested || !mc.ok) continue;
      const Instance inst =
          build_instance(base.instance.physical_nodes(), physical_requests(base.instance),
                         point.params, base.instance.explicit_distance());
      const std::filesystem::path path =
          outdir / "solutions" /
          (base.name + "--" + point.tag + "--" + mode_name(mc.result.mode) + ".json");
      save_solution(mc.result.solution, inst, path);
      const Solution reread = load_solution(path, inst);
      const std::vector<Violation> violations = check_feasibility(reread, inst);
      if (!violations.empty()) {
        mc.ok = false;
        mc.error = "saved solution fails validation: " + violations.front().detail;
      }
    }
  }

  std::string csv = "instance,scenario_class,n_requests,n_depots,instance_seed,"
                    "module_capacity,range_km,train_incentive,mode,ensemble_size,"
                    "mean_objective," +
                    kpi_csv_header() + "\n";
  for (const Cell& cell : cells) {
    const NamedInstance& base = instances[cell.instance_index];
    const GridPoint& point = grid[cell.grid_index];
    for (const ModeCell& mc : cell.modes) {
      if (!mc.requested || !mc.ok) continue;
      double mean = 0.0;
      for (double v : mc.result.run_totals) mean += v;
      if (!mc.result.run_totals.empty()) mean /= static_cast<double>(mc.result.run_totals.size());
      csv += base.name + "," + base.scenario_class + "," + std::to_string(base.n_requests) +
             "," + std::to_string(base.n_depots) + "," + std::to_string(base.seed) + "," +
             format_double(point.module_capacity) + "," + format_double(point.range_km) + "," +
             format_double(point.train_incentive) + "," + mode_name(mc.result.mode) + "," +
             std::to_string(mc.result.run_totals.size()) + "," + format_double(mean) + "," +
             kpi_csv_row(mc.result.kpis) + "\n";
    }
  }
  write_text_file(outdir / "results.csv", csv);

  json summary;
  summary["format"] = "mmp-summary";
  summary["name"] = plan.name;
  summary["base_seed"] = plan.base_seed;
  summary["plan"] = json::parse(plan_to_json(plan));
  json cell_rows = json::array();
  for (const Cell& cell : cells) {
    const NamedInstance& base = instances[cell.instance_index];
    const GridPoint& point = grid[cell.grid_index];
    json row;
    row["instance"] = base.name;
    row["grid"] = {{"module_capacity", point.module_capacity},
                   {"range_km", point.range_km},
                   {"train_incentive", point.train_incentive}};
    if (!cell.build_error.empty()) row["build_error"] = cell.build_error;
    json mode_rows = json::array();
    for (int m = 0; m < 3; ++m) {
      const ModeCell& mc = cell.modes[m];
      if (!mc.requested) continue;
      json mrow;
      mrow["mode"] = mode_name(static_cast<Mode>(m));
      if (mc.ok) {
        mrow["ok"] = true;
        mrow["total_cost"] = mc.result.cost.total;
        mrow["run_totals"] = mc.result.run_totals;
        mrow["wall_time_s"] = mc.result.wall_time_s;
      } else {
        mrow["ok"] = false;
        mrow["error"] = mc.error;
      }
      mode_rows.push_back(std::move(mrow));
    }
    row["modes"] = std::move(mode_rows);
    row["wall_time_s"] = cell.wall_time_s;
    cell_rows.push_back(std::move(row));
  }
  summary["cells"] = std::move(cell_rows);
  summary["total_wall_time_s"] = seconds_since(start);
  write_text_file(outdir / "summary.json", summary.dump(2) + "\n");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

std::string compare_report(const std::string& results_csv, const std::string& mode_a,
                           const std::string& mode_b) {
  std::stringstream stream(results_csv);
  std::string line;
  if (!std::getline(stream, line)) throw std::invalid_argument("empty results table");
  const std::vector<std::string> header = split_csv_line(line);
  const auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::invalid_argument("missing column: " + name);
    return static_cast<int>(it - header.begin());
  };
  const int mode_col = column("mode");
  const std::vector<int> key_cols = {column("instance"), column("module_capacity"),
                                     column("range_km"), column("train_incentive")};
  // Metrics are everything after the identification block.
  const int first_metric = column("ensemble_size");

  std::map<std::string, std::vector<double>> rows_a, rows_b;
  while (std::getline(stream, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) throw std::invalid_argument("ragged results table");
    std::string key;
    for (int c : key_cols) key += fields[c] + "|";
    std::vector<double> values;
    for (size_t c = first_metric; c < fields.size(); ++c) values.push_back(std::stod(fields[c]));
    if (fields[mode_col] == mode_a) rows_a[key] = values;
    if (fields[mode_col] == mode_b) rows_b[key] = values;
  }
  if (rows_a.empty()) throw std::invalid_argument("no rows for mode: " + mode_a);
  if (rows_b.empty()) throw std::invalid_argument("no rows for mode: " + mode_b);
  if (rows_a.size() != rows_b.size())
    throw std::invalid_argument("instance sets differ between modes");
  for (const auto& [key, unused] : rows_a) {
    (void)unused;
    if (rows_b.find(key) == rows_b.end())
      throw std::invalid_argument("instance sets differ between modes");
  }

  std::string out = "metric,mean_" + mode_a + ",mean_" + mode_b + ",mean_pct_delta,pairs\n";
  const size_t n_metrics = header.size() - first_metric;
  for (size_t metric = 0; metric < n_metrics; ++metric) {
    double sum_a = 0.0, sum_b = 0.0, sum_delta = 0.0;
    int pairs = 0;
    for (const auto& [key, values_a] : rows_a) {
      const std::vector<double>& values_b = rows_b.at(key);
      const double a = values_a[metric];
      const double b = values_b[metric];
      sum_a += a;
      sum_b += b;
      if (a != 0.0) {
        sum_delta += 100.0 * (b - a) / a;
        ++pairs;
      } else if (b == 0.0) {
        ++pairs;  // both zero, delta zero
      }
    }
    const double n = static_cast<double>(rows_a.size());
    out += header[first_metric + metric] + "," + format_double(sum_a / n) + "," +
           format_double(sum_b / n) + ",";
    out += pairs > 0 ? format_double(sum_delta / pairs) : "";
    out += "," + std::to_string(pairs) + "\n";
  }
  return out;
}

}  // namespace mmp
