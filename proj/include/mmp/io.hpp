#pragma once

#include <filesystem>
#include <string>

#include "mmp/instance.hpp"
#include "mmp/types.hpp"

namespace mmp {

// Instance files store the physical node list (depot origins, pickups,
// dropoffs, depot destinations), requests, model params and an optional
// explicit distance matrix; virtual depot copies are re-expanded on load.
std::string instance_to_json(const Instance& instance);
Instance instance_from_json(const std::string& text);
void save_instance(const Instance& instance, const std::filesystem::path& path);
Instance load_instance(const std::filesystem::path& path);

// Solution files reference expanded node ids. Loads and the depot destination
// are reconstructed; loading re-validates nothing by itself.
std::string solution_to_json(const Solution& solution, const Instance& instance);
Solution solution_from_json(const std::string& text, const Instance& instance);
void save_solution(const Solution& solution, const Instance& instance,
                   const std::filesystem::path& path);
Solution load_solution(const std::filesystem::path& path, const Instance& instance);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Shortest round-trip decimal rendering; used wherever output must be
// byte-stable across reruns.
std::string format_double(double value);

}  // namespace mmp
