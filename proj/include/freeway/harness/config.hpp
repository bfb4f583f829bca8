#pragma once

#include <cstdint>
#include <string>

#include "freeway/rl/agent.hpp"
#include "freeway/sim/world.hpp"

namespace freeway::harness {

// Everything a run needs: scenario, road, controllers, agent, protocol.
struct RunConfig {
  sim::ScenarioConfig scenario;
  sim::SimParams sim;
  rl::AgentConfig agent;
  int episodes = 2000;
  int eval_episodes = 10;
  int baseline_episodes = 100;
  std::uint64_t master_seed = 0;
  std::string out_dir = "out";
};

// INI-style config: [section] headers, key = value lines, '#' comments.
// Unknown sections or keys are errors naming the line. Absent keys keep
// their defaults.
RunConfig parse_config(const std::string& text, const std::string& source_name);
RunConfig load_config(const std::string& path);

// Fully-resolved round-trippable text with every key stated.
std::string serialize_config(const RunConfig& cfg);
void save_config(const RunConfig& cfg, const std::string& path);

}  // namespace freeway::harness
