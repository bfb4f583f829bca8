#include "freeway/harness/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "freeway/errors.hpp"

namespace freeway::harness {
namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

struct Setter {
  std::function<void(RunConfig&, const std::string&, const std::string&)> apply;
};

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

double parse_double(const std::string& value, const std::string& where) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE)
    fail(where, "expected a number, got '" + value + "'");
  return v;
}

long long parse_int(const std::string& value, const std::string& where) {
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE)
    fail(where, "expected an integer, got '" + value + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& value, const std::string& where) {
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE)
    fail(where, "expected an unsigned integer, got '" + value + "'");
  return v;
}

// section.key -> setter. One table serves both the parser and (via the
// serializer below, kept in the same order) the write-back.
const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto dfield = [&t](const std::string& key, std::function<double&(RunConfig&)> ref) {
      t[key] = Setter{[ref](RunConfig& c, const std::string& v, const std::string& where) {
        ref(c) = parse_double(v, where);
      }};
    };
    auto ifield = [&t](const std::string& key, std::function<int&(RunConfig&)> ref) {
      t[key] = Setter{[ref](RunConfig& c, const std::string& v, const std::string& where) {
        ref(c) = static_cast<int>(parse_int(v, where));
      }};
    };

    ifield("run.episodes", [](RunConfig& c) -> int& { return c.episodes; });
    ifield("run.eval_episodes", [](RunConfig& c) -> int& { return c.eval_episodes; });
    ifield("run.baseline_episodes", [](RunConfig& c) -> int& { return c.baseline_episodes; });
    t["run.master_seed"] = Setter{[](RunConfig& c, const std::string& v, const std::string& w) {
      c.master_seed = parse_u64(v, w);
    }};
    t["run.out_dir"] = Setter{[](RunConfig& c, const std::string& v, const std::string&) {
      c.out_dir = v;
    }};

    ifield("scenario.surrounding_count",
           [](RunConfig& c) -> int& { return c.scenario.surrounding_count; });
    dfield("scenario.ego_v0_min", [](RunConfig& c) -> double& { return c.scenario.ego_v0_min; });
    dfield("scenario.ego_v0_max", [](RunConfig& c) -> double& { return c.scenario.ego_v0_max; });
    dfield("scenario.other_v0_min",
           [](RunConfig& c) -> double& { return c.scenario.other_v0_min; });
    dfield("scenario.other_v0_max",
           [](RunConfig& c) -> double& { return c.scenario.other_v0_max; });
    dfield("scenario.episode_duration",
           [](RunConfig& c) -> double& { return c.scenario.episode_duration; });
    ifield("scenario.policy_hz", [](RunConfig& c) -> int& { return c.scenario.policy_hz; });
    ifield("scenario.sim_hz", [](RunConfig& c) -> int& { return c.scenario.sim_hz; });
    dfield("scenario.min_spawn_gap",
           [](RunConfig& c) -> double& { return c.scenario.min_spawn_gap; });

    ifield("road.lane_count", [](RunConfig& c) -> int& { return c.sim.road.lane_count; });
    dfield("road.lane_width", [](RunConfig& c) -> double& { return c.sim.road.lane_width; });
    dfield("road.lane_length", [](RunConfig& c) -> double& { return c.sim.road.lane_length; });

    dfield("idm.a_max", [](RunConfig& c) -> double& { return c.sim.idm.a_max; });
    dfield("idm.delta_exp", [](RunConfig& c) -> double& { return c.sim.idm.delta_exp; });
    dfield("idm.d_0", [](RunConfig& c) -> double& { return c.sim.idm.d_0; });
    dfield("idm.t_gap", [](RunConfig& c) -> double& { return c.sim.idm.t_gap; });
    dfield("idm.b_comf", [](RunConfig& c) -> double& { return c.sim.idm.b_comf; });

    dfield("mobil.b_safe", [](RunConfig& c) -> double& { return c.sim.mobil.b_safe; });
    dfield("mobil.politeness", [](RunConfig& c) -> double& { return c.sim.mobil.p_polite; });
    dfield("mobil.a_th", [](RunConfig& c) -> double& { return c.sim.mobil.a_th; });

    dfield("gains.k_p", [](RunConfig& c) -> double& { return c.sim.gains.k_p; });
    dfield("gains.k_p_lat", [](RunConfig& c) -> double& { return c.sim.gains.k_p_lat; });
    dfield("gains.k_p_theta", [](RunConfig& c) -> double& { return c.sim.gains.k_p_theta; });

    dfield("reward.speed_weight",
           [](RunConfig& c) -> double& { return c.sim.reward.speed_weight; });
    dfield("reward.lane_weight", [](RunConfig& c) -> double& { return c.sim.reward.lane_weight; });
    dfield("reward.speed_floor", [](RunConfig& c) -> double& { return c.sim.reward.speed_floor; });

    t["bicycle.heading_rate_denominator"] =
        Setter{[](RunConfig& c, const std::string& v, const std::string& w) {
          if (v == "wheelbase")
            c.sim.heading_denom = sim::HeadingRateDenominator::kWheelbase;
          else if (v == "rear_axle")
            c.sim.heading_denom = sim::HeadingRateDenominator::kRearAxle;
          else
            fail(w, "expected wheelbase|rear_axle, got '" + v + "'");
        }};

    t["agent.variant"] = Setter{[](RunConfig& c, const std::string& v, const std::string& w) {
      try {
        c.agent.variant = rl::variant_from_string(v);
      } catch (const Error& e) {
        fail(w, e.what());
      }
    }};
    dfield("agent.gamma", [](RunConfig& c) -> double& { return c.agent.gamma; });
    dfield("agent.lr", [](RunConfig& c) -> double& { return c.agent.lr; });
    dfield("agent.eps_start", [](RunConfig& c) -> double& { return c.agent.eps.start; });
    dfield("agent.eps_end", [](RunConfig& c) -> double& { return c.agent.eps.end; });
    dfield("agent.eps_decay_fraction",
           [](RunConfig& c) -> double& { return c.agent.eps.decay_fraction; });
    ifield("agent.batch_size", [](RunConfig& c) -> int& { return c.agent.batch_size; });
    ifield("agent.capacity", [](RunConfig& c) -> int& { return c.agent.capacity; });
    ifield("agent.target_sync", [](RunConfig& c) -> int& { return c.agent.target_sync; });
    dfield("agent.grad_clip_norm",
           [](RunConfig& c) -> double& { return c.agent.grad_clip_norm; });
    ifield("agent.hidden1", [](RunConfig& c) -> int& { return c.agent.shape.hidden1; });
    ifield("agent.hidden2", [](RunConfig& c) -> int& { return c.agent.shape.hidden2; });
    ifield("agent.head_hidden", [](RunConfig& c) -> int& { return c.agent.shape.head_hidden; });

    dfield("per.psi", [](RunConfig& c) -> double& { return c.agent.per.psi; });
    dfield("per.lambda_start", [](RunConfig& c) -> double& { return c.agent.per.lambda_start; });
    dfield("per.lambda_end", [](RunConfig& c) -> double& { return c.agent.per.lambda_end; });
    dfield("per.epsilon_p", [](RunConfig& c) -> double& { return c.agent.per.epsilon_p; });
    return t;
  }();
  return table;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source_name) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source_name + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') fail(where, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(where, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(where, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(where, "empty key");
    if (section.empty()) fail(where, "key '" + key + "' outside any section");
    const std::string full = section + "." + key;
    const auto it = setters().find(full);
    if (it == setters().end()) fail(where, "unknown key '" + full + "'");
    it->second.apply(cfg, value, where + " (" + full + ")");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "[run]\n";
  out << "episodes = " << cfg.episodes << "\n";
  out << "eval_episodes = " << cfg.eval_episodes << "\n";
  out << "baseline_episodes = " << cfg.baseline_episodes << "\n";
  out << "master_seed = " << cfg.master_seed << "\n";
  out << "out_dir = " << cfg.out_dir << "\n";
  out << "\n[scenario]\n";
  out << "surrounding_count = " << cfg.scenario.surrounding_count << "\n";
  out << "ego_v0_min = " << fmt_double(cfg.scenario.ego_v0_min) << "\n";
  out << "ego_v0_max = " << fmt_double(cfg.scenario.ego_v0_max) << "\n";
  out << "other_v0_min = " << fmt_double(cfg.scenario.other_v0_min) << "\n";
  out << "other_v0_max = " << fmt_double(cfg.scenario.other_v0_max) << "\n";
  out << "episode_duration = " << fmt_double(cfg.scenario.episode_duration) << "\n";
  out << "policy_hz = " << cfg.scenario.policy_hz << "\n";
  out << "sim_hz = " << cfg.scenario.sim_hz << "\n";
  out << "min_spawn_gap = " << fmt_double(cfg.scenario.min_spawn_gap) << "\n";
  out << "\n[road]\n";
  out << "lane_count = " << cfg.sim.road.lane_count << "\n";
  out << "lane_width = " << fmt_double(cfg.sim.road.lane_width) << "\n";
  out << "lane_length = " << fmt_double(cfg.sim.road.lane_length) << "\n";
  out << "\n[idm]\n";
  out << "a_max = " << fmt_double(cfg.sim.idm.a_max) << "\n";
  out << "delta_exp = " << fmt_double(cfg.sim.idm.delta_exp) << "\n";
  out << "d_0 = " << fmt_double(cfg.sim.idm.d_0) << "\n";
  out << "t_gap = " << fmt_double(cfg.sim.idm.t_gap) << "\n";
  out << "b_comf = " << fmt_double(cfg.sim.idm.b_comf) << "\n";
  out << "\n[mobil]\n";
  out << "b_safe = " << fmt_double(cfg.sim.mobil.b_safe) << "\n";
  out << "politeness = " << fmt_double(cfg.sim.mobil.p_polite) << "\n";
  out << "a_th = " << fmt_double(cfg.sim.mobil.a_th) << "\n";
  out << "\n[gains]\n";
  out << "k_p = " << fmt_double(cfg.sim.gains.k_p) << "\n";
  out << "k_p_lat = " << fmt_double(cfg.sim.gains.k_p_lat) << "\n";
  out << "k_p_theta = " << fmt_double(cfg.sim.gains.k_p_theta) << "\n";
  out << "\n[reward]\n";
  out << "speed_weight = " << fmt_double(cfg.sim.reward.speed_weight) << "\n";
  out << "lane_weight = " << fmt_double(cfg.sim.reward.lane_weight) << "\n";
  out << "speed_floor = " << fmt_double(cfg.sim.reward.speed_floor) << "\n";
  out << "\n[bicycle]\n";
  out << "heading_rate_denominator = "
      << (cfg.sim.heading_denom == sim::HeadingRateDenominator::kWheelbase ? "wheelbase"
                                                                           : "rear_axle")
      << "\n";
  out << "\n[agent]\n";
  out << "variant = " << rl::variant_name(cfg.agent.variant) << "\n";
  out << "gamma = " << fmt_double(cfg.agent.gamma) << "\n";
  out << "lr = " << fmt_double(cfg.agent.lr) << "\n";
  out << "eps_start = " << fmt_double(cfg.agent.eps.start) << "\n";
  out << "eps_end = " << fmt_double(cfg.agent.eps.end) << "\n";
  out << "eps_decay_fraction = " << fmt_double(cfg.agent.eps.decay_fraction) << "\n";
  out << "batch_size = " << cfg.agent.batch_size << "\n";
  out << "capacity = " << cfg.agent.capacity << "\n";
  out << "target_sync = " << cfg.agent.target_sync << "\n";
  out << "grad_clip_norm = " << fmt_double(cfg.agent.grad_clip_norm) << "\n";
  out << "hidden1 = " << cfg.agent.shape.hidden1 << "\n";
  out << "hidden2 = " << cfg.agent.shape.hidden2 << "\n";
  out << "head_hidden = " << cfg.agent.shape.head_hidden << "\n";
  out << "\n[per]\n";
  out << "psi = " << fmt_double(cfg.agent.per.psi) << "\n";
  out << "lambda_start = " << fmt_double(cfg.agent.per.lambda_start) << "\n";
  out << "lambda_end = " << fmt_double(cfg.agent.per.lambda_end) << "\n";
  out << "epsilon_p = " << fmt_double(cfg.agent.per.epsilon_p) << "\n";
  return out.str();
}

void save_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  const std::string text = serialize_config(cfg);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace freeway::harness
