#include "freeway/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "freeway/errors.hpp"
#include "freeway/rng.hpp"

namespace freeway::sim {
namespace {

constexpr int kSpawnAttempts = 1000;
constexpr double kCollisionBroadPhase = 8.0;  // m, beyond this no overlap is possible

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

double clip_unit(double v) { return clamp(v, -1.0, 1.0); }

}  // namespace

int lane_of(double y, const RoadConfig& road) {
  const int lane = static_cast<int>(std::floor(y / road.lane_width));
  return std::clamp(lane, 0, road.lane_count - 1);
}

double compute_reward(double ego_speed, int ego_lane, const RoadConfig& road,
                      const RewardParams& params, bool collided) {
  if (collided) return 0.0;
  const double speed_term =
      clamp((ego_speed - params.speed_floor) / (kSpeedCap - params.speed_floor), 0.0, 1.0);
  const double lane_term =
      static_cast<double>(ego_lane) / static_cast<double>(road.lane_count - 1);
  return params.speed_weight * speed_term + params.lane_weight * lane_term;
}

Eigen::VectorXd encode_observation(const VehicleState& ego, std::span<const VehicleState> others,
                                   const RoadConfig& road) {
  const double road_extent = road.lane_count * road.lane_width;
  Eigen::VectorXd obs = Eigen::VectorXd::Zero(kObservationDim);
  obs(0) = 1.0;
  obs(1) = ego.x_c / road.lane_length;
  obs(2) = clip_unit(ego.y_c / road_extent);
  obs(3) = clip_unit(ego.v / kSpeedCap);
  obs(4) = clip_unit(ego.heading);

  struct Entry {
    double dx;
    const VehicleState* vehicle;
  };
  std::vector<Entry> entries;
  entries.reserve(others.size());
  const double half = road.lane_length / 2.0;
  for (const VehicleState& other : others) {
    double dx = std::fmod(other.x_c - ego.x_c, road.lane_length);
    if (dx >= half) dx -= road.lane_length;
    if (dx < -half) dx += road.lane_length;
    entries.push_back({dx, &other});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    const double abs_a = std::abs(a.dx), abs_b = std::abs(b.dx);
    if (abs_a != abs_b) return abs_a < abs_b;
    if (a.dx != b.dx) return a.dx < b.dx;
    return a.vehicle->id < b.vehicle->id;
  });

  const size_t count = std::min<size_t>(kNearestCount, entries.size());
  for (size_t i = 0; i < count; ++i) {
    const Entry& e = entries[i];
    const Eigen::Index base = 5 * (1 + static_cast<Eigen::Index>(i));
    obs(base + 0) = 1.0;
    obs(base + 1) = clip_unit(e.dx / kObsRangeX);
    obs(base + 2) = clip_unit((e.vehicle->y_c - ego.y_c) / road_extent);
    obs(base + 3) = clip_unit((e.vehicle->v - ego.v) / kSpeedCap);
    obs(base + 4) = clip_unit(e.vehicle->heading - ego.heading);
  }
  return obs;
}

World::World(const ScenarioConfig& cfg, const SimParams& params) : cfg_(cfg), params_(params) {
  validate(cfg);
  max_steps_ = static_cast<int>(std::lround(cfg.episode_duration * cfg.policy_hz));
  spawn(cfg);
}

World::World(std::vector<VehicleState> vehicles, const ScenarioConfig& cfg,
             const SimParams& params)
    : cfg_(cfg), params_(params), vehicles_(std::move(vehicles)) {
  validate(cfg);
  if (vehicles_.empty()) throw InvalidInput("prearranged world needs at least the ego");
  max_steps_ = static_cast<int>(std::lround(cfg.episode_duration * cfg.policy_hz));
  for (size_t i = 0; i < vehicles_.size(); ++i) vehicles_[i].id = static_cast<int>(i);
}

void World::validate(const ScenarioConfig& cfg) const {
  if (params_.road.lane_count < 2) throw InvalidInput("road needs at least 2 lanes");
  if (cfg.policy_hz < 1 || cfg.sim_hz < 1 || cfg.sim_hz % cfg.policy_hz != 0)
    throw InvalidInput("sim_hz must be a positive multiple of policy_hz");
  if (cfg.episode_duration <= 0.0) throw InvalidInput("episode duration must be > 0");
}

void World::spawn(const ScenarioConfig& cfg) {
  SplitMix64 rng(cfg.seed);
  const RoadConfig& road = params_.road;

  auto place = [&](double v0_min, double v0_max, int id) {
    for (int attempt = 0; attempt < kSpawnAttempts; ++attempt) {
      const int lane = rng.next_below(road.lane_count);
      const double x = rng.uniform(0.0, road.lane_length);
      bool clear = true;
      for (const VehicleState& other : vehicles_) {
        if (lane_of(other.y_c, road) != lane) continue;
        if (std::abs(wrap_delta(other.x_c - x)) < cfg.min_spawn_gap) {
          clear = false;
          break;
        }
      }
      if (!clear) continue;
      VehicleState vehicle;
      vehicle.id = id;
      vehicle.x_c = x;
      vehicle.y_c = road.lane_center(lane);
      vehicle.v = rng.uniform(v0_min, v0_max);
      vehicle.heading = 0.0;
      vehicle.target_lane = lane;
      vehicle.v_ex = vehicle.v;
      vehicles_.push_back(vehicle);
      return;
    }
    throw SpawnCapacity("could not place vehicle " + std::to_string(id) + " after " +
                        std::to_string(kSpawnAttempts) + " attempts");
  };

  place(cfg.ego_v0_min, cfg.ego_v0_max, 0);
  for (int i = 0; i < cfg.surrounding_count; ++i)
    place(cfg.other_v0_min, cfg.other_v0_max, i + 1);
}

double World::wrap_delta(double dx) const {
  const double length = params_.road.lane_length;
  double d = std::fmod(dx, length);
  if (d >= length / 2.0) d -= length;
  if (d < -length / 2.0) d += length;
  return d;
}

double World::bumper_gap(const Neighbor& n, int from_index) const {
  return n.center_gap - (vehicles_[n.index].length + vehicles_[from_index].length) / 2.0;
}

std::optional<World::Neighbor> World::find_leader(int index, int lane) const {
  const double length = params_.road.lane_length;
  std::optional<Neighbor> best;
  for (int i = 0; i < static_cast<int>(vehicles_.size()); ++i) {
    if (i == index || lane_of(vehicles_[i].y_c, params_.road) != lane) continue;
    double ahead = std::fmod(vehicles_[i].x_c - vehicles_[index].x_c, length);
    if (ahead < 0.0) ahead += length;
    if (ahead == 0.0) ahead = length;  // co-located: treat as a full ring away
    if (!best || ahead < best->center_gap) best = Neighbor{i, ahead};
  }
  return best;
}

std::optional<World::Neighbor> World::find_follower(int index, int lane) const {
  const double length = params_.road.lane_length;
  std::optional<Neighbor> best;
  for (int i = 0; i < static_cast<int>(vehicles_.size()); ++i) {
    if (i == index || lane_of(vehicles_[i].y_c, params_.road) != lane) continue;
    double behind = std::fmod(vehicles_[index].x_c - vehicles_[i].x_c, length);
    if (behind < 0.0) behind += length;
    if (behind == 0.0) behind = length;
    if (!best || behind < best->center_gap) best = Neighbor{i, behind};
  }
  return best;
}

// IDM acceleration toward the nearest leader, considering the target lane as
// well while a lane change is in progress.
double World::idm_accel_for(int index) const {
  const VehicleState& vehicle = vehicles_[index];
  auto accel_in_lane = [&](int lane) {
    const auto leader = find_leader(index, lane);
    double gap = kNoLeaderGap;
    double dv = 0.0;
    if (leader) {
      gap = bumper_gap(*leader, index);
      dv = vehicle.v - vehicles_[leader->index].v;
      if (gap <= 0.0) gap = 1e-3;  // overlapping laterally-offset pair: brake hard
    }
    return idm_acceleration(vehicle.v, dv, gap, vehicle.v_ex, params_.idm);
  };
  const int current = lane_of(vehicle.y_c, params_.road);
  double accel = accel_in_lane(current);
  if (vehicle.target_lane != current)
    accel = std::min(accel, accel_in_lane(vehicle.target_lane));
  return accel;
}

bool World::mobil_decision(int vehicle_index, int candidate_lane) const {
  if (vehicle_index < 1 || vehicle_index >= static_cast<int>(vehicles_.size()))
    throw InvalidInput("mobil_decision expects a surrounding vehicle index");
  if (candidate_lane < 0 || candidate_lane >= params_.road.lane_count)
    throw InvalidInput("candidate lane " + std::to_string(candidate_lane) + " is off the road");

  const int current = lane_of(vehicles_[vehicle_index].y_c, params_.road);
  auto leader_cur = find_leader(vehicle_index, current);
  auto follower_cur = find_follower(vehicle_index, current);
  auto leader_tgt = find_leader(vehicle_index, candidate_lane);
  auto follower_tgt = find_follower(vehicle_index, candidate_lane);

  // On the ring a lane with a single vehicle reports it both ahead and
  // behind; keep only the nearer role.
  auto dedupe = [](std::optional<Neighbor>& leader, std::optional<Neighbor>& follower) {
    if (leader && follower && leader->index == follower->index) {
      if (leader->center_gap <= follower->center_gap)
        follower.reset();
      else
        leader.reset();
    }
  };
  dedupe(leader_cur, follower_cur);
  dedupe(leader_tgt, follower_tgt);

  // Ring bumper gap from `from` to `to`; <= 0 means they are abreast.
  auto gap_to = [&](int from, int to) {
    double ahead = std::fmod(vehicles_[to].x_c - vehicles_[from].x_c, params_.road.lane_length);
    if (ahead <= 0.0) ahead += params_.road.lane_length;
    return ahead - (vehicles_[to].length + vehicles_[from].length) / 2.0;
  };
  auto accel_of = [&](int subject, std::optional<int> leader) -> std::optional<double> {
    const VehicleState& s = vehicles_[subject];
    double gap = kNoLeaderGap;
    double dv = 0.0;
    if (leader) {
      gap = gap_to(subject, *leader);
      dv = s.v - vehicles_[*leader].v;
    }
    if (gap <= 0.0) return std::nullopt;  // side-by-side: no valid evaluation
    return idm_acceleration(s.v, dv, gap, s.v_ex, params_.idm);
  };
  auto index_of = [](const std::optional<Neighbor>& n) {
    return n ? std::optional<int>(n->index) : std::nullopt;
  };

  MobilAccelerations acc;
  const auto ego_before = accel_of(vehicle_index, index_of(leader_cur));
  const auto ego_after = accel_of(vehicle_index, index_of(leader_tgt));
  if (!ego_before || !ego_after) return false;
  acc.ego_before = *ego_before;
  acc.ego_after = *ego_after;

  if (follower_tgt) {
    const auto before = accel_of(follower_tgt->index, index_of(leader_tgt));
    const auto after = accel_of(follower_tgt->index, vehicle_index);
    if (!before || !after) return false;
    acc.new_follower_before = *before;
    acc.new_follower_after = *after;
  }
  if (follower_cur) {
    const auto before = accel_of(follower_cur->index, vehicle_index);
    const auto after = accel_of(follower_cur->index, index_of(leader_cur));
    if (!before || !after) return false;
    acc.old_follower_before = *before;
    acc.old_follower_after = *after;
  }
  return mobil_criterion(acc, params_.mobil);
}

bool World::any_collision() const {
  for (size_t i = 0; i < vehicles_.size(); ++i) {
    for (size_t j = i + 1; j < vehicles_.size(); ++j) {
      const double dx = wrap_delta(vehicles_[j].x_c - vehicles_[i].x_c);
      if (std::abs(dx) > kCollisionBroadPhase ||
          std::abs(vehicles_[j].y_c - vehicles_[i].y_c) > kCollisionBroadPhase)
        continue;
      VehicleState shifted = vehicles_[j];
      shifted.x_c = vehicles_[i].x_c + dx;
      if (rectangles_overlap(vehicles_[i], shifted)) return true;
    }
  }
  return false;
}

EnvStep World::step(Action action) {
  if (terminated_) throw EpisodeFinished("step() on a finished episode");
  const RoadConfig& road = params_.road;
  VehicleState& ego = vehicles_.front();

  switch (action) {
    case Action::kLaneLeft:
      ego.target_lane = std::max(0, ego.target_lane - 1);
      break;
    case Action::kLaneRight:
      ego.target_lane = std::min(road.lane_count - 1, ego.target_lane + 1);
      break;
    case Action::kSlower:
      ego.v_ex = clamp(ego.v_ex - kSpeedStep, 0.0, kSpeedCap);
      break;
    case Action::kFaster:
      ego.v_ex = clamp(ego.v_ex + kSpeedStep, 0.0, kSpeedCap);
      break;
    case Action::kIdle:
      break;
    default:
      throw InvalidInput("unknown action index " + std::to_string(static_cast<int>(action)));
  }

  // Lane decisions once per policy step, in spawn order; a vehicle still
  // completing a change does not start another one.
  for (int i = 1; i < static_cast<int>(vehicles_.size()); ++i) {
    VehicleState& vehicle = vehicles_[i];
    const int lane = lane_of(vehicle.y_c, road);
    if (vehicle.target_lane != lane) continue;
    for (const int candidate : {lane - 1, lane + 1}) {
      if (candidate < 0 || candidate >= road.lane_count) continue;
      if (mobil_decision(i, candidate)) {
        vehicle.target_lane = candidate;
        break;
      }
    }
  }

  const int sub_steps = cfg_.sim_hz / cfg_.policy_hz;
  const double dt = 1.0 / static_cast<double>(cfg_.sim_hz);
  std::vector<double> accel(vehicles_.size()), steer(vehicles_.size());
  for (int s = 0; s < sub_steps && !collided_; ++s) {
    for (size_t i = 0; i < vehicles_.size(); ++i) {
      const VehicleState& vehicle = vehicles_[i];
      accel[i] = i == 0 ? longitudinal_control(vehicle.v_ex, vehicle.v, params_.gains)
                        : idm_accel_for(static_cast<int>(i));
      steer[i] = steering_control(vehicle, road.lane_center(vehicle.target_lane), 0.0,
                                  params_.gains);
    }
    odometer_ += ego.v * dt;
    for (size_t i = 0; i < vehicles_.size(); ++i) {
      vehicles_[i] = bicycle_step(vehicles_[i], accel[i], steer[i], dt, params_.heading_denom);
      double x = std::fmod(vehicles_[i].x_c, road.lane_length);
      if (x < 0.0) x += road.lane_length;
      vehicles_[i].x_c = x;
    }
    if (any_collision()) collided_ = true;
  }

  ++steps_;
  if (collided_ || steps_ >= max_steps_) terminated_ = true;

  EnvStep out;
  out.result.reward = compute_reward(ego.v, ego_lane(), road, params_.reward, collided_);
  out.result.terminated = terminated_;
  out.result.info = {collided_, ego.v, odometer_};
  out.observation = observation();
  return out;
}

Eigen::VectorXd World::observation() const {
  return encode_observation(vehicles_.front(),
                            std::span<const VehicleState>(vehicles_).subspan(1), params_.road);
}

World spawn_scenario(const ScenarioConfig& cfg, const SimParams& params) {
  return World(cfg, params);
}

}  // namespace freeway::sim
