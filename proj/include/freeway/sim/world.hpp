#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <vector>

#include "freeway/sim/models.hpp"
#include "freeway/sim/types.hpp"

namespace freeway::sim {

inline constexpr int kNearestCount = 5;
inline constexpr int kObservationDim = 5 * (1 + kNearestCount);  // 30
inline constexpr double kObsRangeX = 100.0;  // m, neighbor dx normalization

struct RewardParams {
  double speed_weight = 0.8;
  double lane_weight = 0.2;
  double speed_floor = 20.0;  // m/s, speed term is 0 at or below this
};

struct SimParams {
  RoadConfig road;
  IdmParams idm;
  MobilParams mobil;
  ControlGains gains;
  RewardParams reward;
  HeadingRateDenominator heading_denom = HeadingRateDenominator::kWheelbase;
};

struct EnvStep {
  Eigen::VectorXd observation;
  StepResult result;
};

// Lane band containing y; index 0 is leftmost.
int lane_of(double y, const RoadConfig& road);

// Speed + rightmost-lane reward in [0, 1]; 0 on collision.
double compute_reward(double ego_speed, int ego_lane, const RoadConfig& road,
                      const RewardParams& params, bool collided);

// Fixed 30-entry feature vector: one ego row then the kNearestCount nearest
// vehicles by |dx| (ties by dx, then spawn id), each row
// [presence, dx/100, dy/(K*w), dv/40, dheading]. Entries are clipped to
// [-1, 1] except the ego longitudinal term. Invariant under permutations of
// `others`.
Eigen::VectorXd encode_observation(const VehicleState& ego, std::span<const VehicleState> others,
                                   const RoadConfig& road);

// Deterministic multi-lane freeway world: the ego plus IDM/MOBIL-driven
// surrounding vehicles on a wrap-around road.
class World {
 public:
  // Spawns 1 ego + surrounding_count vehicles from cfg.seed. Throws
  // SpawnCapacity when the road cannot hold them at the configured gap.
  World(const ScenarioConfig& cfg, const SimParams& params);

  // Prearranged traffic (tests): vehicles[0] is the ego.
  World(std::vector<VehicleState> vehicles, const ScenarioConfig& cfg, const SimParams& params);

  // One policy step: apply the ego meta-action, let surrounding vehicles pick
  // lanes (MOBIL), then integrate sim_hz/policy_hz bicycle sub-steps with the
  // low-level controllers. The first collision terminates immediately.
  // Throws EpisodeFinished if the episode is already over.
  EnvStep step(Action action);

  Eigen::VectorXd observation() const;

  // MOBIL lane-change test for one surrounding vehicle; throws InvalidInput
  // when candidate_lane is off the road.
  bool mobil_decision(int vehicle_index, int candidate_lane) const;

  bool terminated() const { return terminated_; }
  bool collided() const { return collided_; }
  int steps() const { return steps_; }
  int max_steps() const { return max_steps_; }
  double odometer() const { return odometer_; }
  const VehicleState& ego() const { return vehicles_.front(); }
  int ego_lane() const { return lane_of(ego().y_c, params_.road); }
  const std::vector<VehicleState>& vehicles() const { return vehicles_; }
  const SimParams& params() const { return params_; }

 private:
  struct Neighbor {
    int index = -1;
    double center_gap = 0.0;  // m, ring distance between centers
  };

  double wrap_delta(double dx) const;
  double bumper_gap(const Neighbor& n, int from_index) const;
  std::optional<Neighbor> find_leader(int index, int lane) const;
  std::optional<Neighbor> find_follower(int index, int lane) const;
  double idm_accel_for(int index) const;
  bool any_collision() const;
  void spawn(const ScenarioConfig& cfg);
  void validate(const ScenarioConfig& cfg) const;

  ScenarioConfig cfg_;
  SimParams params_;
  std::vector<VehicleState> vehicles_;
  int steps_ = 0;
  int max_steps_ = 0;
  bool terminated_ = false;
  bool collided_ = false;
  double odometer_ = 0.0;
};

// Scenario construction per the configured ranges; cfg.seed fixes every bit.
World spawn_scenario(const ScenarioConfig& cfg, const SimParams& params);

}  // namespace freeway::sim
