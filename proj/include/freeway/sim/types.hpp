#pragma once

#include <cstdint>

namespace freeway::sim {

inline constexpr double kSpeedCap = 40.0;        // m/s, hard cap for every vehicle
inline constexpr double kNoLeaderGap = 1e9;      // m, sentinel when no leader exists
inline constexpr double kAccelMin = -10.0;       // m/s^2
inline constexpr double kAccelMax = 6.0;         // m/s^2
inline constexpr double kSteerLimit = 0.7853981633974483;  // pi/4 rad
inline constexpr double kSteerSpeedFloor = 0.5;  // m/s, steering forced to 0 below this

// Pose, speed, geometry and controller setpoints of one vehicle. `id` is the
// spawn order, used for deterministic tie-breaking.
struct VehicleState {
  int id = 0;
  double x_c = 0.0;     // m, longitudinal position of the center of gravity
  double y_c = 0.0;     // m, lateral position
  double v = 0.0;       // m/s
  double heading = 0.0; // rad, 0 along +x
  int target_lane = 0;
  double v_ex = 0.0;    // m/s, speed setpoint
  double length = 5.0;  // m
  double width = 2.0;   // m
  double l_r = 2.5;     // m, CG to rear axle
  double l_f = 2.5;     // m, CG to front axle
};

struct IdmParams {
  double a_max = 6.0;    // m/s^2, maximum acceleration
  double delta_exp = 4.0;
  double d_0 = 10.0;     // m, minimum relative distance
  double t_gap = 1.5;    // s, safe time gap
  double b_comf = 5.0;   // m/s^2, comfortable deceleration
};

struct MobilParams {
  double b_safe = 2.0;    // m/s^2, deceleration limit for the new follower
  double p_polite = 0.001;
  double a_th = 0.2;      // m/s^2, incentive threshold
};

struct ControlGains {
  double k_p = 1.0 / 0.6;       // 1/s, longitudinal speed gain
  double k_p_lat = 1.0 / 3.0;   // 1/s, lateral position gain
  double k_p_theta = 1.0 / 0.2; // 1/s, heading gain
};

// Heading-rate denominator of the kinematic model: the full wheelbase
// (l_r + l_f) or the rear-axle distance l_r alone.
enum class HeadingRateDenominator { kWheelbase, kRearAxle };

// Straight multi-lane road. Lane index 0 is leftmost; centerline of lane i is
// at y = (i + 0.5) * lane_width. Longitudinal coordinates wrap at lane_length.
struct RoadConfig {
  int lane_count = 3;
  double lane_width = 4.0;   // m
  double lane_length = 1000.0;  // m

  double lane_center(int lane) const { return (lane + 0.5) * lane_width; }
};

struct ScenarioConfig {
  int surrounding_count = 15;
  double ego_v0_min = 23.0;   // m/s
  double ego_v0_max = 25.0;
  double other_v0_min = 20.0;
  double other_v0_max = 23.0;
  double episode_duration = 100.0;  // s
  int policy_hz = 1;
  int sim_hz = 15;
  double min_spawn_gap = 25.0;  // m, same-lane center-to-center at spawn
  uint64_t seed = 0;
};

enum class Action : int {
  kLaneLeft = 0,
  kIdle = 1,
  kLaneRight = 2,
  kSlower = 3,
  kFaster = 4,
};

inline constexpr int kActionCount = 5;
inline constexpr double kSpeedStep = 5.0;  // m/s per FASTER/SLOWER action

struct StepInfo {
  bool collision = false;
  double ego_speed = 0.0;       // m/s at the end of the step
  double distance = 0.0;        // m, cumulative ego odometer
};

struct StepResult {
  double reward = 0.0;  // in [0, 1]
  bool terminated = false;
  StepInfo info;
};

}  // namespace freeway::sim
