#pragma once

#include "freeway/sim/types.hpp"

namespace freeway::sim {

// Car-following acceleration:
//   a = a_max [1 - (v/v_ex)^delta - (d_ex/gap)^2]
//   d_ex = d_0 + T v + v dv / (2 sqrt(a_max b_comf))
// `dv` is v - v_leader; pass gap = kNoLeaderGap (and dv = 0) when there is no
// leader. The result is clamped to [kAccelMin, a_max]. Throws when gap <= 0:
// the caller must have detected the collision first.
double idm_acceleration(double v, double dv, double gap, double v_ex, const IdmParams& params);

// The six accelerations entering the lane-change criterion, all produced by
// idm_acceleration (with the sentinel gap where a neighbor is absent).
struct MobilAccelerations {
  double ego_before = 0.0;           // lane changer with its current leader
  double ego_after = 0.0;            // lane changer with the target-lane leader
  double new_follower_before = 0.0;  // target-lane follower today
  double new_follower_after = 0.0;   // target-lane follower behind the changer
  double old_follower_before = 0.0;  // current-lane follower behind the changer
  double old_follower_after = 0.0;   // current-lane follower after the gap opens
};

// Change iff the new follower keeps a_n_after >= -b_safe and the politeness-
// weighted acceleration gain clears a_th.
bool mobil_criterion(const MobilAccelerations& acc, const MobilParams& params);

// Proportional speed tracking, a = k_p (v_ex - v), clamped to
// [kAccelMin, kAccelMax].
double longitudinal_control(double v_ex, double v, const ControlGains& gains);

// Cascaded lateral-position -> heading -> steering controller. Arcsine
// arguments are clipped to [-1, 1]; steering is 0 below kSteerSpeedFloor and
// clamped to +-kSteerLimit.
double steering_control(const VehicleState& vehicle, double target_lane_center_y,
                        double lane_heading, const ControlGains& gains);

// One forward-Euler step of the kinematic bicycle model. Speed is clamped to
// [0, kSpeedCap].
VehicleState bicycle_step(const VehicleState& state, double accel, double steer, double dt,
                          HeadingRateDenominator denom = HeadingRateDenominator::kWheelbase);

// Strict-interior overlap of two oriented rectangles (separating axes); edge
// contact does not count. Positions are taken as given, so callers resolve
// any wrap-around before this test.
bool rectangles_overlap(const VehicleState& a, const VehicleState& b);

}  // namespace freeway::sim
