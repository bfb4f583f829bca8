#include "freeway/sim/models.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>

#include "freeway/errors.hpp"

namespace freeway::sim {
namespace {

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

double clip_unit(double v) { return clamp(v, -1.0, 1.0); }

}  // namespace

double idm_acceleration(double v, double dv, double gap, double v_ex, const IdmParams& params) {
  if (gap <= 0.0)
    throw InvalidInput("idm gap " + std::to_string(gap) + " <= 0: vehicles already collide");
  if (v_ex <= 0.0) throw InvalidInput("idm expected speed must be > 0");
  const double d_ex =
      params.d_0 + params.t_gap * v + v * dv / (2.0 * std::sqrt(params.a_max * params.b_comf));
  const double speed_term = std::pow(v / v_ex, params.delta_exp);
  const double gap_term = (d_ex / gap) * (d_ex / gap);
  const double raw = params.a_max * (1.0 - speed_term - gap_term);
  return clamp(raw, kAccelMin, params.a_max);
}

bool mobil_criterion(const MobilAccelerations& acc, const MobilParams& params) {
  if (acc.new_follower_after < -params.b_safe) return false;
  const double gain = acc.ego_after - acc.ego_before +
                      params.p_polite * ((acc.new_follower_after - acc.new_follower_before) +
                                         (acc.old_follower_after - acc.old_follower_before));
  return gain >= params.a_th;
}

double longitudinal_control(double v_ex, double v, const ControlGains& gains) {
  return clamp(gains.k_p * (v_ex - v), kAccelMin, kAccelMax);
}

double steering_control(const VehicleState& vehicle, double target_lane_center_y,
                        double lane_heading, const ControlGains& gains) {
  if (vehicle.v < kSteerSpeedFloor) return 0.0;
  const double d_lat = vehicle.y_c - target_lane_center_y;
  const double v_lat_ex = -gains.k_p_lat * d_lat;
  const double heading_ex = std::asin(clip_unit(v_lat_ex / vehicle.v)) + lane_heading;
  const double heading_rate_cmd = gains.k_p_theta * (heading_ex - vehicle.heading);
  const double steer =
      std::asin(clip_unit(0.5 * (vehicle.l_r / vehicle.v) * heading_rate_cmd));
  return clamp(steer, -kSteerLimit, kSteerLimit);
}

VehicleState bicycle_step(const VehicleState& state, double accel, double steer, double dt,
                          HeadingRateDenominator denom) {
  const double wheelbase = state.l_r + state.l_f;
  const double slip = std::atan(state.l_r * std::tan(steer) / wheelbase);
  const double rate_denom =
      denom == HeadingRateDenominator::kWheelbase ? wheelbase : state.l_r;

  VehicleState next = state;
  next.x_c = state.x_c + dt * state.v * std::cos(state.heading + slip);
  next.y_c = state.y_c + dt * state.v * std::sin(state.heading + slip);
  next.heading = state.heading + dt * state.v * std::sin(slip) / rate_denom;
  next.v = clamp(state.v + dt * accel, 0.0, kSpeedCap);
  return next;
}

bool rectangles_overlap(const VehicleState& a, const VehicleState& b) {
  using Eigen::Vector2d;
  const Vector2d centers[2] = {{a.x_c, a.y_c}, {b.x_c, b.y_c}};
  const double half_len[2] = {a.length / 2.0, b.length / 2.0};
  const double half_wid[2] = {a.width / 2.0, b.width / 2.0};
  const Vector2d axes[4] = {
      {std::cos(a.heading), std::sin(a.heading)},
      {-std::sin(a.heading), std::cos(a.heading)},
      {std::cos(b.heading), std::sin(b.heading)},
      {-std::sin(b.heading), std::cos(b.heading)},
  };
  const Vector2d d = centers[1] - centers[0];
  for (const Vector2d& axis : axes) {
    double reach = 0.0;
    for (int i = 0; i < 2; ++i) {
      // projection radius of rectangle i onto this axis
      reach += half_len[i] * std::abs(axis.dot(axes[2 * i])) +
               half_wid[i] * std::abs(axis.dot(axes[2 * i + 1]));
    }
    if (std::abs(d.dot(axis)) >= reach) return false;  // separated (or touching)
  }
  return true;
}

}  // namespace freeway::sim
