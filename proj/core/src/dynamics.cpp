#include "drivesim/dynamics.hpp"

#include <algorithm>
#include <string>

namespace drivesim {

namespace {

double clip(double v, double bound) { return std::clamp(v, -bound, bound); }

}  // namespace

AgentState step_classic(const AgentState& state, const Action& action, double dt,
                        const VehicleParams& params, const ActionBounds& bounds) {
  const double accel = clip(action.acceleration, bounds.max_acceleration);
  const double steer = clip(action.steering, bounds.max_steering);

  const double v_mid = clip(state.speed + 0.5 * accel * dt, params.v_max);
  const double beta = slip_angle(steer);
  const double x_dot = v_mid * std::cos(state.heading + beta);
  const double y_dot = v_mid * std::sin(state.heading + beta);
  const double yaw_rate = v_mid * std::cos(beta) * std::tan(steer) / params.length;

  AgentState next;
  next.position = {state.position.x + x_dot * dt, state.position.y + y_dot * dt};
  next.heading = normalize_angle(state.heading + yaw_rate * dt);
  next.speed = clip(state.speed + accel * dt, params.v_max);
  next.velocity = unit_vector(next.heading) * next.speed;
  return next;
}

AgentState step_invertible(const AgentState& state, const Action& action, double dt,
                           double v_max, const ActionBounds& bounds) {
  const double accel = clip(action.acceleration, bounds.max_acceleration);
  const double steer = clip(action.steering, bounds.max_steering_command);

  const double travel = state.speed * dt + 0.5 * accel * dt * dt;

  AgentState next;
  next.position = {state.position.x + travel * std::cos(state.heading),
                   state.position.y + travel * std::sin(state.heading)};
  next.heading = normalize_angle(state.heading + steer * travel);
  next.speed = clip(state.speed + accel * dt, v_max);
  next.velocity = unit_vector(next.heading) * next.speed;
  return next;
}

Action invert_action(const AgentState& from, const AgentState& to, double dt) {
  Action action;
  action.acceleration = (to.speed - from.speed) / dt;
  const double travel = from.speed * dt + 0.5 * action.acceleration * dt * dt;
  action.steering =
      std::abs(travel) < 1e-9 ? 0.0 : angle_diff(to.heading, from.heading) / travel;
  return action;
}

ActionGrid::ActionGrid(std::vector<double> acceleration_levels,
                       std::vector<double> steering_levels)
    : accel_(std::move(acceleration_levels)), steer_(std::move(steering_levels)) {
  auto strictly_increasing = [](const std::vector<double>& v) {
    return !v.empty() && std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
  };
  if (!strictly_increasing(accel_) || !strictly_increasing(steer_)) {
    throw ActionGridError("action grid levels must be non-empty and strictly increasing");
  }
}

ActionGrid ActionGrid::linear(std::size_t n_accel, std::size_t n_steer, double max_acceleration,
                              double max_steering) {
  auto levels = [](std::size_t n, double bound) {
    std::vector<double> out(n);
    if (n == 1) {
      out[0] = 0.0;
      return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = -bound + 2.0 * bound * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return out;
  };
  return ActionGrid(levels(n_accel, max_acceleration), levels(n_steer, max_steering));
}

Action ActionGrid::discretize(std::size_t index) const {
  if (index >= size()) {
    throw ActionGridError("action index " + std::to_string(index) + " out of range [0, " +
                          std::to_string(size()) + ")");
  }
  return {accel_[index / steer_.size()], steer_[index % steer_.size()], 0.0};
}

namespace {

std::size_t nearest_level(const std::vector<double>& levels, double value) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (std::abs(levels[i] - value) < std::abs(levels[best] - value)) best = i;
  }
  return best;
}

}  // namespace

std::size_t ActionGrid::action_index(const Action& action) const {
  return nearest_level(accel_, action.acceleration) * steer_.size() +
         nearest_level(steer_, action.steering);
}

}  // namespace drivesim
