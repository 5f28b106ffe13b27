#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "drivesim/types.hpp"

namespace drivesim {

struct AgentState {
  Vec2 position;
  double heading = 0.0;  // (-pi, pi]
  double speed = 0.0;    // signed, m/s
  Vec2 velocity;         // world-frame velocity, kept in sync by both steppers

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

// For the classic model `steering` is the front wheel angle (rad); for the
// invertible model it is the yaw-per-meter steering command (1/m).
// `head_rotation` only drives the view cone.
struct Action {
  double acceleration = 0.0;
  double steering = 0.0;
  double head_rotation = 0.0;

  friend bool operator==(const Action&, const Action&) = default;
};

struct ActionBounds {
  double max_acceleration = 4.0;
  double max_steering = 0.7;
  // Invertible model only; unbounded so every logged transition is reachable.
  double max_steering_command = std::numeric_limits<double>::infinity();
};

struct VehicleParams {
  double length = 4.5;   // wheelbase, taken as the vehicle length
  double v_max = 100.0;

  double rear_axle_distance() const { return 0.5 * length; }
};

enum class DynamicsModel { kClassic, kInvertible };

// Kinematic bicycle about the center of gravity:
//   v_bar = clip(v + a dt / 2), beta = atan(tan(delta) / 2)
//   x += v_bar cos(theta + beta) dt, y += v_bar sin(theta + beta) dt
//   theta += v_bar cos(beta) tan(delta) / L dt, v = clip(v + a dt)
AgentState step_classic(const AgentState& state, const Action& action, double dt,
                        const VehicleParams& params, const ActionBounds& bounds = {});

// Double integrator along the heading with a yaw update proportional to the
// distance travelled: theta += s (v dt + a dt^2 / 2).
AgentState step_invertible(const AgentState& state, const Action& action, double dt,
                           double v_max = 100.0, const ActionBounds& bounds = {});

// Recovers the invertible-model action between two consecutive states. The
// steering command is 0 when the travelled distance is below 1e-9 m.
Action invert_action(const AgentState& from, const AgentState& to, double dt);

// Sideslip angle at the center of gravity for l_r = L / 2.
inline double slip_angle(double steering) { return std::atan(0.5 * std::tan(steering)); }

// ---------------------------------------------------------------------------
// Discrete action grid. Joint index = accel_index * steering_levels + steer_index.

class ActionGrid {
 public:
  ActionGrid(std::vector<double> acceleration_levels, std::vector<double> steering_levels);

  // Linearly spaced levels over [-max, max] for both components.
  static ActionGrid linear(std::size_t n_accel = 7, std::size_t n_steer = 13,
                           double max_acceleration = 4.0, double max_steering = 0.7);

  std::size_t size() const { return accel_.size() * steer_.size(); }
  const std::vector<double>& acceleration_levels() const { return accel_; }
  const std::vector<double>& steering_levels() const { return steer_; }

  // Throws ActionGridError for indices >= size().
  Action discretize(std::size_t index) const;

  // Nearest level per component; ties go to the lower level.
  std::size_t action_index(const Action& action) const;

 private:
  std::vector<double> accel_;
  std::vector<double> steer_;
};

class ActionGridError : public Error {
 public:
  using Error::Error;
};

}  // namespace drivesim
