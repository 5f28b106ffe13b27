#include <gtest/gtest.h>

#include <cmath>

#include "drivesim/dynamics.hpp"
#include "drivesim/geometry.hpp"
#include "drivesim/synthetic.hpp"
#include "oracles.hpp"

namespace drivesim {
namespace {

AgentState make_state(double x, double y, double heading, double speed) {
  return {{x, y}, heading, speed, unit_vector(heading) * speed};
}

double rel_err(double got, long double want) {
  return static_cast<double>(std::fabs(static_cast<long double>(got) - want) /
                             std::max(1.0L, std::fabs(want)));
}

TEST(StepClassic, StraightLine) {
  const AgentState next = step_classic(make_state(0, 0, 0, 10), {0, 0, 0}, 0.1, {4.0, 100.0});
  EXPECT_DOUBLE_EQ(next.position.x, 1.0);
  EXPECT_EQ(next.position.y, 0.0);
  EXPECT_EQ(next.heading, 0.0);
  EXPECT_EQ(next.speed, 10.0);
}

TEST(StepClassic, SpeedSaturatesAtVmax) {
  const AgentState next = step_classic(make_state(0, 0, 0, 10), {5, 0, 0}, 0.1, {4.0, 10.0});
  EXPECT_EQ(next.speed, 10.0);
  // v_bar is clipped too, so the displacement is 10 * dt.
  EXPECT_DOUBLE_EQ(next.position.x, 1.0);
}

TEST(StepClassic, FrozenReferenceStep) {
  const AgentState next =
      step_classic(make_state(1.3, -2.0, 0.4, 6.5), {1.2, 0.3, 0}, 0.1, {4.6, 100.0});
  // Frozen from the long-double reference evaluation.
  EXPECT_NEAR(next.position.x, 1.8580690579892371474, 1e-12);
  EXPECT_NEAR(next.position.y, -1.6551885638279880573, 1e-12);
  EXPECT_NEAR(next.heading, 0.4435956681253203528, 1e-12);
  EXPECT_NEAR(next.speed, 6.62, 1e-12);
}

TEST(StepClassic, MatchesLongDoubleOracle) {
  Rng rng(101);
  for (int i = 0; i < 1000; ++i) {
    const double dt = (i % 2 == 0) ? 0.02 : 0.1;
    const double length = rng.uniform(2.0, 12.0);
    const AgentState s = make_state(rng.uniform(-500, 500), rng.uniform(-500, 500),
                                    rng.uniform(-kPi, kPi), rng.uniform(-10, 30));
    const Action a{rng.uniform(-4, 4), rng.uniform(-0.7, 0.7), 0};
    const AgentState got = step_classic(s, a, dt, {length, 100.0});
    const auto want = oracle::classic_step(s.position.x, s.position.y, s.heading, s.speed,
                                           a.acceleration, a.steering, dt, length, 100.0);
    EXPECT_LE(rel_err(got.position.x, want.x), 1e-9) << i;
    EXPECT_LE(rel_err(got.position.y, want.y), 1e-9) << i;
    EXPECT_LE(std::fabs(angle_diff(got.heading, static_cast<double>(want.heading))), 1e-9) << i;
    EXPECT_LE(rel_err(got.speed, want.speed), 1e-9) << i;
  }
}

TEST(StepClassic, SymmetricUnderSteeringFlip) {
  Rng rng(102);
  for (int i = 0; i < 200; ++i) {
    const double v = rng.uniform(0, 20);
    const Action a{rng.uniform(-4, 4), rng.uniform(-0.7, 0.7), 0};
    const Action mirrored{a.acceleration, -a.steering, 0};
    const AgentState p = step_classic(make_state(0, 0, 0, v), a, 0.1, {4.5, 100.0});
    const AgentState q = step_classic(make_state(0, 0, 0, v), mirrored, 0.1, {4.5, 100.0});
    EXPECT_DOUBLE_EQ(p.position.x, q.position.x);
    EXPECT_DOUBLE_EQ(p.position.y, -q.position.y);
    EXPECT_DOUBLE_EQ(p.heading, -q.heading);
  }
}

TEST(StepClassic, SpeedStaysWithinBounds) {
  Rng rng(103);
  AgentState s = make_state(0, 0, 0, 0);
  for (int i = 0; i < 2000; ++i) {
    s = step_classic(s, {rng.uniform(-4, 4), rng.uniform(-0.7, 0.7), 0}, 0.1, {4.5, 12.0});
    ASSERT_LE(std::fabs(s.speed), 12.0);
    ASSERT_GT(s.heading, -kPi);
    ASSERT_LE(s.heading, kPi);
  }
}

TEST(StepClassic, SlipAngleIdentity) {
  for (double delta : {-0.7, -0.2, 0.0, 0.3, 0.69}) {
    EXPECT_NEAR(std::tan(slip_angle(delta)), 0.5 * std::tan(delta), 1e-15);
  }
}

TEST(StepInvertible, ZeroSteerAdvancesAlongHeading) {
  const AgentState next = step_invertible(make_state(1, 1, 0.7, 4), {0, 0, 0}, 0.1);
  EXPECT_NEAR(next.position.x, 1 + 0.4 * std::cos(0.7), 1e-15);
  EXPECT_NEAR(next.position.y, 1 + 0.4 * std::sin(0.7), 1e-15);
  EXPECT_EQ(next.heading, 0.7);
}

TEST(StepInvertible, AtRestNothingMoves) {
  const AgentState s = make_state(3, -1, 0.2, 0);
  const AgentState next = step_invertible(s, {0, 0.5, 0}, 0.1);
  EXPECT_EQ(next.position, s.position);
  EXPECT_EQ(next.heading, s.heading);
  EXPECT_EQ(next.speed, 0.0);
}

TEST(StepInvertible, YawProportionalToTravel) {
  const AgentState next = step_invertible(make_state(0, 0, 0, 5), {2, 0.1, 0}, 0.1);
  EXPECT_NEAR(next.heading, 0.051, 1e-15);
  EXPECT_NEAR(norm(next.position), 0.51, 1e-15);
  EXPECT_NEAR(next.speed, 5.2, 1e-15);
}

TEST(InvertAction, IdenticalStatesGiveZero) {
  const AgentState s = make_state(4, 5, 1.0, 0);
  const Action a = invert_action(s, s, 0.1);
  EXPECT_EQ(a.acceleration, 0.0);
  EXPECT_EQ(a.steering, 0.0);
}

TEST(InvertAction, RoundTripRandom) {
  Rng rng(104);
  int checked = 0;
  while (checked < 1000) {
    const AgentState s = make_state(rng.uniform(-100, 100), rng.uniform(-100, 100),
                                    rng.uniform(-kPi, kPi), rng.uniform(0, 30));
    const Action a{rng.uniform(-4, 4), rng.uniform(-0.3, 0.3), 0};
    const double dt = 0.1;
    if (std::fabs(s.speed * dt + 0.5 * a.acceleration * dt * dt) < 1e-6) continue;
    const AgentState next = step_invertible(s, a, dt);
    if (next.speed != s.speed + a.acceleration * dt) continue;  // clipped at v_max
    const Action back = invert_action(s, next, dt);
    ASSERT_NEAR(back.acceleration, a.acceleration, 1e-9) << checked;
    ASSERT_NEAR(back.steering, a.steering, 1e-9) << checked;
    ++checked;
  }
}

TEST(InvertAction, ReplayReproducesSyntheticLog) {
  const Scenario sc = generate_synthetic({MapTemplate::kStraightRoad, 4, 7, 0.1, 91});
  for (const ObjectLog& obj : sc.objects) {
    AgentState s{obj.states[0].position, obj.states[0].heading, norm(obj.states[0].velocity),
                 obj.states[0].velocity};
    for (std::size_t t = 0; t + 1 < obj.states.size(); ++t) {
      const LoggedStep& a = obj.states[t];
      const LoggedStep& b = obj.states[t + 1];
      const AgentState from{a.position, a.heading, norm(a.velocity), a.velocity};
      const AgentState to{b.position, b.heading, norm(b.velocity), b.velocity};
      s = step_invertible(s, invert_action(from, to, sc.timestep), sc.timestep);
      ASSERT_LE(distance(s.position, b.position), 1e-6) << "object " << obj.id << " t " << t;
    }
  }
}

TEST(ActionGrid, IndexZeroIsMinimum) {
  const ActionGrid g = ActionGrid::linear(7, 13, 4.0, 0.7);
  EXPECT_EQ(g.size(), 91u);
  const Action a = g.discretize(0);
  EXPECT_EQ(a.acceleration, -4.0);
  EXPECT_EQ(a.steering, -0.7);
}

TEST(ActionGrid, Bijection) {
  const ActionGrid g = ActionGrid::linear();
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_EQ(g.action_index(g.discretize(k)), k);
  EXPECT_THROW(g.discretize(g.size()), ActionGridError);
}

TEST(ActionGrid, NearestMatchesExhaustiveScan) {
  const ActionGrid g = ActionGrid::linear();
  Rng rng(105);
  for (int i = 0; i < 2000; ++i) {
    const Action a{rng.uniform(-6, 6), rng.uniform(-1, 1), 0};
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Action c = g.discretize(k);
      const double d = std::fabs(c.acceleration - a.acceleration) * 1e6 +
                       std::fabs(c.steering - a.steering);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    // Components are independent, so compare each one separately.
    const Action got = g.discretize(g.action_index(a));
    const Action want = g.discretize(best);
    EXPECT_EQ(got.acceleration, want.acceleration) << i;
    double best_s = std::numeric_limits<double>::infinity();
    double want_s = 0;
    for (double lvl : g.steering_levels()) {
      if (std::fabs(lvl - a.steering) < best_s) {
        best_s = std::fabs(lvl - a.steering);
        want_s = lvl;
      }
    }
    EXPECT_EQ(got.steering, want_s) << i;
  }
}

}  // namespace
}  // namespace drivesim
