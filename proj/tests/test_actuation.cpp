#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "squidsim/actuation.hpp"

using namespace squidsim;

TEST_CASE("command mapping")
{
  ActuatorState a = make_actuators({}, 9e-5);
  a = apply_command(a, {2, MotorAction::forward, 1.0});
  CHECK(a.pump[1] == 1.0);
  CHECK(a.pump[0] == 0.0);
  a = apply_command(a, {3, MotorAction::reverse, 0.4});
  CHECK(a.pump[2] == -0.4);
  a = apply_command(a, {2, MotorAction::stop, 1.0});
  CHECK(a.pump[1] == 0.0);
  CHECK_THROWS_AS(apply_command(a, {7, MotorAction::stop}), std::out_of_range);
  CHECK_THROWS_AS(apply_command(a, {0, MotorAction::stop}), std::out_of_range);
}

TEST_CASE("limit latches")
{
  ActuatorState a = make_actuators({}, 1.5e-4);
  a.ballast[0].limit = LimitLatch::full;

  SUBCASE("same-direction command is ignored")
  {
    const ActuatorState b = apply_command(a, {5, MotorAction::forward, 1.0});
    CHECK(b == a);
  }
  SUBCASE("opposite command clears the latch and runs")
  {
    const ActuatorState b = apply_command(a, {5, MotorAction::reverse, 1.0});
    CHECK(b.ballast[0].limit == LimitLatch::none);
    CHECK(b.ballast[0].motor == BallastMotor::release);
  }
}

TEST_CASE("ballast integration and clamping")
{
  BallastCylinder c;
  c.rate = 2e-5;

  c.fill = 1.4e-4;
  c.motor = BallastMotor::intake;
  BallastCylinder n = ballast_step(c, 1.0);
  CHECK(n.fill == 1.5e-4);
  CHECK(n.motor == BallastMotor::stopped);
  CHECK(n.limit == LimitLatch::full);

  c.fill = 0.0;
  c.motor = BallastMotor::release;
  n = ballast_step(c, 0.3);
  CHECK(n.fill == 0.0);
  CHECK(n.motor == BallastMotor::stopped);
  CHECK(n.limit == LimitLatch::empty);

  c.fill = 5e-5;
  c.motor = BallastMotor::intake;
  n = ballast_step(c, 1.0);
  CHECK(n.fill == doctest::Approx(7e-5).epsilon(1e-12));
  CHECK(n.motor == BallastMotor::intake);

  c.speed = 0.5;
  n = ballast_step(c, 1.0);
  CHECK(n.fill == doctest::Approx(6e-5).epsilon(1e-12));

  CHECK_THROWS_AS(ballast_step(c, 0.0), std::invalid_argument);
}

TEST_CASE("control inputs are offsets from neutral")
{
  ActuatorState a = make_actuators({}, 9e-5);
  ControlInputs in = control_inputs(a, 9e-5);
  CHECK(in.dV1 == 0.0);
  CHECK(in.dV2 == 0.0);
  CHECK(in.w_p1 == 0.0);
  CHECK(in.w_sR == 0.0);

  a.ballast[0].fill = 1.5e-4;
  in = control_inputs(a, 9e-5);
  CHECK(in.dV1 == doctest::Approx(6e-5).epsilon(1e-12));
  CHECK(in.dV2 == 0.0);
}

TEST_CASE("fuzz: fills stay in range, limits halt the motor in the same step")
{
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> id(5, 6);
  std::uniform_int_distribution<int> action(0, 2);
  std::uniform_real_distribution<double> mag(0.0, 1.0);
  std::uniform_real_distribution<double> dt(1e-4, 2.0);

  ActuatorState a = make_actuators({}, 7.5e-5);
  const ActuatorState start = a;
  for (int i = 0; i < 100000; ++i) {
    const MotorCommand cmd{id(rng), static_cast<MotorAction>(action(rng)), mag(rng)};
    const ActuatorState before = a;
    a = apply_command(a, cmd);

    // A latched cylinder never restarts in the latched direction.
    for (std::size_t k = 0; k < 2; ++k) {
      if (before.ballast[k].limit == LimitLatch::full)
        REQUIRE(a.ballast[k].motor != BallastMotor::intake);
      if (before.ballast[k].limit == LimitLatch::empty)
        REQUIRE(a.ballast[k].motor != BallastMotor::release);
    }

    const ActuatorState mid = a;
    a = actuators_step(a, dt(rng));
    for (std::size_t k = 0; k < 2; ++k) {
      const BallastCylinder& c = a.ballast[k];
      REQUIRE(c.fill >= 0.0);
      REQUIRE(c.fill <= c.capacity);
      if (mid.ballast[k].limit == LimitLatch::none && c.limit != LimitLatch::none)
        REQUIRE(c.motor == BallastMotor::stopped);
      if (c.fill == c.capacity && mid.ballast[k].motor == BallastMotor::intake)
        REQUIRE(c.limit == LimitLatch::full);
      if (c.fill == 0.0 && mid.ballast[k].motor == BallastMotor::release)
        REQUIRE(c.limit == LimitLatch::empty);
    }
  }

  // Volume bookkeeping: intake minus release equals net fill change.
  for (std::size_t k = 0; k < 2; ++k) {
    const BallastCylinder& c = a.ballast[k];
    CHECK(c.intake_total - c.release_total ==
          doctest::Approx(c.fill - start.ballast[k].fill).epsilon(1e-9).scale(1e-4));
  }
}

TEST_CASE("a latch is always exited by one opposite command")
{
  ActuatorState a = make_actuators({}, 0.0);
  a = apply_command(a, {6, MotorAction::reverse, 1.0});
  a = actuators_step(a, 0.1);
  REQUIRE(a.ballast[1].limit == LimitLatch::empty);
  for (int i = 0; i < 5; ++i) {
    a = apply_command(a, {6, MotorAction::reverse, 1.0});
    CHECK(a.ballast[1].limit == LimitLatch::empty);
  }
  a = apply_command(a, {6, MotorAction::forward, 0.2});
  CHECK(a.ballast[1].limit == LimitLatch::none);
  CHECK(a.ballast[1].motor == BallastMotor::intake);
}
