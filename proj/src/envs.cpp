// Copyright 2026 The evoctl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "evoctl/envs.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "evoctl/rng.hpp"

namespace evoctl::env {
namespace {

constexpr double kPi = 3.14159265358979323846;

void RequireFinite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string("non-finite ") + what + " fed to environment step");
  }
}

}  // namespace

std::optional<EnvId> EnvIdFromString(std::string_view s) {
  if (s == "pendulum_swingup") return EnvId::kPendulumSwingup;
  if (s == "ball_in_cup") return EnvId::kBallInCup;
  return std::nullopt;
}

const char* EnvIdName(EnvId id) {
  return id == EnvId::kPendulumSwingup ? "pendulum_swingup" : "ball_in_cup";
}

int ObsDim(EnvId id) { return id == EnvId::kPendulumSwingup ? 3 : 8; }
int ActionDim(EnvId id) { return id == EnvId::kPendulumSwingup ? 1 : 2; }

double WrapAngle(double theta) {
  while (theta > kPi) theta -= 2.0 * kPi;
  while (theta <= -kPi) theta += 2.0 * kPi;
  return theta;
}

PendulumState PendulumStep(const PendulumState& s, double action, const PendulumParams& p) {
  RequireFinite(s.theta, "theta");
  RequireFinite(s.omega, "omega");
  RequireFinite(action, "action");
  const double u = p.torque_limit() * action;
  PendulumState n;
  n.omega = s.omega + p.dt * ((p.g_grav / p.length) * std::sin(s.theta) -
                              p.damping_b * s.omega + u);
  n.theta = WrapAngle(s.theta + p.dt * n.omega);
  return n;
}

double PendulumReward(const PendulumState& s_next, double action) {
  const double base = std::fabs(s_next.theta) > 0.5 ? 1.0 : 2.0;
  return base - std::fabs(s_next.theta) / kPi - 0.1 * std::fabs(action);
}

PendulumState PendulumReset() { return {kPi, 0.0}; }

PendulumState PendulumReset(uint64_t seed) {
  Rng rng(seed);
  PendulumState s;
  s.theta = WrapAngle(rng.Uniform(kPi - 0.1, kPi + 0.1));
  s.omega = 0.0;
  return s;
}

double PendulumEnergy(const PendulumState& s, const PendulumParams& p) {
  return 0.5 * s.omega * s.omega + (p.g_grav / p.length) * std::cos(s.theta);
}

bool IsCaught(const BallCupState& s, const BallCupParams& p) {
  return std::fabs(s.ball_pos.x - s.cup_pos.x) < p.catch_half_width &&
         s.cup_pos.z - p.catch_half_height < s.ball_pos.z && s.ball_pos.z < s.cup_pos.z;
}

BallCupState BallCupStep(const BallCupState& s, const policy::Action& a,
                         const BallCupParams& p) {
  RequireFinite(s.cup_pos.x, "cup state");
  RequireFinite(s.cup_pos.z, "cup state");
  RequireFinite(s.ball_pos.x, "ball state");
  RequireFinite(s.ball_pos.z, "ball state");

  const double clamp_acc = p.acc_limit;
  auto clamp = [](double v, double lim) { return v < -lim ? -lim : (v > lim ? lim : v); };

  BallCupState n = s;

  // Cup: PD toward the commanded reference, then the workspace box. The
  // clamp zeroes velocity on the clamped axis.
  const double ref_x = a[0];
  const double ref_z = a[1];
  const double ax = clamp(p.kp * (ref_x - s.cup_pos.x) - p.kd * s.cup_vel.x, clamp_acc);
  const double az = clamp(p.kp * (ref_z - s.cup_pos.z) - p.kd * s.cup_vel.z, clamp_acc);
  n.cup_vel.x = s.cup_vel.x + p.dt * ax;
  n.cup_vel.z = s.cup_vel.z + p.dt * az;
  n.cup_pos.x = s.cup_pos.x + p.dt * n.cup_vel.x;
  n.cup_pos.z = s.cup_pos.z + p.dt * n.cup_vel.z;
  if (n.cup_pos.x > p.box_half) { n.cup_pos.x = p.box_half; n.cup_vel.x = 0.0; }
  if (n.cup_pos.x < -p.box_half) { n.cup_pos.x = -p.box_half; n.cup_vel.x = 0.0; }
  if (n.cup_pos.z > p.box_half) { n.cup_pos.z = p.box_half; n.cup_vel.z = 0.0; }
  if (n.cup_pos.z < -p.box_half) { n.cup_pos.z = -p.box_half; n.cup_vel.z = 0.0; }

  // Ball: free fall, then the unilateral string constraint.
  n.ball_vel.z = s.ball_vel.z - p.dt * p.g_grav;
  n.ball_pos.x = s.ball_pos.x + p.dt * n.ball_vel.x;
  n.ball_pos.z = s.ball_pos.z + p.dt * n.ball_vel.z;

  const double dx = n.ball_pos.x - n.cup_pos.x;
  const double dz = n.ball_pos.z - n.cup_pos.z;
  const double dist = std::sqrt(dx * dx + dz * dz);
  if (dist > p.string_length) {
    const double ux = dx / dist;
    const double uz = dz / dist;
    n.ball_pos.x = n.cup_pos.x + p.string_length * ux;
    n.ball_pos.z = n.cup_pos.z + p.string_length * uz;
    const double radial = (n.ball_vel.x - n.cup_vel.x) * ux + (n.ball_vel.z - n.cup_vel.z) * uz;
    if (radial > 0.0) {
      n.ball_vel.x -= radial * ux;
      n.ball_vel.z -= radial * uz;
    }
  }

  n.caught = s.caught || IsCaught(n, p);
  return n;
}

double BallCupReward(const BallCupState& s_next) {
  if (s_next.caught) return 1.0;
  const double theta =
      std::atan2(s_next.ball_pos.x - s_next.cup_pos.x, s_next.ball_pos.z - s_next.cup_pos.z);
  const double v_ball = std::sqrt(s_next.ball_vel.x * s_next.ball_vel.x +
                                  s_next.ball_vel.z * s_next.ball_vel.z);
  return 1.0 - std::fabs(theta) / kPi - 0.1 * v_ball;
}

BallCupState BallCupReset() {
  BallCupState s;
  s.ball_pos = {0.0, -0.3};
  return s;
}

BallCupState BallCupReset(uint64_t seed, const BallCupParams& p) {
  Rng rng(seed);
  BallCupState s;
  while (true) {
    const double r = p.string_length * std::sqrt(rng.Uniform());
    const double phi = rng.Uniform(0.0, 2.0 * kPi);
    s.ball_pos.x = r * std::cos(phi);
    s.ball_pos.z = r * std::sin(phi);
    if (!IsCaught(s, p)) break;
  }
  return s;
}

EnvState Reset(EnvId id, std::optional<uint64_t> seed) {
  if (id == EnvId::kPendulumSwingup) {
    return seed ? PendulumReset(*seed) : PendulumReset();
  }
  return seed ? BallCupReset(*seed) : BallCupReset();
}

EnvState Step(EnvId id, const EnvState& s, const policy::Action& a) {
  if (id == EnvId::kPendulumSwingup) {
    return PendulumStep(std::get<PendulumState>(s), a[0]);
  }
  return BallCupStep(std::get<BallCupState>(s), a);
}

double Reward(EnvId id, const EnvState& s_next, const policy::Action& a) {
  if (id == EnvId::kPendulumSwingup) {
    return PendulumReward(std::get<PendulumState>(s_next), a[0]);
  }
  return BallCupReward(std::get<BallCupState>(s_next));
}

std::vector<double> Observe(EnvId id, const EnvState& s) {
  if (id == EnvId::kPendulumSwingup) {
    const auto& ps = std::get<PendulumState>(s);
    return {std::cos(ps.theta), std::sin(ps.theta), ps.omega};
  }
  const auto& bs = std::get<BallCupState>(s);
  return {bs.cup_pos.x,  bs.cup_pos.z,  bs.ball_pos.x, bs.ball_pos.z,
          bs.cup_vel.x,  bs.cup_vel.z,  bs.ball_vel.x, bs.ball_vel.z};
}

bool Caught(EnvId id, const EnvState& s) {
  if (id == EnvId::kPendulumSwingup) return false;
  return std::get<BallCupState>(s).caught;
}

std::vector<double> StateComponents(EnvId id, const EnvState& s) {
  if (id == EnvId::kPendulumSwingup) {
    const auto& ps = std::get<PendulumState>(s);
    return {ps.theta, ps.omega};
  }
  const auto& bs = std::get<BallCupState>(s);
  return {bs.cup_pos.x,  bs.cup_pos.z,  bs.ball_pos.x,        bs.ball_pos.z, bs.cup_vel.x,
          bs.cup_vel.z,  bs.ball_vel.x, bs.ball_vel.z,        bs.caught ? 1.0 : 0.0};
}

std::vector<std::string> StateHeader(EnvId id) {
  if (id == EnvId::kPendulumSwingup) return {"theta", "omega"};
  return {"cup_x", "cup_z", "ball_x", "ball_z", "cup_vx", "cup_vz", "ball_vx", "ball_vz",
          "caught"};
}

}  // namespace evoctl::env
