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

#ifndef EVOCTL_ENVS_HPP_
#define EVOCTL_ENVS_HPP_

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "evoctl/policy_lang.hpp"

namespace evoctl::env {

enum class EnvId { kPendulumSwingup, kBallInCup };

std::optional<EnvId> EnvIdFromString(std::string_view s);
const char* EnvIdName(EnvId id);
int ObsDim(EnvId id);
int ActionDim(EnvId id);

// ---------------------------------------------------------------------------
// Pendulum swing-up. theta is the deviation from upright, wrapped to
// (-pi, pi]; dynamics integrated by semi-implicit Euler (velocity first).
// ---------------------------------------------------------------------------

struct PendulumParams {
  double g_grav = 9.81;     // m s^-2
  double length = 0.5;      // m
  double damping_b = 0.4;   // s^-1
  double dt = 0.015;        // s
  // Normalized torque limit: 1/6th of what lifting from motionless
  // horizontal requires, which is g/l in this normalization.
  double torque_limit() const { return g_grav / (6.0 * length); }
};

struct PendulumState {
  double theta = 0.0;  // rad, deviation from upright, in (-pi, pi]
  double omega = 0.0;  // rad s^-1
};

double WrapAngle(double theta);

PendulumState PendulumStep(const PendulumState& s, double action,
                           const PendulumParams& p = {});
double PendulumReward(const PendulumState& s_next, double action);
PendulumState PendulumReset();
PendulumState PendulumReset(uint64_t seed);
// Total energy, kinetic plus gravitational, in the normalized units of the
// dynamics (potential peaks at upright). Used by the integrator checks.
double PendulumEnergy(const PendulumState& s, const PendulumParams& p = {});

// ---------------------------------------------------------------------------
// Ball in cup. Planar cup (PD position servo confined to a box) with a ball
// on an inelastic string: a unilateral distance constraint that projects the
// ball back onto the string sphere and removes outward radial relative
// velocity. The catch predicate latches per episode.
// ---------------------------------------------------------------------------

struct BallCupParams {
  double g_grav = 9.81;         // m s^-2
  double string_length = 0.3;   // m
  double box_half = 0.25;       // m, cup workspace half-extent
  double dt = 0.015;            // s
  double kp = 100.0;            // s^-2, PD position gain
  double kd = 20.0;             // s^-1, PD damping gain
  double acc_limit = 100.0;     // m s^-2, per-axis cup acceleration clamp
  double catch_half_width = 0.08;   // m
  double catch_half_height = 0.08;  // m
};

struct Vec2 {
  double x = 0.0;
  double z = 0.0;
};

struct BallCupState {
  Vec2 cup_pos;
  Vec2 cup_vel;
  Vec2 ball_pos;
  Vec2 ball_vel;
  bool caught = false;  // latched within an episode
};

// True iff the ball sits inside the catch box hanging under the cup center:
// |x_ball - x_cup| < catch_half_width and
// z_cup - catch_half_height < z_ball < z_cup (strict bounds).
bool IsCaught(const BallCupState& s, const BallCupParams& p = {});

// The action components are references in meters (a reference of +-1 lies
// outside the workspace; the box constraint truncates the motion, which is
// what keeps full-scale strokes forceful).
BallCupState BallCupStep(const BallCupState& s, const policy::Action& a,
                         const BallCupParams& p = {});
double BallCupReward(const BallCupState& s_next);
BallCupState BallCupReset();
// Ball position uniform over the string-radius disk about the cup,
// excluding the catch box; everything at rest.
BallCupState BallCupReset(uint64_t seed, const BallCupParams& p = {});

// ---------------------------------------------------------------------------
// Dispatch layer used by rollout.
// ---------------------------------------------------------------------------

using EnvState = std::variant<PendulumState, BallCupState>;

EnvState Reset(EnvId id, std::optional<uint64_t> seed);
EnvState Step(EnvId id, const EnvState& s, const policy::Action& a);
double Reward(EnvId id, const EnvState& s_next, const policy::Action& a);
std::vector<double> Observe(EnvId id, const EnvState& s);
bool Caught(EnvId id, const EnvState& s);
// State components in trajectory-dump order, with a header to match.
std::vector<double> StateComponents(EnvId id, const EnvState& s);
std::vector<std::string> StateHeader(EnvId id);

}  // namespace evoctl::env

#endif  // EVOCTL_ENVS_HPP_
