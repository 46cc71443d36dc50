#pragma once

#include "hrc/datagen.hpp"
#include "hrc/forecast.hpp"
#include "hrc/motion.hpp"
#include "hrc/robot.hpp"

#include <random>

namespace hrc::test {

inline Vec3 random_vec(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  return Vec3(u(rng), u(rng), u(rng));
}

inline Pose random_pose(std::mt19937_64& rng) {
  Pose p;
  for (auto& j : p.joints) j = random_vec(rng);
  return p;
}

inline JointVector random_q(std::mt19937_64& rng, const ArmModel& model, double shrink = 0.9) {
  JointVector q;
  for (std::size_t i = 0; i < kArmDof; ++i) {
    const auto& lim = model.joint_limits[i];
    std::uniform_real_distribution<double> u(lim.mid() - shrink * lim.half_range(),
                                             lim.mid() + shrink * lim.half_range());
    q[i] = u(rng);
  }
  return q;
}

/// A plausible human standing in front of the robot.
inline Pose standing_human(const Vec3& right_wrist = Vec3(0.0, -0.6, 1.0)) {
  return make_pose(HumanLayout{}, right_wrist, HumanLayout{}.left_wrist_rest);
}

inline Trajectory constant_trajectory(const Pose& p, std::size_t n = kHorizon) {
  Trajectory t;
  t.frames.assign(n, p);
  return t;
}

inline Context context_of(const std::vector<Pose>& frames) {
  Context c;
  c.frames = frames;
  return c;
}

/// Every joint at base + t * velocity.
inline std::vector<Pose> affine_frames(const Pose& base, const Vec3& velocity, int t0, int n) {
  std::vector<Pose> out;
  for (int t = t0; t < t0 + n; ++t) out.push_back(base.translated(static_cast<double>(t) * velocity));
  return out;
}

inline RobotPlan constant_plan(const JointVector& q, std::size_t horizon = kHorizon) {
  RobotPlan plan;
  plan.start.q = q;
  plan.states.assign(horizon, ArmState{q, JointVector::Zero()});
  return plan;
}

inline RobotPlan random_plan(std::mt19937_64& rng, const ArmModel& model, std::size_t horizon = kHorizon) {
  RobotPlan plan;
  plan.start.q = random_q(rng, model);
  std::uniform_real_distribution<double> v(-2.0, 2.0);
  for (std::size_t t = 0; t < horizon; ++t) {
    ArmState s;
    s.q = random_q(rng, model, 1.0);
    for (std::size_t i = 0; i < kArmDof; ++i) s.qd[i] = v(rng);
    plan.states.push_back(s);
  }
  return plan;
}

}  // namespace hrc::test
