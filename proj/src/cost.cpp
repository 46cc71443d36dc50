#include "hrc/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hrc {

namespace {
constexpr std::size_t kStopSteps = 5;
constexpr double kJointMargin = 0.9;
constexpr double kOrientationWeight = 0.3;
}  // namespace

void CostWeights::validate() const {
  for (double v : {alpha_s, alpha_j, alpha_m, alpha_c, alpha_t, beta, eps_pot, manip_floor, d_safe})
    if (!(v >= 0.0)) throw std::invalid_argument("cost weights must be non-negative");
}

JointVector TaskSpec::default_rest_config() {
  JointVector q;
  q << 0.0, -0.6, 0.0, -1.4, 0.0, 1.2, 0.785;
  return q;
}

RigidPose TaskSpec::default_table_goal() {
  RigidPose g;
  g.position = Vec3(0.6, 0.15, 0.95);
  g.orientation = Eigen::Quaterniond(0.0, 1.0, 0.0, 0.0);
  return g;
}

std::vector<ArmKinematics> plan_kinematics(const ArmModel& model, const RobotPlan& plan) {
  std::vector<ArmKinematics> out;
  out.reserve(plan.states.size());
  for (const auto& s : plan.states) out.push_back(arm_kinematics(model, s.q));
  return out;
}

RigidPose ee_pose(const ArmKinematics& kin) {
  RigidPose p;
  p.position = kin.ee.translation();
  p.orientation = Eigen::Quaterniond(kin.ee.rotation()).normalized();
  return p;
}

double stop_cost(const RobotPlan& plan) {
  const std::size_t h = plan.states.size();
  double sum = 0.0;
  for (std::size_t t = h > kStopSteps ? h - kStopSteps : 0; t < h; ++t) sum += plan.states[t].qd.squaredNorm();
  return sum;
}

double joint_limit_cost(const RobotPlan& plan, const ArmModel& model) {
  double sum = 0.0;
  for (const auto& s : plan.states) {
    for (std::size_t i = 0; i < kArmDof; ++i) {
      const auto& lim = model.joint_limits[i];
      const double excess = hinge(std::abs(s.q[i] - lim.mid()) - kJointMargin * lim.half_range());
      sum += excess * excess;
    }
  }
  return sum;
}

double manipulability_cost(std::span<const ArmKinematics> kin, double floor) {
  double sum = 0.0;
  for (const auto& k : kin) sum += hinge(floor - manipulability(k));
  return sum;
}

double base_cost(const RobotPlan& plan, const ArmModel& model, std::span<const ArmKinematics> kin,
                 const CostWeights& weights) {
  double cost = weights.alpha_s * stop_cost(plan) + weights.alpha_j * joint_limit_cost(plan, model);
  if (weights.alpha_m != 0.0) cost += weights.alpha_m * manipulability_cost(kin, weights.manip_floor);
  return cost;
}

double base_cost(const RobotPlan& plan, const ArmModel& model, const CostWeights& weights) {
  return base_cost(plan, model, plan_kinematics(model, plan), weights);
}

double forecast_separation(const ArmKinematics& kin, const Forecast& forecast, std::size_t t) {
  if (forecast.is_point()) return min_separation(kin.spheres, forecast.trajectory->frames[t]);
  return min_separation(kin.spheres, (*forecast.volumes)[t]);
}

double collision_cost(std::span<const ArmKinematics> kin, const Forecast& forecast, double scale,
                      double d_safe) {
  forecast.validate();
  if (forecast.horizon() < kin.size())
    throw std::invalid_argument("forecast horizon is shorter than the plan horizon");
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t t = 0; t < kin.size(); ++t) {
    const double v = hinge(d_safe - forecast_separation(kin[t], forecast, t));
    sum += v * v;
  }
  return scale * sum;
}

double collision_cost(const RobotPlan& plan, const ArmModel& model, const Forecast& forecast,
                      const CostWeights& weights) {
  return collision_cost(plan_kinematics(model, plan), forecast, weights.alpha_c, weights.d_safe);
}

double pot_distance(const Forecast& forecast, std::size_t t, const Vec3& pot) {
  if (forecast.is_point()) {
    const Pose& p = forecast.trajectory->frames[t];
    return std::min((p[kLeftWrist] - pot).norm(), (p[kRightWrist] - pot).norm());
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : (*forecast.volumes)[t]) best = std::min(best, hinge((s.center - pot).norm() - s.radius));
  return best;
}

bool retract_active(const Forecast& forecast, std::size_t t, const TaskSpec& spec, const CostWeights& weights) {
  return pot_distance(forecast, t, spec.pot_position) <= weights.eps_pot;
}

double stir_cost(const RobotPlan& plan, const Forecast& forecast, const TaskSpec& spec, const CostWeights& weights) {
  if (spec.task != Task::Stir) throw std::invalid_argument("stir_cost needs a stirring task spec");
  if (spec.stir_reference.empty()) throw std::invalid_argument("stir_cost needs a stirring reference");
  forecast.validate();
  if (forecast.horizon() < plan.horizon())
    throw std::invalid_argument("forecast horizon is shorter than the plan horizon");
  const auto period = static_cast<long long>(spec.stir_reference.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < plan.states.size(); ++t) {
    const JointVector& q = plan.states[t].q;
    if (retract_active(forecast, t, spec, weights)) {
      sum += (q - spec.rest_config).norm();
    } else {
      const long long idx = ((spec.stir_phase + static_cast<long long>(t) + 1) % period + period) % period;
      sum += (q - spec.stir_reference[static_cast<std::size_t>(idx)]).norm();
    }
  }
  return sum;
}

double geodesic_angle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
  const Eigen::Quaterniond d = a.conjugate() * b;
  return 2.0 * std::atan2(d.vec().norm(), std::abs(d.w()));
}

double pose_cost(const RigidPose& a, const RigidPose& b) {
  return (a.position - b.position).norm() + kOrientationWeight * geodesic_angle(a.orientation, b.orientation);
}

RigidPose grasp_pose(const RigidPose& ee_now, const Vec3& wrist_final) {
  const Vec3 line = wrist_final - ee_now.position;
  if (line.norm() <= 1e-6) throw std::invalid_argument("grasp target coincides with the end effector");
  const Vec3 approach = ee_now.orientation * Vec3::UnitZ();
  const Eigen::Quaterniond align = Eigen::Quaterniond::FromTwoVectors(approach, line.normalized());
  RigidPose out;
  out.position = wrist_final;
  out.orientation = (align * ee_now.orientation).normalized();
  return out;
}

double handover_cost(const RobotPlan& plan, std::span<const ArmKinematics> kin, const RigidPose& ee_now,
                     const Forecast& forecast, const TaskSpec& spec) {
  if (spec.task != Task::Handover) throw std::invalid_argument("handover_cost needs a handover task spec");
  if (!forecast.is_point())
    throw std::invalid_argument("handover cost needs a point forecast; safety volumes carry no wrist");
  forecast.validate();
  if (!spec.object_in_hand) return 0.0;
  const auto& frames = forecast.trajectory->frames;
  if (frames.empty()) throw std::invalid_argument("empty forecast");
  const Vec3& wrist = frames.back()[spec.handover_wrist];
  // The grasp orientation is undefined when the hand is already at the effector.
  const RigidPose target = (wrist - ee_now.position).norm() > 1e-6 ? grasp_pose(ee_now, wrist)
                                                                   : RigidPose{wrist, ee_now.orientation};
  double sum = 0.0;
  for (std::size_t t = 0; t < plan.states.size(); ++t) sum += pose_cost(ee_pose(kin[t]), target);
  return sum;
}

double handover_cost(const RobotPlan& plan, const ArmModel& model, const Forecast& forecast,
                     const TaskSpec& spec, const CostWeights&) {
  const RigidPose ee_now = fk(model, plan.start.q).ee;
  return handover_cost(plan, plan_kinematics(model, plan), ee_now, forecast, spec);
}

double tableset_cost(std::span<const ArmKinematics> kin, const Forecast& forecast, const TaskSpec& spec,
                     const CostWeights& weights) {
  if (spec.task != Task::TableSet) throw std::invalid_argument("tableset_cost needs a table-setting task spec");
  double goal = 0.0;
  for (const auto& k : kin) goal += pose_cost(ee_pose(k), spec.table_goal);
  return goal + weights.beta * collision_cost(kin, forecast, 1.0, weights.d_safe);
}

double tableset_cost(const RobotPlan& plan, const ArmModel& model, const Forecast& forecast,
                     const TaskSpec& spec, const CostWeights& weights) {
  return tableset_cost(plan_kinematics(model, plan), forecast, spec, weights);
}

namespace {

double task_term(const RobotPlan& plan, const ArmModel& model, std::span<const ArmKinematics> kin,
                 const Forecast& forecast, const TaskSpec& spec, const CostWeights& weights) {
  switch (spec.task) {
    case Task::Stir: return stir_cost(plan, forecast, spec, weights);
    case Task::Handover: return handover_cost(plan, kin, fk(model, plan.start.q).ee, forecast, spec);
    case Task::TableSet: return tableset_cost(kin, forecast, spec, weights);
  }
  throw std::invalid_argument("unknown task");
}

}  // namespace

double task_cost(const RobotPlan& plan, const ArmModel& model, const Forecast& forecast,
                 const TaskSpec& spec, const CostWeights& weights) {
  return task_term(plan, model, plan_kinematics(model, plan), forecast, spec, weights);
}

double total_cost(const RobotPlan& plan, const ArmModel& model, const Forecast& forecast,
                  const TaskSpec& spec, const CostWeights& weights) {
  const auto kin = plan_kinematics(model, plan);
  double cost = base_cost(plan, model, kin, weights);
  cost += collision_cost(kin, forecast, weights.alpha_c, weights.d_safe);
  if (weights.alpha_t != 0.0) cost += weights.alpha_t * task_term(plan, model, kin, forecast, spec, weights);
  return cost;
}

}  // namespace hrc
