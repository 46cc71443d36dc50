#pragma once

#include "hrc/forecast.hpp"
#include "hrc/robot.hpp"

#include <vector>

namespace hrc {

struct CostWeights {
  double alpha_s = 1.0;
  double alpha_j = 10.0;
  double alpha_m = 0.5;
  double alpha_c = 100.0;
  double alpha_t = 50.0;
  double beta = 5.0;
  /// Pot-proximity radius of the stirring task (not the model loss bound).
  double eps_pot = 0.15;
  double manip_floor = 0.05;
  double d_safe = 0.05;

  void validate() const;
};

struct TaskSpec {
  /// Retracted configuration, held away from the shared workspace.
  static JointVector default_rest_config();

  Task task = Task::Stir;
  Vec3 pot_position{0.55, 0.0, 0.95};
  JointVector rest_config = default_rest_config();
  Vec3 stir_center{0.55, 0.0, 1.05};
  double stir_radius = 0.1;
  double stir_period = 4.0;
  /// Joint-space stirring reference, one entry per frame over one period.
  std::vector<JointVector> stir_reference;
  /// Playback frame at which the plan starts; indexes stir_reference.
  int stir_phase = 0;
  /// IsObjectInHand at the current human state.
  bool object_in_hand = false;
  std::size_t handover_wrist = kRightWrist;
  RigidPose table_goal = default_table_goal();

  static RigidPose default_table_goal();
};

/// Kinematics of every state in a plan, computed once per plan.
std::vector<ArmKinematics> plan_kinematics(const ArmModel& model, const RobotPlan& plan);

inline double hinge(double x) { return x > 0.0 ? x : 0.0; }

double stop_cost(const RobotPlan& plan);
double joint_limit_cost(const RobotPlan& plan, const ArmModel& model);
double manipulability_cost(std::span<const ArmKinematics> kin, double floor);

double base_cost(const RobotPlan& plan, const ArmModel& model, const CostWeights& weights);
double base_cost(const RobotPlan& plan, const ArmModel& model, std::span<const ArmKinematics> kin,
                 const CostWeights& weights);

/// Clearance of plan state t against forecast frame t.
double forecast_separation(const ArmKinematics& kin, const Forecast& forecast, std::size_t t);

/// alpha_c * sum_t hinge(d_safe - separation_t)^2.
double collision_cost(const RobotPlan& plan, const ArmModel& model, const Forecast& forecast,
                      const CostWeights& weights);
double collision_cost(std::span<const ArmKinematics> kin, const Forecast& forecast, double scale,
                      double d_safe);

/// Distance from the pot to the nearest forecast wrist (or volume surface).
double pot_distance(const Forecast& forecast, std::size_t t, const Vec3& pot);
bool retract_active(const Forecast& forecast, std::size_t t, const TaskSpec& spec, const CostWeights& weights);

double stir_cost(const RobotPlan& plan, const Forecast& forecast, const TaskSpec& spec, const CostWeights& weights);

/// Target pose at the wrist, approach axis along the line from the current end effector.
RigidPose grasp_pose(const RigidPose& ee_now, const Vec3& wrist_final);

/// Position error plus 0.3 x geodesic orientation error.
double pose_cost(const RigidPose& a, const RigidPose& b);
double geodesic_angle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b);

double handover_cost(const RobotPlan& plan, const ArmModel& model, const Forecast& forecast,
                     const TaskSpec& spec, const CostWeights& weights);
double handover_cost(const RobotPlan& plan, std::span<const ArmKinematics> kin, const RigidPose& ee_now,
                     const Forecast& forecast, const TaskSpec& spec);

double tableset_cost(const RobotPlan& plan, const ArmModel& model, const Forecast& forecast,
                     const TaskSpec& spec, const CostWeights& weights);
double tableset_cost(std::span<const ArmKinematics> kin, const Forecast& forecast, const TaskSpec& spec,
                     const CostWeights& weights);

double task_cost(const RobotPlan& plan, const ArmModel& model, const Forecast& forecast,
                 const TaskSpec& spec, const CostWeights& weights);

/// base + collision + alpha_t * task term.
double total_cost(const RobotPlan& plan, const ArmModel& model, const Forecast& forecast,
                  const TaskSpec& spec, const CostWeights& weights);

RigidPose ee_pose(const ArmKinematics& kin);

}  // namespace hrc
