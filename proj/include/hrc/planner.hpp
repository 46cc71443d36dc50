#pragma once

#include "hrc/cost.hpp"
#include "hrc/forecast.hpp"
#include "hrc/robot.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace hrc {

struct MppiConfig {
  std::size_t n_samples = 64;
  std::size_t horizon = kHorizon;
  double dt = kFrameDt;
  double temperature = 0.5;
  double noise_sigma = 0.3;
  int n_iterations = 2;
  std::uint64_t seed = 0;

  void validate() const;
};

/// H x 7 joint-velocity sequence.
using ControlSequence = Eigen::Matrix<double, Eigen::Dynamic, static_cast<int>(kArmDof)>;

struct PlannerState {
  ControlSequence mean;
  std::mt19937_64 rng;

  static PlannerState initial(const MppiConfig& cfg);
};

RobotPlan rollout(const ArmModel& model, const ArmState& state, const ControlSequence& controls, double dt);

/// Normalized exp(-(c - min c) / lambda). Infinite costs get zero weight.
std::vector<double> mppi_weights(std::span<const double> costs, double temperature);

ControlSequence mppi_update(std::span<const double> costs, std::span<const ControlSequence> samples,
                            const ControlSequence& mean, double temperature);

struct PlanStepResult {
  JointVector qd_cmd = JointVector::Zero();
  RobotPlan best_plan;
  double best_cost = 0.0;
  /// Best cost seen after each iteration; nonincreasing.
  std::vector<double> iteration_best;
};

using PlanCost = std::function<double(const RobotPlan&)>;

/// Sample 0 of every iteration is the noise-free mean.
PlanStepResult plan_step(PlannerState& planner, const ArmModel& model, const ArmState& arm, const PlanCost& cost,
                         const MppiConfig& cfg);
PlanStepResult plan_step(PlannerState& planner, const ArmModel& model, const ArmState& arm,
                         const Forecast& forecast, const TaskSpec& spec, const CostWeights& weights,
                         const MppiConfig& cfg);

/// Damped least-squares position IK.
JointVector solve_ik(const ArmModel& model, const Vec3& target, const JointVector& q0, int iterations = 100,
                     double damping = 0.05);

/// One period of a horizontal circle around spec.stir_center, one entry per frame.
std::vector<JointVector> stir_reference(const ArmModel& model, const TaskSpec& spec, double dt);

struct SimStep {
  int frame = 0;
  ArmState state;
  JointVector command = JointVector::Zero();
  RigidPose ee;
  double best_cost = 0.0;
  /// Arm clearance against the true human pose at this frame.
  double min_separation = 0.0;
  /// Stirring only: pot distance and retract branch at the final forecast frame.
  std::optional<double> pot_distance;
  bool retract = false;
  /// Final-frame handover wrist of a point forecast.
  std::optional<Vec3> forecast_wrist;
  /// Final-frame wrist error against the recorded future, meters.
  std::optional<double> wrist_error;
  bool object_in_hand = false;
};

struct SimLog {
  std::string forecaster;
  Task task = Task::Stir;
  bool volume_forecast = false;
  double dt = kFrameDt;
  std::size_t horizon = kHorizon;
  std::vector<SimStep> steps;
};

/// Playback of a recorded episode against the planner, from frame k-1 to the
/// last frame with a full recorded future.
SimLog run_episode(const ArmModel& model, const Episode& episode, const Forecaster& forecaster, TaskSpec spec,
                   const CostWeights& weights, const MppiConfig& cfg);

}  // namespace hrc
