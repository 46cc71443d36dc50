#include "hrc/planner.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hrc {

void MppiConfig::validate() const {
  if (n_samples < 2) throw std::invalid_argument("n_samples must be >= 2");
  if (horizon == 0) throw std::invalid_argument("horizon must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be > 0");
  if (!(noise_sigma > 0.0)) throw std::invalid_argument("noise_sigma must be > 0");
  if (n_iterations < 1) throw std::invalid_argument("n_iterations must be >= 1");
}

PlannerState PlannerState::initial(const MppiConfig& cfg) {
  cfg.validate();
  PlannerState s;
  s.mean = ControlSequence::Zero(static_cast<Eigen::Index>(cfg.horizon), kArmDof);
  s.rng.seed(cfg.seed);
  return s;
}

RobotPlan rollout(const ArmModel& model, const ArmState& state, const ControlSequence& controls, double dt) {
  RobotPlan plan;
  plan.start = state;
  plan.dt = dt;
  plan.states.reserve(static_cast<std::size_t>(controls.rows()));
  ArmState s = state;
  for (Eigen::Index t = 0; t < controls.rows(); ++t) {
    s = step(model, s, controls.row(t).transpose(), dt);
    plan.states.push_back(s);
  }
  return plan;
}

std::vector<double> mppi_weights(std::span<const double> costs, double temperature) {
  if (costs.size() < 2) throw std::invalid_argument("mppi_update needs at least two samples");
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be > 0");
  double lo = std::numeric_limits<double>::infinity();
  for (double c : costs) {
    if (std::isnan(c) || c == -std::numeric_limits<double>::infinity())
      throw std::invalid_argument("sample cost is not a number");
    lo = std::min(lo, c);
  }
  if (std::isinf(lo)) throw std::invalid_argument("all sample costs are infinite");
  std::vector<double> w(costs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    w[i] = std::isinf(costs[i]) ? 0.0 : std::exp(-(costs[i] - lo) / temperature);
    sum += w[i];
  }
  for (double& x : w) x /= sum;
  return w;
}

ControlSequence mppi_update(std::span<const double> costs, std::span<const ControlSequence> samples,
                            const ControlSequence& mean, double temperature) {
  if (costs.size() != samples.size()) throw std::invalid_argument("one cost per sample required");
  const auto w = mppi_weights(costs, temperature);
  ControlSequence out = ControlSequence::Zero(mean.rows(), kArmDof);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].rows() != mean.rows()) throw std::invalid_argument("sample horizon differs from the mean");
    out += w[i] * samples[i];
  }
  return out;
}

PlanStepResult plan_step(PlannerState& planner, const ArmModel& model, const ArmState& arm, const PlanCost& cost,
                         const MppiConfig& cfg) {
  cfg.validate();
  const auto h = static_cast<Eigen::Index>(cfg.horizon);
  if (planner.mean.rows() != h) planner.mean = ControlSequence::Zero(h, kArmDof);

  std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
  std::vector<ControlSequence> samples(cfg.n_samples);
  std::vector<double> costs(cfg.n_samples);

  PlanStepResult result;
  result.best_cost = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.n_iterations; ++it) {
    for (std::size_t i = 0; i < cfg.n_samples; ++i) {
      ControlSequence& u = samples[i];
      u = planner.mean;
      for (Eigen::Index t = 0; t < h; ++t)
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(kArmDof); ++j) {
          if (i > 0) u(t, j) += noise(planner.rng);
          const double lim = model.vel_limits[j];
          u(t, j) = std::clamp(u(t, j), -lim, lim);
        }
      RobotPlan plan = rollout(model, arm, u, cfg.dt);
      costs[i] = cost(plan);
      if (costs[i] < result.best_cost) {
        result.best_cost = costs[i];
        result.qd_cmd = u.row(0).transpose();
        result.best_plan = std::move(plan);
      }
    }
    planner.mean = mppi_update(costs, samples, planner.mean, cfg.temperature);
    result.iteration_best.push_back(result.best_cost);
  }
  if (!std::isfinite(result.best_cost)) throw std::runtime_error("no finite-cost plan was sampled");

  for (Eigen::Index t = 0; t + 1 < h; ++t) planner.mean.row(t) = planner.mean.row(t + 1);
  return result;
}

PlanStepResult plan_step(PlannerState& planner, const ArmModel& model, const ArmState& arm,
                         const Forecast& forecast, const TaskSpec& spec, const CostWeights& weights,
                         const MppiConfig& cfg) {
  forecast.validate();
  if (forecast.horizon() < cfg.horizon) throw std::invalid_argument("forecast horizon is shorter than the plan horizon");
  const PlanCost cost = [&](const RobotPlan& plan) { return total_cost(plan, model, forecast, spec, weights); };
  return plan_step(planner, model, arm, cost, cfg);
}

JointVector solve_ik(const ArmModel& model, const Vec3& target, const JointVector& q0, int iterations,
                     double damping) {
  JointVector q = q0;
  for (int it = 0; it < iterations; ++it) {
    const Vec3 err = target - fk(model, q).ee.position;
    if (err.norm() < 1e-6) break;
    const Eigen::Matrix<double, 3, 7> jv = jacobian(model, q).topRows<3>();
    const Eigen::Matrix3d a = jv * jv.transpose() + damping * damping * Eigen::Matrix3d::Identity();
    q += jv.transpose() * a.ldlt().solve(err);
    for (std::size_t i = 0; i < kArmDof; ++i)
      q[i] = std::clamp(q[i], model.joint_limits[i].lo, model.joint_limits[i].hi);
  }
  return q;
}

std::vector<JointVector> stir_reference(const ArmModel& model, const TaskSpec& spec, double dt) {
  if (!(dt > 0.0) || !(spec.stir_period > 0.0) || !(spec.stir_radius >= 0.0))
    throw std::invalid_argument("invalid stirring circle");
  const auto n = static_cast<std::size_t>(std::llround(spec.stir_period / dt));
  if (n == 0) throw std::invalid_argument("stirring period shorter than one frame");
  std::vector<JointVector> ref;
  ref.reserve(n);
  JointVector q = spec.rest_config;
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n);
    const Vec3 p = spec.stir_center + spec.stir_radius * Vec3(std::cos(theta), std::sin(theta), 0.0);
    q = solve_ik(model, p, q, i == 0 ? 300 : 50);
    ref.push_back(q);
  }
  return ref;
}

namespace {

double final_wrist_error(const Forecast& forecast, const Trajectory& future) {
  const Pose& pred = forecast.trajectory->frames.back();
  const Pose& truth = future.frames[forecast.horizon() - 1];
  return 0.5 * ((pred[kLeftWrist] - truth[kLeftWrist]).norm() + (pred[kRightWrist] - truth[kRightWrist]).norm());
}

}  // namespace

SimLog run_episode(const ArmModel& model, const Episode& episode, const Forecaster& forecaster, TaskSpec spec,
                   const CostWeights& weights, const MppiConfig& cfg) {
  episode.validate();
  cfg.validate();
  weights.validate();
  if (episode.task != spec.task) throw std::invalid_argument("episode task does not match the task spec");
  if (std::abs(episode.dt() - cfg.dt) > 1e-9) throw std::invalid_argument("planner dt must equal the episode frame period");
  const std::size_t k = kContextLength;
  const std::size_t horizon = cfg.horizon;
  const std::size_t n = episode.size();
  if (n < k + horizon) throw std::length_error("episode shorter than context plus horizon");

  if (spec.task == Task::Stir) {
    if (episode.extras.pot_position) spec.pot_position = *episode.extras.pot_position;
    if (spec.stir_reference.empty()) spec.stir_reference = stir_reference(model, spec, cfg.dt);
  }

  SimLog log;
  log.forecaster = forecaster.name;
  log.task = spec.task;
  log.dt = cfg.dt;
  log.horizon = horizon;

  PlannerState planner = PlannerState::initial(cfg);
  ArmState arm{spec.rest_config, JointVector::Zero()};
  Context ctx;
  ctx.dt = episode.dt();
  Trajectory future;
  future.dt = episode.dt();

  for (std::size_t t = k - 1; t + horizon < n; ++t) {
    ctx.frames.assign(episode.frames.begin() + static_cast<std::ptrdiff_t>(t + 1 - k),
                      episode.frames.begin() + static_cast<std::ptrdiff_t>(t + 1));
    future.frames.assign(episode.frames.begin() + static_cast<std::ptrdiff_t>(t + 1),
                         episode.frames.begin() + static_cast<std::ptrdiff_t>(t + 1 + horizon));
    const Forecast forecast = forecaster.predict(ctx, forecaster.uses_future ? &future : nullptr);
    forecast.validate();
    log.volume_forecast = !forecast.is_point();

    spec.stir_phase = static_cast<int>(t);
    spec.object_in_hand = !episode.extras.object_in_hand.empty() && episode.extras.object_in_hand[t];

    const PlanStepResult res = plan_step(planner, model, arm, forecast, spec, weights, cfg);

    SimStep rec;
    rec.frame = static_cast<int>(t);
    rec.state = arm;
    rec.command = res.qd_cmd;
    const ArmKinematics kin = arm_kinematics(model, arm.q);
    rec.ee = ee_pose(kin);
    rec.best_cost = res.best_cost;
    rec.min_separation = min_separation(kin.spheres, episode.frames[t]);
    rec.object_in_hand = spec.object_in_hand;
    const std::size_t last = forecast.horizon() - 1;
    if (spec.task == Task::Stir) {
      rec.pot_distance = pot_distance(forecast, last, spec.pot_position);
      rec.retract = *rec.pot_distance <= weights.eps_pot;
    }
    if (forecast.is_point()) {
      rec.forecast_wrist = forecast.trajectory->frames[last][spec.handover_wrist];
      if (forecast.horizon() <= future.size()) rec.wrist_error = final_wrist_error(forecast, future);
    }
    log.steps.push_back(rec);

    arm = step(model, arm, res.qd_cmd, cfg.dt);
  }
  return log;
}

}  // namespace hrc
