#include "hrc/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hrc {

Forecast Forecast::point(Trajectory traj) {
  Forecast f;
  f.kind = Kind::PointTrajectory;
  f.trajectory = std::move(traj);
  return f;
}

Forecast Forecast::safety_volume(std::vector<std::vector<Sphere>> volumes) {
  Forecast f;
  f.kind = Kind::SafetyVolume;
  f.volumes = std::move(volumes);
  return f;
}

std::size_t Forecast::horizon() const {
  if (is_point()) return trajectory ? trajectory->size() : 0;
  return volumes ? volumes->size() : 0;
}

void Forecast::validate() const {
  const bool ok = is_point() ? (trajectory.has_value() && !volumes.has_value())
                             : (volumes.has_value() && !trajectory.has_value());
  if (!ok) throw std::invalid_argument("forecast payload does not match its kind");
}

Forecast forecast_cur(const Context& ctx, std::size_t horizon) {
  if (ctx.frames.empty()) throw std::invalid_argument("empty context");
  Trajectory traj;
  traj.dt = ctx.dt;
  traj.frames.assign(horizon, ctx.current());
  return Forecast::point(std::move(traj));
}

Forecast forecast_cvm(const Context& ctx, std::size_t horizon) {
  const std::size_t k = ctx.size();
  if (k < 2) throw std::invalid_argument("constant velocity needs at least two context frames");
  const Pose& now = ctx.current();
  const Pose& oldest = ctx.frames.front();
  const double span = static_cast<double>(k - 1) * ctx.dt;

  Trajectory traj;
  traj.dt = ctx.dt;
  traj.frames.resize(horizon);
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    const Vec3 v = (now[j] - oldest[j]) / span;
    for (std::size_t t = 0; t < horizon; ++t)
      traj.frames[t][j] = now[j] + static_cast<double>(t + 1) * ctx.dt * v;
  }
  return Forecast::point(std::move(traj));
}

Forecast forecast_worst(const Context& ctx, std::size_t horizon) {
  if (ctx.frames.empty()) throw std::invalid_argument("empty context");
  const Pose& p = ctx.current();
  const double left = (p[kLeftShoulder] - p[kLeftElbow]).norm() + (p[kLeftElbow] - p[kLeftWrist]).norm();
  const double right =
      (p[kRightShoulder] - p[kRightElbow]).norm() + (p[kRightElbow] - p[kRightWrist]).norm();
  const double radius = std::max(left, right);
  const std::vector<Sphere> frame{{p[kLeftShoulder], radius}, {p[kRightShoulder], radius}};
  return Forecast::safety_volume(std::vector<std::vector<Sphere>>(horizon, frame));
}

Forecast forecast_oracle(const Trajectory* window_future) {
  if (window_future == nullptr)
    throw std::logic_error("oracle forecast requires the recorded future (playback only)");
  return Forecast::point(*window_future);
}

ForecastModel ForecastModel::identity(std::size_t k, std::size_t horizon) {
  ForecastModel m;
  m.S = Eigen::MatrixXd::Identity(kNumJoints, kNumJoints);
  m.M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(horizon));
  m.w = Eigen::VectorXd::Ones(kNumJoints);
  return m;
}

void ForecastModel::validate() const {
  if (S.rows() != static_cast<Eigen::Index>(kNumJoints) || S.cols() != S.rows())
    throw std::invalid_argument("S must be J x J");
  if (M.rows() < 1 || M.cols() < 1) throw std::invalid_argument("M must be non-empty");
  if (!S.allFinite() || !M.allFinite()) throw std::invalid_argument("non-finite model parameters");
}

namespace {

// Residual-free displacement prediction for one axis: M^T D S^T, masked.
Eigen::MatrixXd predict_axis(const ForecastModel& model, const Eigen::MatrixXd& delta) {
  Eigen::MatrixXd out = model.M.transpose() * delta * model.S.transpose();
  if (model.wrist_only) {
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      if (j != kLeftWrist && j != kRightWrist) out.col(static_cast<Eigen::Index>(j)).setZero();
    }
  }
  return out;
}

std::array<Eigen::MatrixXd, 3> context_deltas(const Context& ctx) {
  const auto k = static_cast<Eigen::Index>(ctx.size());
  std::array<Eigen::MatrixXd, 3> d;
  const Pose& now = ctx.current();
  for (int c = 0; c < 3; ++c) {
    d[c].resize(k, kNumJoints);
    for (Eigen::Index t = 0; t < k; ++t)
      for (std::size_t j = 0; j < kNumJoints; ++j)
        d[c](t, static_cast<Eigen::Index>(j)) = ctx.frames[static_cast<std::size_t>(t)][j][c] - now[j][c];
  }
  return d;
}

}  // namespace

Forecast model_forward(const ForecastModel& model, const Context& ctx) {
  model.validate();
  if (ctx.size() != model.context_length())
    throw std::invalid_argument("context length does not match the model");
  const auto deltas = context_deltas(ctx);
  const Pose& now = ctx.current();

  Trajectory traj;
  traj.dt = ctx.dt;
  traj.frames.assign(model.horizon(), now);
  for (int c = 0; c < 3; ++c) {
    const Eigen::MatrixXd disp = predict_axis(model, deltas[c]);
    for (std::size_t t = 0; t < model.horizon(); ++t)
      for (std::size_t j = 0; j < kNumJoints; ++j)
        traj.frames[t][j][c] += disp(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j));
  }
  return Forecast::point(std::move(traj));
}

Eigen::VectorXd joint_weights(double wrist_weight) {
  Eigen::VectorXd w = Eigen::VectorXd::Ones(kNumJoints);
  for (auto j : kWristJoints) w[static_cast<Eigen::Index>(j)] = wrist_weight;
  return w;
}

TrainingSample make_sample(const Context& ctx, const Trajectory& truth) {
  TrainingSample s;
  s.delta = context_deltas(ctx);
  const Pose& now = ctx.current();
  const auto horizon = static_cast<Eigen::Index>(truth.size());
  for (int c = 0; c < 3; ++c) {
    s.target[c].resize(horizon, kNumJoints);
    for (Eigen::Index t = 0; t < horizon; ++t)
      for (std::size_t j = 0; j < kNumJoints; ++j)
        s.target[c](t, static_cast<Eigen::Index>(j)) = truth.frames[static_cast<std::size_t>(t)][j][c] - now[j][c];
  }
  return s;
}

double sample_loss(const ForecastModel& model, const TrainingSample& sample, const Eigen::VectorXd& w) {
  double loss = 0.0;
  for (int c = 0; c < 3; ++c) {
    const Eigen::MatrixXd r = predict_axis(model, sample.delta[c]) - sample.target[c];
    loss += (r.array().square().colwise().sum().transpose() * w.array()).sum();
  }
  return loss;
}

double weighted_loss(const ForecastModel& model, const Context& ctx, const Trajectory& truth,
                     const Eigen::VectorXd& w) {
  if (truth.size() != model.horizon()) throw std::invalid_argument("truth length does not match the model");
  if (!(w.array() > 0.0).all()) throw std::invalid_argument("joint weights must be positive");
  return sample_loss(model, make_sample(ctx, truth), w);
}

ModelGradient loss_gradient(const ForecastModel& model, std::span<const TrainingSample> samples,
                            std::span<const std::size_t> batch, const Eigen::VectorXd& w) {
  if (batch.empty()) throw std::invalid_argument("loss_gradient needs a non-empty batch");
  ModelGradient g{Eigen::MatrixXd::Zero(model.S.rows(), model.S.cols()),
                  Eigen::MatrixXd::Zero(model.M.rows(), model.M.cols())};
  const Eigen::MatrixXd St = model.S.transpose();
  for (std::size_t idx : batch) {
    const TrainingSample& s = samples[idx];
    for (int c = 0; c < 3; ++c) {
      const Eigen::MatrixXd a = s.delta[c] * St;                // k x J
      Eigen::MatrixXd grad_out = model.M.transpose() * a;       // T x J
      if (model.wrist_only) {
        for (std::size_t j = 0; j < kNumJoints; ++j)
          if (j != kLeftWrist && j != kRightWrist) grad_out.col(static_cast<Eigen::Index>(j)).setZero();
      }
      grad_out -= s.target[c];
      grad_out = 2.0 * grad_out * w.asDiagonal();
      if (model.wrist_only) {
        for (std::size_t j = 0; j < kNumJoints; ++j)
          if (j != kLeftWrist && j != kRightWrist) grad_out.col(static_cast<Eigen::Index>(j)).setZero();
      }
      g.dM.noalias() += a * grad_out.transpose();
      g.dS.noalias() += grad_out.transpose() * (model.M.transpose() * s.delta[c]);
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  g.dS *= inv;
  g.dM *= inv;
  return g;
}

ModelGradient loss_gradient(const ForecastModel& model, std::span<const Window> batch,
                            const Eigen::VectorXd& w) {
  std::vector<TrainingSample> samples;
  samples.reserve(batch.size());
  for (const auto& win : batch) samples.push_back(make_sample(win.context, win.future));
  std::vector<std::size_t> idx(samples.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return loss_gradient(model, samples, idx, w);
}

CmaxFn probe_cmax(std::vector<RobotPlan> probe_plans, PlanCostFn cost) {
  if (probe_plans.empty()) throw std::invalid_argument("probe set must be non-empty");
  return [plans = std::move(probe_plans), cost = std::move(cost)](const Window& win) {
    const Forecast truth = Forecast::point(win.future);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& plan : plans) best = std::max(best, cost(plan, truth));
    return best;
  };
}

std::vector<std::size_t> top_percentile(std::span<const double> values, double top_fraction) {
  if (values.empty()) return {};
  if (!(top_fraction > 0.0 && top_fraction <= 1.0))
    throw std::invalid_argument("top fraction must be in (0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = (1.0 - top_fraction) * static_cast<double>(sorted.size());
  const auto at = std::min(static_cast<std::size_t>(std::floor(pos + 1e-9)), sorted.size() - 1);
  const double threshold = sorted[at];
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] >= threshold) out.push_back(i);
  return out;
}

std::vector<std::size_t> build_transition_set(std::span<const Window> windows, TransitionMode mode,
                                              double delta_percentile, const CmaxFn& cmax) {
  if (windows.empty()) throw std::invalid_argument("no windows");
  std::vector<std::size_t> out;
  if (mode == TransitionMode::Annotated) {
    for (std::size_t i = 0; i < windows.size(); ++i)
      if (windows[i].is_transition) out.push_back(i);
  } else {
    if (!cmax) throw std::invalid_argument("cost-percentile mode needs a cost function");
    std::vector<double> values;
    values.reserve(windows.size());
    for (const auto& w : windows) values.push_back(cmax(w));
    out = top_percentile(values, delta_percentile);
  }
  if (out.empty()) throw std::runtime_error("transition set is empty");
  return out;
}

std::vector<std::size_t> sample_batch(std::size_t n_windows, std::span<const std::size_t> transition_set,
                                      double mix, std::size_t batch_size, std::mt19937_64& rng) {
  if (!(mix >= 0.0 && mix <= 1.0)) throw std::invalid_argument("mix must be in [0, 1]");
  if (n_windows == 0) throw std::invalid_argument("no windows to sample");
  const auto n_transition =
      static_cast<std::size_t>(std::ceil(mix * static_cast<double>(batch_size) - 1e-12));
  if (n_transition > 0 && transition_set.empty())
    throw std::invalid_argument("transition mix requested with an empty transition set");

  std::vector<std::size_t> batch;
  batch.reserve(batch_size);
  if (n_transition > 0) {
    std::uniform_int_distribution<std::size_t> pick(0, transition_set.size() - 1);
    for (std::size_t i = 0; i < n_transition; ++i) batch.push_back(transition_set[pick(rng)]);
  }
  std::uniform_int_distribution<std::size_t> any(0, n_windows - 1);
  while (batch.size() < batch_size) batch.push_back(any(rng));
  return batch;
}

double cost_gap(const std::function<Forecast(const Context&)>& forecaster,
                std::span<const Window> windows, std::span<const RobotPlan> probe_plans,
                const PlanCostFn& task_cost) {
  if (probe_plans.empty()) throw std::invalid_argument("cost_gap needs probe plans");
  if (windows.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& win : windows) {
    const Forecast truth = Forecast::point(win.future);
    const Forecast predicted = forecaster(win.context);
    for (const auto& plan : probe_plans) sum += std::abs(task_cost(plan, truth) - task_cost(plan, predicted));
  }
  return sum / static_cast<double>(windows.size() * probe_plans.size());
}

double cost_gap(const ForecastModel& model, std::span<const Window> windows,
                std::span<const RobotPlan> probe_plans, const PlanCostFn& task_cost) {
  return cost_gap([&model](const Context& ctx) { return model_forward(model, ctx); }, windows,
                  probe_plans, task_cost);
}

Forecaster baseline_forecaster(const std::string& name) {
  if (name == "cur") return {"cur", false, [](const Context& c, const Trajectory*) { return forecast_cur(c); }};
  if (name == "cvm") return {"cvm", false, [](const Context& c, const Trajectory*) { return forecast_cvm(c); }};
  if (name == "worst")
    return {"worst", false, [](const Context& c, const Trajectory*) { return forecast_worst(c); }, true};
  if (name == "fut")
    return {"fut", true, [](const Context&, const Trajectory* f) { return forecast_oracle(f); }};
  throw std::invalid_argument("unknown baseline forecaster '" + name + "'");
}

Forecaster model_forecaster(ForecastModel model) {
  model.validate();
  std::string name = model.preset;
  return {std::move(name), false,
          [m = std::move(model)](const Context& c, const Trajectory*) { return model_forward(m, c); }};
}

}  // namespace hrc
