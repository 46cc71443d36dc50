#pragma once

#include "hrc/motion.hpp"
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

/// Either a point trajectory or, for the conservative model, a set of
/// spheres per future timestep.
struct Forecast {
  enum class Kind { PointTrajectory, SafetyVolume };

  Kind kind = Kind::PointTrajectory;
  std::optional<Trajectory> trajectory;
  std::optional<std::vector<std::vector<Sphere>>> volumes;

  static Forecast point(Trajectory traj);
  static Forecast safety_volume(std::vector<std::vector<Sphere>> volumes);

  bool is_point() const { return kind == Kind::PointTrajectory; }
  std::size_t horizon() const;
  void validate() const;
};

Forecast forecast_cur(const Context& ctx, std::size_t horizon = kHorizon);
Forecast forecast_cvm(const Context& ctx, std::size_t horizon = kHorizon);
Forecast forecast_worst(const Context& ctx, std::size_t horizon = kHorizon);
/// Ground-truth playback. Throws std::logic_error when no future is available.
Forecast forecast_oracle(const Trajectory* window_future);

/// Separable linear spatio-temporal forecaster. Displacements of the context
/// from its current pose are mixed over time by M (k x T) and over joints by S
/// (J x J) and added back to the current pose.
struct ForecastModel {
  Eigen::MatrixXd S;
  Eigen::MatrixXd M;
  Eigen::VectorXd w;
  bool trained = false;
  /// When set, only wrist joints move; the rest hold the current pose.
  bool wrist_only = false;
  std::string preset = "untrained";
  std::uint64_t seed = 0;

  static ForecastModel identity(std::size_t k = kContextLength, std::size_t horizon = kHorizon);

  std::size_t context_length() const { return static_cast<std::size_t>(M.rows()); }
  std::size_t horizon() const { return static_cast<std::size_t>(M.cols()); }
  void validate() const;
};

Forecast model_forward(const ForecastModel& model, const Context& ctx);

/// Per-joint loss weights: ones with the wrists scaled by wrist_weight.
Eigen::VectorXd joint_weights(double wrist_weight);

/// Sum over t and j of w_j * squared joint error.
double weighted_loss(const ForecastModel& model, const Context& ctx, const Trajectory& truth,
                     const Eigen::VectorXd& w);

struct ModelGradient {
  Eigen::MatrixXd dS;
  Eigen::MatrixXd dM;
};

/// Window in the model's coordinates: per axis, context displacements (k x J)
/// and future displacements (T x J) from the current pose.
struct TrainingSample {
  std::array<Eigen::MatrixXd, 3> delta;
  std::array<Eigen::MatrixXd, 3> target;
};

TrainingSample make_sample(const Context& ctx, const Trajectory& truth);
double sample_loss(const ForecastModel& model, const TrainingSample& sample, const Eigen::VectorXd& w);

/// Exact gradient of the mean weighted loss over the batch.
ModelGradient loss_gradient(const ForecastModel& model, std::span<const Window> batch,
                            const Eigen::VectorXd& w);
ModelGradient loss_gradient(const ForecastModel& model, std::span<const TrainingSample> samples,
                            std::span<const std::size_t> batch, const Eigen::VectorXd& w);

enum class TransitionMode { Annotated, CostPercentile };

/// Maximum cost a window can induce, C_max(phi).
using CmaxFn = std::function<double(const Window&)>;
/// Cost of a robot plan given a human forecast.
using PlanCostFn = std::function<double(const RobotPlan&, const Forecast&)>;

/// C_max over a fixed probe set, evaluated at each window's recorded future.
CmaxFn probe_cmax(std::vector<RobotPlan> probe_plans, PlanCostFn cost);

/// Indices whose value reaches the (1 - top_fraction) quantile of the sorted values.
std::vector<std::size_t> top_percentile(std::span<const double> values, double top_fraction);

/// Throws std::runtime_error when the resulting set is empty.
std::vector<std::size_t> build_transition_set(std::span<const Window> windows, TransitionMode mode,
                                              double delta_percentile = 0.10,
                                              const CmaxFn& cmax = {});

/// ceil(mix * batch_size) indices drawn uniformly from transition_set, the
/// rest uniformly from [0, n_windows).
std::vector<std::size_t> sample_batch(std::size_t n_windows, std::span<const std::size_t> transition_set,
                                      double mix, std::size_t batch_size, std::mt19937_64& rng);

struct TrainConfig {
  int epochs = 50;
  std::size_t batch_size = 64;
  double learning_rate = 0.05;
  double momentum = 0.9;
  double transition_mix = 0.5;
  double wrist_weight = 1.0;
  bool wrist_only = false;
  std::uint64_t seed = 0;
  std::string preset = "manicast";

  void validate() const;
};

/// Named training presets: scratch, finetuned, finetuned-w, manicast,
/// manicast-t, manicast-w, wristonly, wristonly-t.
TrainConfig preset_config(const std::string& name);
const std::vector<std::string>& preset_names();

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  ForecastModel model;
  std::vector<EpochRecord> history;
  int best_epoch = 0;
};

/// Momentum SGD on the weighted loss over batches drawn from the transition
/// mixture. Recorded losses are the mixture objective on each split; the
/// returned model has the lowest validation loss, epoch 0 included.
TrainResult train(const ForecastModel& init, std::span<const Window> train_windows,
                  std::span<const Window> val_windows, const TrainConfig& config);

/// Mean over windows and probe plans of |C(plan | truth) - C(plan | forecast)|.
double cost_gap(const std::function<Forecast(const Context&)>& forecaster,
                std::span<const Window> windows, std::span<const RobotPlan> probe_plans,
                const PlanCostFn& task_cost);
double cost_gap(const ForecastModel& model, std::span<const Window> windows,
                std::span<const RobotPlan> probe_plans, const PlanCostFn& task_cost);

/// A named forecast source usable in playback. Receives the true future only
/// when it asks for it.
struct Forecaster {
  std::string name;
  bool uses_future = false;
  std::function<Forecast(const Context&, const Trajectory*)> predict;
  bool produces_volume = false;
};

/// cur, cvm, worst, fut.
Forecaster baseline_forecaster(const std::string& name);
Forecaster model_forecaster(ForecastModel model);

}  // namespace hrc
