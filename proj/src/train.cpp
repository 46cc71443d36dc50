#include "hrc/forecast.hpp"

#include <cmath>
#include <stdexcept>

namespace hrc {

void TrainConfig::validate() const {
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("learning_rate must be >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must be in [0, 1)");
  if (!(transition_mix >= 0.0 && transition_mix <= 1.0))
    throw std::invalid_argument("transition_mix must be in [0, 1]");
  if (!(wrist_weight >= 1.0)) throw std::invalid_argument("wrist_weight must be >= 1");
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"scratch",    "finetuned",  "finetuned-w",
                                              "manicast",   "manicast-t", "manicast-w",
                                              "wristonly",  "wristonly-t"};
  return names;
}

TrainConfig preset_config(const std::string& name) {
  TrainConfig cfg;
  cfg.preset = name;
  if (name == "scratch" || name == "finetuned") {
    cfg.transition_mix = 0.0;
  } else if (name == "finetuned-w") {
    cfg.transition_mix = 0.0;
    cfg.wrist_weight = 5.0;
  } else if (name == "manicast") {
    cfg.transition_mix = 0.5;
  } else if (name == "manicast-t") {
    cfg.transition_mix = 1.0;
  } else if (name == "manicast-w") {
    cfg.transition_mix = 0.5;
    cfg.wrist_weight = 5.0;
  } else if (name == "wristonly") {
    cfg.transition_mix = 0.0;
    cfg.wrist_only = true;
  } else if (name == "wristonly-t") {
    cfg.transition_mix = 1.0;
    cfg.wrist_only = true;
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  return cfg;
}

namespace {

struct SplitData {
  std::vector<TrainingSample> samples;
  std::vector<std::size_t> transitions;
};

SplitData prepare(std::span<const Window> windows) {
  SplitData d;
  d.samples.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    d.samples.push_back(make_sample(windows[i].context, windows[i].future));
    if (windows[i].is_transition) d.transitions.push_back(i);
  }
  return d;
}

// Expected loss under (1 - mix) * uniform + mix * uniform-over-transitions.
double mixture_loss(const ForecastModel& model, const SplitData& d, double mix, const Eigen::VectorXd& w) {
  std::vector<double> per(d.samples.size());
  double all = 0.0;
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    per[i] = sample_loss(model, d.samples[i], w);
    all += per[i];
  }
  all /= static_cast<double>(d.samples.size());
  if (mix <= 0.0 || d.transitions.empty()) return all;
  double tr = 0.0;
  for (std::size_t i : d.transitions) tr += per[i];
  tr /= static_cast<double>(d.transitions.size());
  return (1.0 - mix) * all + mix * tr;
}

}  // namespace

TrainResult train(const ForecastModel& init, std::span<const Window> train_windows,
                  std::span<const Window> val_windows, const TrainConfig& config) {
  config.validate();
  init.validate();
  if (train_windows.empty() || val_windows.empty()) throw std::invalid_argument("train and val splits must be non-empty");

  const SplitData train_data = prepare(train_windows);
  const SplitData val_data = prepare(val_windows);
  if (config.transition_mix > 0.0 && train_data.transitions.empty())
    throw std::runtime_error("transition mix requested but the training split has no transition windows");

  const Eigen::VectorXd w = joint_weights(config.wrist_weight);
  ForecastModel model = init;
  model.w = w;
  model.wrist_only = config.wrist_only;
  model.preset = config.preset;
  model.seed = config.seed;

  TrainResult result;
  const double mix = config.transition_mix;
  auto record = [&](int epoch) {
    EpochRecord r{epoch, mixture_loss(model, train_data, mix, w), mixture_loss(model, val_data, mix, w)};
    if (!std::isfinite(r.train_loss) || !std::isfinite(r.val_loss))
      throw std::runtime_error("training diverged at epoch " + std::to_string(epoch));
    result.history.push_back(r);
    if (epoch == 0 || r.val_loss < result.history[static_cast<std::size_t>(result.best_epoch)].val_loss) {
      result.best_epoch = epoch;
      result.model = model;
    }
  };
  record(0);

  std::mt19937_64 rng(config.seed);
  Eigen::MatrixXd vel_s = Eigen::MatrixXd::Zero(model.S.rows(), model.S.cols());
  Eigen::MatrixXd vel_m = Eigen::MatrixXd::Zero(model.M.rows(), model.M.cols());
  const std::size_t n = train_data.samples.size();
  const std::size_t batches = (n + config.batch_size - 1) / config.batch_size;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t b = 0; b < batches; ++b) {
      const auto batch = sample_batch(n, train_data.transitions, mix, config.batch_size, rng);
      const ModelGradient g = loss_gradient(model, train_data.samples, batch, w);
      vel_s = config.momentum * vel_s - config.learning_rate * g.dS;
      vel_m = config.momentum * vel_m - config.learning_rate * g.dM;
      model.S += vel_s;
      model.M += vel_m;
    }
    model.trained = config.learning_rate > 0.0;
    record(epoch);
  }
  result.model.trained = result.best_epoch > 0 && config.learning_rate > 0.0;
  return result;
}

}  // namespace hrc
