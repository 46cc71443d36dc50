#pragma once

#include "hrc/motion.hpp"
#include "hrc/planner.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace hrc {

inline constexpr std::array<std::size_t, kNumJoints> kAllJoints = {0, 1, 2, 3, 4, 5, 6};

/// Mean with its standard error.
struct Stat {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

Stat summarize(std::span<const double> values);

struct DisplacementError {
  double ade = 0.0;
  double fde = 0.0;
};

/// ADE and FDE in millimeters over the selected joints.
DisplacementError ade_fde(const Trajectory& forecast, const Trajectory& truth,
                          std::span<const std::size_t> joints = kAllJoints);

struct TransitionErrors {
  Stat t_ade, t_fde, t_wrist_ade, t_wrist_fde;
};

/// Errors restricted to transition windows. Throws when there are none.
TransitionErrors transition_metrics(std::span<const Window> windows, std::span<const Trajectory> forecasts,
                                    std::span<const Trajectory> truths);

struct ForecastMetrics {
  Stat ade, fde, wrist_ade, wrist_fde;
  Stat t_ade, t_fde, t_wrist_ade, t_wrist_fde;
};

/// Every metric over the windows' recorded futures; transition stats stay
/// empty when no window is a transition.
ForecastMetrics forecast_metrics(std::span<const Window> windows, std::span<const Trajectory> forecasts);

struct StopRestart {
  Stat stop_ms;
  /// Empty for safety-volume forecasters.
  std::optional<Stat> restart_ms;
  double fdr = 0.0;
  std::size_t incursions = 0;
  std::size_t missed = 0;
  std::size_t activations = 0;
  std::size_t false_activations = 0;
};

/// Frames at which a boolean series switches on; an initially set series
/// switches on at its first frame.
std::vector<int> rising_edges(std::span<const SimStep> steps);
/// Frames at which a set series is first unset.
std::vector<int> falling_edges(std::span<const SimStep> steps);

/// Retract timing relative to the current-pose baseline, one log pair per episode.
StopRestart stop_restart_times(std::span<const SimLog> model_logs, std::span<const SimLog> cur_logs);

struct HandoverMetrics {
  Stat goal_detection_ms;
  double correct_goal_rate = 0.0;
  Stat path_length_mm;
  Stat time_to_goal_s;
  std::size_t handovers = 0;
  std::size_t detected = 0;
  std::size_t arrived = 0;
};

struct HandoverParams {
  double detect_radius = 0.10;
  int persistence = 5;
  double arrive_radius = 0.05;
};

/// First frame in [lo, hi] opening a run of `persistence` frames whose forecast
/// wrist stays within the radius of the goal, the run ending by hi.
std::optional<int> detection_frame(const SimLog& log, const Vec3& goal, int lo, int hi,
                                   const HandoverParams& params = {});

HandoverMetrics handover_metrics(std::span<const SimLog> model_logs, std::span<const SimLog> cur_logs,
                                 std::span<const Episode> episodes, const HandoverParams& params = {});

struct PlanningMetrics {
  std::optional<StopRestart> stop_restart;
  std::optional<HandoverMetrics> handover;
};

struct MetricReport {
  std::map<std::string, ForecastMetrics> forecasting;
  std::map<std::string, PlanningMetrics> planning;
};

/// Finite context and future spaces with a fixed probe plan cost per future.
struct ToyCMDP {
  Eigen::VectorXd p_phi;
  Eigen::MatrixXd p_true;
  Eigen::MatrixXd p_model;
  Eigen::VectorXd costs;
  double delta = 0.0;

  void validate() const;
  /// Largest cost over futures either conditional can produce from context i.
  double context_cmax(Eigen::Index i) const;
};

struct Lemma1Report {
  double eps_p = 0.0;
  double eps_q = 0.0;
  double ell = 0.0;
  double c_max = 0.0;
  double transition_mass = 0.0;
  double bound_p = 0.0;
  double bound_q = 0.0;
  bool holds_p = false;
  bool holds_q = false;
};

inline constexpr double kLemmaTolerance = 1e-12;

/// Exact enumeration of both cost-gap bounds.
Lemma1Report lemma1_check(const ToyCMDP& toy);

/// Two contexts, two futures, costs (1, 10), delta 5.
ToyCMDP worked_toy_cmdp();

/// Random instance with at most max_size contexts and futures; delta drawn so
/// that at least one context reaches it.
ToyCMDP random_toy_cmdp(std::mt19937_64& rng, int max_size = 6);

}  // namespace hrc
