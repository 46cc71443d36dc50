#include "hrc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hrc {

Stat summarize(std::span<const double> values) {
  Stat s;
  s.n = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.se = std::sqrt(ss / static_cast<double>(s.n - 1)) / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

DisplacementError ade_fde(const Trajectory& forecast, const Trajectory& truth, std::span<const std::size_t> joints) {
  if (forecast.size() != truth.size()) throw std::invalid_argument("forecast and truth lengths differ");
  if (truth.size() == 0 || joints.empty()) throw std::invalid_argument("empty trajectory or joint subset");
  DisplacementError e;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    double frame = 0.0;
    for (std::size_t j : joints) frame += (forecast.frames[t][j] - truth.frames[t][j]).norm();
    frame *= 1000.0 / static_cast<double>(joints.size());
    e.ade += frame;
    if (t + 1 == truth.size()) e.fde = frame;
  }
  e.ade /= static_cast<double>(truth.size());
  return e;
}

namespace {

struct ErrorSeries {
  std::vector<double> ade, fde, wrist_ade, wrist_fde;

  void add(const Trajectory& forecast, const Trajectory& truth) {
    const auto all = ade_fde(forecast, truth, kAllJoints);
    const auto wrist = ade_fde(forecast, truth, kWristJoints);
    ade.push_back(all.ade);
    fde.push_back(all.fde);
    wrist_ade.push_back(wrist.ade);
    wrist_fde.push_back(wrist.fde);
  }
};

TransitionErrors transition_from(const ErrorSeries& s) {
  return {summarize(s.ade), summarize(s.fde), summarize(s.wrist_ade), summarize(s.wrist_fde)};
}

}  // namespace

TransitionErrors transition_metrics(std::span<const Window> windows, std::span<const Trajectory> forecasts,
                                    std::span<const Trajectory> truths) {
  if (windows.size() != forecasts.size() || windows.size() != truths.size())
    throw std::invalid_argument("one forecast and truth per window required");
  ErrorSeries s;
  for (std::size_t i = 0; i < windows.size(); ++i)
    if (windows[i].is_transition) s.add(forecasts[i], truths[i]);
  if (s.ade.empty()) throw std::invalid_argument("no transition windows");
  return transition_from(s);
}

ForecastMetrics forecast_metrics(std::span<const Window> windows, std::span<const Trajectory> forecasts) {
  if (windows.size() != forecasts.size()) throw std::invalid_argument("one forecast per window required");
  if (windows.empty()) throw std::invalid_argument("no windows");
  ErrorSeries all, tr;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    all.add(forecasts[i], windows[i].future);
    if (windows[i].is_transition) tr.add(forecasts[i], windows[i].future);
  }
  ForecastMetrics m;
  m.ade = summarize(all.ade);
  m.fde = summarize(all.fde);
  m.wrist_ade = summarize(all.wrist_ade);
  m.wrist_fde = summarize(all.wrist_fde);
  const auto t = transition_from(tr);
  m.t_ade = t.t_ade;
  m.t_fde = t.t_fde;
  m.t_wrist_ade = t.t_wrist_ade;
  m.t_wrist_fde = t.t_wrist_fde;
  return m;
}

std::vector<int> rising_edges(std::span<const SimStep> steps) {
  std::vector<int> out;
  for (std::size_t i = 0; i < steps.size(); ++i)
    if (steps[i].retract && (i == 0 || !steps[i - 1].retract)) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> falling_edges(std::span<const SimStep> steps) {
  std::vector<int> out;
  for (std::size_t i = 1; i < steps.size(); ++i)
    if (!steps[i].retract && steps[i - 1].retract) out.push_back(static_cast<int>(i));
  return out;
}

namespace {

void check_pair(const SimLog& a, const SimLog& b) {
  if (a.steps.size() != b.steps.size() || a.steps.empty() || a.steps.front().frame != b.steps.front().frame)
    throw std::invalid_argument("log pair does not cover the same episode frames");
}

struct Run {
  int start;
  int end;  // one past the last active index
};

std::vector<Run> active_runs(std::span<const SimStep> steps) {
  std::vector<Run> runs;
  const auto rise = rising_edges(steps);
  const auto fall = falling_edges(steps);
  for (std::size_t i = 0; i < rise.size(); ++i)
    runs.push_back({rise[i], i < fall.size() ? fall[i] : static_cast<int>(steps.size())});
  return runs;
}

}  // namespace

StopRestart stop_restart_times(std::span<const SimLog> model_logs, std::span<const SimLog> cur_logs) {
  if (model_logs.size() != cur_logs.size()) throw std::invalid_argument("one baseline log per model log required");
  std::vector<double> stops, restarts;
  StopRestart out;
  bool volume = false;
  for (std::size_t e = 0; e < model_logs.size(); ++e) {
    const SimLog& model = model_logs[e];
    const SimLog& cur = cur_logs[e];
    check_pair(model, cur);
    if (model.task != Task::Stir || cur.task != Task::Stir) throw std::invalid_argument("stop/restart needs stirring logs");
    volume = volume || model.volume_forecast;
    const double frame_ms = model.dt * 1000.0;
    const int n = static_cast<int>(model.steps.size());
    const int horizon = static_cast<int>(model.horizon);

    const auto incursions = active_runs(cur.steps);
    const auto rises = rising_edges(model.steps);
    const auto falls = falling_edges(model.steps);

    for (std::size_t i = 0; i < incursions.size(); ++i) {
      const Run& inc = incursions[i];
      ++out.incursions;
      const int w_lo = i == 0 ? 0 : incursions[i - 1].end;
      const int w_hi = i + 1 < incursions.size() ? incursions[i + 1].start : n;

      std::optional<int> t_stop;
      for (int r : rises)
        if (r >= w_lo && r < inc.end) {
          t_stop = r;
          break;
        }
      if (!t_stop && model.steps[static_cast<std::size_t>(w_lo)].retract) t_stop = w_lo;
      if (!t_stop) {
        ++out.missed;
        continue;
      }
      stops.push_back((inc.start - *t_stop) * frame_ms);

      if (inc.end >= n) continue;
      const int hi = std::min(inc.end + horizon, w_hi);
      std::optional<int> t_restart;
      for (int f : falls)
        if (f > *t_stop && f <= hi) t_restart = f;
      if (t_restart) restarts.push_back((inc.end - *t_restart) * frame_ms);
    }

    for (int r : rises) {
      ++out.activations;
      bool real = false;
      for (int f = r; f <= std::min(r + horizon, n - 1) && !real; ++f) real = cur.steps[static_cast<std::size_t>(f)].retract;
      if (!real) ++out.false_activations;
    }
  }
  if (out.incursions == 0) throw std::invalid_argument("no incursions in the baseline logs");
  out.stop_ms = summarize(stops);
  if (!volume) out.restart_ms = summarize(restarts);
  out.fdr = out.activations == 0 ? 0.0
                                 : static_cast<double>(out.false_activations) / static_cast<double>(out.activations);
  return out;
}

namespace {

const SimStep* step_at(const SimLog& log, int frame) {
  if (log.steps.empty()) return nullptr;
  const int i = frame - log.steps.front().frame;
  if (i < 0 || i >= static_cast<int>(log.steps.size())) return nullptr;
  return &log.steps[static_cast<std::size_t>(i)];
}

// Object-in-hand runs as closed intervals.
std::vector<Interval> held_intervals(const Episode& ep) {
  std::vector<Interval> out;
  const auto& held = ep.extras.object_in_hand;
  for (std::size_t f = 0; f < held.size(); ++f) {
    if (!held[f]) continue;
    if (f == 0 || !held[f - 1]) out.push_back({static_cast<int>(f), static_cast<int>(f)});
    out.back().end = static_cast<int>(f);
  }
  return out;
}

}  // namespace

std::optional<int> detection_frame(const SimLog& log, const Vec3& goal, int lo, int hi, const HandoverParams& params) {
  for (int f = lo; f + params.persistence - 1 <= hi; ++f) {
    bool ok = true;
    for (int g = f; g < f + params.persistence && ok; ++g) {
      const SimStep* s = step_at(log, g);
      ok = s && s->forecast_wrist && (*s->forecast_wrist - goal).norm() <= params.detect_radius;
    }
    if (ok) return f;
  }
  return std::nullopt;
}

HandoverMetrics handover_metrics(std::span<const SimLog> model_logs, std::span<const SimLog> cur_logs,
                                 std::span<const Episode> episodes, const HandoverParams& params) {
  if (model_logs.size() != cur_logs.size() || model_logs.size() != episodes.size())
    throw std::invalid_argument("one baseline log and episode per model log required");
  std::vector<double> gains, paths, times;
  HandoverMetrics out;
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    const Episode& ep = episodes[e];
    const SimLog& model = model_logs[e];
    check_pair(model, cur_logs[e]);
    if (ep.task != Task::Handover) throw std::invalid_argument("handover metrics need handover episodes");
    const auto held = held_intervals(ep);
    if (held.empty() || ep.extras.handover_goals.size() < held.size())
      throw std::invalid_argument("handover episode is missing goal metadata");
    for (std::size_t i = 0; i < held.size(); ++i) {
      const Vec3& goal = ep.extras.handover_goals[i];
      const Interval& h = held[i];
      ++out.handovers;
      const auto t_model = detection_frame(model, goal, h.start, h.end, params);
      const auto t_cur = detection_frame(cur_logs[e], goal, h.start, h.end, params);
      if (t_model) ++out.detected;
      if (t_model && t_cur) gains.push_back((*t_cur - *t_model) * model.dt * 1000.0);

      int reach_end = h.end;
      for (const auto& tr : ep.transitions)
        if (tr.contains(h.start)) reach_end = tr.end;
      const SimStep* prev = step_at(model, h.start);
      if (!prev) continue;
      double length = 0.0;
      for (int f = h.start; f <= reach_end; ++f) {
        const SimStep* s = step_at(model, f);
        if (!s) break;
        length += (s->ee.position - prev->ee.position).norm();
        prev = s;
        if ((s->ee.position - goal).norm() <= params.arrive_radius) {
          ++out.arrived;
          paths.push_back(length * 1000.0);
          times.push_back((f - h.start) * model.dt);
          break;
        }
      }
    }
  }
  out.goal_detection_ms = summarize(gains);
  out.correct_goal_rate = out.handovers == 0 ? 0.0 : static_cast<double>(out.detected) / static_cast<double>(out.handovers);
  out.path_length_mm = summarize(paths);
  out.time_to_goal_s = summarize(times);
  return out;
}

void ToyCMDP::validate() const {
  const auto m = p_phi.size();
  const auto n = costs.size();
  if (m == 0 || n == 0) throw std::invalid_argument("empty context or future space");
  if (p_true.rows() != m || p_true.cols() != n || p_model.rows() != m || p_model.cols() != n)
    throw std::invalid_argument("conditional tables must be m x n");
  if (std::abs(p_phi.sum() - 1.0) > 1e-12 || (p_phi.array() < 0.0).any())
    throw std::invalid_argument("context distribution must sum to 1");
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::abs(p_true.row(i).sum() - 1.0) > 1e-12 || (p_true.row(i).array() < 0.0).any() ||
        std::abs(p_model.row(i).sum() - 1.0) > 1e-12 || (p_model.row(i).array() < 0.0).any())
      throw std::invalid_argument("conditional rows must sum to 1");
  }
  if (!costs.allFinite() || !std::isfinite(delta)) throw std::invalid_argument("non-finite costs or threshold");
  if ((costs.array() < 0.0).any()) throw std::invalid_argument("costs must be non-negative");
}

double ToyCMDP::context_cmax(Eigen::Index i) const {
  double c = 0.0;
  for (Eigen::Index x = 0; x < costs.size(); ++x)
    if (p_true(i, x) > 0.0 || p_model(i, x) > 0.0) c = std::max(c, costs[x]);
  return c;
}

Lemma1Report lemma1_check(const ToyCMDP& toy) {
  toy.validate();
  const Eigen::Index m = toy.p_phi.size();
  Eigen::VectorXd tv(m), gap(m), cmax(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::RowVectorXd d = toy.p_true.row(i) - toy.p_model.row(i);
    tv[i] = d.cwiseAbs().sum();
    gap[i] = std::abs(d.dot(toy.costs.transpose()));
    cmax[i] = toy.context_cmax(i);
  }
  Eigen::VectorXd in_t(m);
  for (Eigen::Index i = 0; i < m; ++i) in_t[i] = cmax[i] >= toy.delta ? 1.0 : 0.0;
  const double mass = toy.p_phi.dot(in_t);
  if (!(mass > 0.0)) throw std::runtime_error("no context reaches the cost threshold");
  const Eigen::VectorXd p_t = toy.p_phi.cwiseProduct(in_t) / mass;
  const Eigen::VectorXd q = 0.5 * toy.p_phi + 0.5 * p_t;

  Lemma1Report r;
  r.eps_p = toy.p_phi.dot(tv);
  r.eps_q = q.dot(tv);
  r.ell = toy.p_phi.dot(gap);
  r.c_max = cmax.maxCoeff();
  r.transition_mass = mass;
  r.bound_p = r.c_max * r.eps_p;
  r.bound_q = 2.0 * std::max(toy.delta, r.c_max * mass) * r.eps_q;
  r.holds_p = r.ell <= r.bound_p + kLemmaTolerance;
  r.holds_q = r.ell <= r.bound_q + kLemmaTolerance;
  return r;
}

ToyCMDP worked_toy_cmdp() {
  ToyCMDP toy;
  toy.p_phi = Eigen::Vector2d(0.9, 0.1);
  toy.p_true.resize(2, 2);
  toy.p_true << 1.0, 0.0, 1.0, 0.0;
  toy.p_model.resize(2, 2);
  toy.p_model << 1.0, 0.0, 0.8, 0.2;
  toy.costs = Eigen::Vector2d(1.0, 10.0);
  toy.delta = 5.0;
  return toy;
}

namespace {

Eigen::VectorXd random_simplex(std::mt19937_64& rng, Eigen::Index n, double zero_prob) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = u(rng) < zero_prob ? 0.0 : u(rng);
  if (v.sum() <= 0.0) v[std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng)] = 1.0;
  v /= v.sum();
  return v;
}

}  // namespace

ToyCMDP random_toy_cmdp(std::mt19937_64& rng, int max_size) {
  if (max_size < 1) throw std::invalid_argument("max_size must be >= 1");
  std::uniform_int_distribution<int> size(1, max_size);
  const Eigen::Index m = size(rng);
  const Eigen::Index n = size(rng);
  ToyCMDP toy;
  toy.p_phi = random_simplex(rng, m, 0.0);
  toy.p_true.resize(m, n);
  toy.p_model.resize(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    toy.p_true.row(i) = random_simplex(rng, n, 0.3).transpose();
    toy.p_model.row(i) = random_simplex(rng, n, 0.3).transpose();
  }
  std::uniform_real_distribution<double> cost(0.0, 10.0);
  toy.costs.resize(n);
  for (Eigen::Index x = 0; x < n; ++x) toy.costs[x] = cost(rng);
  double top = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) top = std::max(top, toy.context_cmax(i));
  toy.delta = std::uniform_real_distribution<double>(0.0, top)(rng);
  return toy;
}

}  // namespace hrc
