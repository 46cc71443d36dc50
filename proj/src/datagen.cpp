#include "hrc/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace hrc {

void GenConfig::validate() const {
  if (!(fps > 0.0)) throw std::invalid_argument("fps must be positive");
  if (!(episode_len_s > 0.0) || !(reach_duration_s > 0.0) || !(hold_duration_s > 0.0) ||
      !(dwell_duration_s > 0.0))
    throw std::invalid_argument("durations must be positive");
  if (n_interactions < 1) throw std::invalid_argument("n_interactions must be >= 1");
  if (!(jitter_sigma >= 0.0)) throw std::invalid_argument("jitter_sigma must be >= 0");
  const double busy = n_interactions * (2.0 * reach_duration_s + hold_duration_s);
  if (!(busy < episode_len_s))
    throw std::invalid_argument("infeasible schedule: interactions do not fit in the episode");
}

Vec3 min_jerk(const Vec3& a, const Vec3& b, double s) {
  s = std::clamp(s, 0.0, 1.0);
  const double s3 = s * s * s;
  const double blend = s3 * (10.0 - 15.0 * s + 6.0 * s * s);
  return a + (b - a) * blend;
}

Vec3 place_elbow(const Vec3& shoulder, const Vec3& wrist, double upper_arm, double forearm) {
  const Vec3 axis = wrist - shoulder;
  const double d = axis.norm();
  if (d > upper_arm + forearm + 1e-9 || d < std::abs(upper_arm - forearm) - 1e-9 || d < 1e-9)
    throw std::invalid_argument("wrist target outside the arm's reachable shell");
  const Vec3 u = axis / d;
  const double along = (upper_arm * upper_arm - forearm * forearm + d * d) / (2.0 * d);
  const double radius = std::sqrt(std::max(0.0, upper_arm * upper_arm - along * along));
  Vec3 down = Vec3(0, 0, -1) - u * (-u.z());
  if (down.norm() < 1e-9) down = Vec3(1, 0, 0) - u * u.x();
  return shoulder + along * u + radius * down.normalized();
}

Pose make_pose(const HumanLayout& layout, const Vec3& right_wrist, const Vec3& left_wrist) {
  Pose p;
  p[kRightShoulder] = layout.right_shoulder;
  p[kLeftShoulder] = layout.left_shoulder;
  p[kUpperBack] = layout.upper_back;
  p[kRightWrist] = right_wrist;
  p[kLeftWrist] = left_wrist;
  p[kRightElbow] = place_elbow(layout.right_shoulder, right_wrist, layout.upper_arm, layout.forearm);
  p[kLeftElbow] = place_elbow(layout.left_shoulder, left_wrist, layout.upper_arm, layout.forearm);
  return p;
}

namespace {

int to_frames(double seconds, double fps) {
  return std::max(1, static_cast<int>(std::lround(seconds * fps)));
}

// Gaussian per-frame jitter, smoothed by a centered 3-frame moving average.
void add_jitter(std::vector<Pose>& frames, double sigma, std::mt19937_64& rng) {
  if (sigma <= 0.0 || frames.empty()) return;
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<Pose> raw(frames.size());
  for (auto& pose : raw)
    for (auto& p : pose.joints) p = Vec3(noise(rng), noise(rng), noise(rng));
  const std::size_t n = frames.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = std::min(n - 1, i + 1);
    const double count = static_cast<double>(hi - lo + 1);
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      Vec3 sum = Vec3::Zero();
      for (std::size_t t = lo; t <= hi; ++t) sum += raw[t][j];
      frames[i][j] += sum / count;
    }
  }
}

struct Schedule {
  std::vector<int> reach_start;
  int reach = 0;
  int hold = 0;
  int span() const { return 2 * reach + hold; }
};

// One interaction per equal slot, onset drawn uniformly inside the slot.
Schedule schedule_interactions(const GenConfig& cfg, int n_frames, std::mt19937_64& rng) {
  Schedule s;
  s.reach = to_frames(cfg.reach_duration_s, cfg.fps);
  s.hold = to_frames(cfg.hold_duration_s, cfg.fps);
  const int slot = n_frames / cfg.n_interactions;
  const int slack = slot - s.span() - 1;
  if (slack < 0) throw std::invalid_argument("infeasible schedule: interaction slot too short");
  const int margin = std::min(to_frames(1.5, cfg.fps), slack / 2);
  for (int i = 0; i < cfg.n_interactions; ++i) {
    std::uniform_int_distribution<int> onset(margin, slack - margin);
    s.reach_start.push_back(i * slot + onset(rng));
  }
  return s;
}

Episode base_episode(const GenConfig& cfg, Task task) {
  cfg.validate();
  Episode ep;
  ep.fps = cfg.fps;
  ep.task = task;
  ep.extras.seed = static_cast<long long>(cfg.seed);
  return ep;
}

// Right-wrist path: rest, reach to target, hold, return, per interaction.
std::vector<Vec3> interaction_path(const GenConfig& cfg, int n_frames, const Schedule& s,
                                   const std::vector<Vec3>& targets) {
  std::vector<Vec3> path(static_cast<std::size_t>(n_frames), cfg.rest_wrist);
  for (std::size_t i = 0; i < s.reach_start.size(); ++i) {
    const int f0 = s.reach_start[i];
    const Vec3& goal = targets[i];
    for (int f = 0; f <= s.span(); ++f) {
      Vec3 p;
      if (f <= s.reach) {
        p = min_jerk(cfg.rest_wrist, goal, static_cast<double>(f) / s.reach);
      } else if (f <= s.reach + s.hold) {
        p = goal;
      } else {
        p = min_jerk(goal, cfg.rest_wrist, static_cast<double>(f - s.reach - s.hold) / s.reach);
      }
      path[static_cast<std::size_t>(f0 + f)] = p;
    }
  }
  return path;
}

std::vector<Pose> poses_from_path(const HumanLayout& layout, const std::vector<Vec3>& path) {
  std::vector<Pose> frames;
  frames.reserve(path.size());
  for (const auto& w : path) frames.push_back(make_pose(layout, w, layout.left_wrist_rest));
  return frames;
}

Vec3 sample_in(const SampleBox& box, std::mt19937_64& rng) {
  Vec3 p;
  for (int c = 0; c < 3; ++c) {
    std::uniform_real_distribution<double> u(box.lo[c], box.hi[c]);
    p[c] = box.lo[c] == box.hi[c] ? box.lo[c] : u(rng);
  }
  return p;
}

}  // namespace

Episode gen_stirring(const GenConfig& config, const HumanLayout& layout) {
  Episode ep = base_episode(config, Task::Stir);
  std::mt19937_64 rng(config.seed);
  const int n = static_cast<int>(std::lround(config.episode_len_s * config.fps));
  const Schedule s = schedule_interactions(config, n, rng);

  const std::vector<Vec3> targets(s.reach_start.size(), config.pot_position);
  ep.frames = poses_from_path(layout, interaction_path(config, n, s, targets));
  add_jitter(ep.frames, config.jitter_sigma, rng);
  for (int f0 : s.reach_start) ep.transitions.push_back({f0, f0 + s.span()});
  ep.extras.pot_position = config.pot_position;
  return ep;
}

Episode gen_handover(const GenConfig& config, const HumanLayout& layout) {
  Episode ep = base_episode(config, Task::Handover);
  std::mt19937_64 rng(config.seed);
  const int n = static_cast<int>(std::lround(config.episode_len_s * config.fps));
  const Schedule s = schedule_interactions(config, n, rng);

  std::vector<Vec3> goals;
  for (std::size_t i = 0; i < s.reach_start.size(); ++i) goals.push_back(sample_in(kHandoverGoalBox, rng));
  ep.frames = poses_from_path(layout, interaction_path(config, n, s, goals));
  add_jitter(ep.frames, config.jitter_sigma, rng);

  ep.extras.object_in_hand.assign(static_cast<std::size_t>(n), false);
  for (int f0 : s.reach_start) {
    ep.transitions.push_back({f0, f0 + s.span()});
    for (int f = f0; f <= f0 + s.reach + s.hold; ++f) ep.extras.object_in_hand[static_cast<std::size_t>(f)] = true;
  }
  ep.extras.handover_goals = std::move(goals);
  return ep;
}

Episode gen_tableset(const GenConfig& config, const HumanLayout& layout) {
  Episode ep = base_episode(config, Task::TableSet);
  std::mt19937_64 rng(config.seed);
  const int n = static_cast<int>(std::lround(config.episode_len_s * config.fps));
  const int move = to_frames(config.reach_duration_s, config.fps);
  const int dwell = to_frames(config.dwell_duration_s, config.fps);
  if (n < move + dwell + 1) throw std::invalid_argument("infeasible schedule: episode too short");

  std::vector<Vec3> waypoints;
  for (int i = 0; i < kTableWaypoints; ++i) waypoints.push_back(sample_in(kTableWaypointBox, rng));

  // Cycle through the waypoints until the episode is filled.
  std::vector<Vec3> path;
  path.reserve(static_cast<std::size_t>(n));
  Vec3 from = config.rest_wrist;
  for (std::size_t leg = 0; static_cast<int>(path.size()) < n; ++leg) {
    const Vec3& to = waypoints[leg % waypoints.size()];
    for (int f = 0; f < move && static_cast<int>(path.size()) < n; ++f)
      path.push_back(min_jerk(from, to, static_cast<double>(f) / move));
    for (int f = 0; f < dwell && static_cast<int>(path.size()) < n; ++f) path.push_back(to);
    from = to;
  }

  ep.frames = poses_from_path(layout, path);
  add_jitter(ep.frames, config.jitter_sigma, rng);
  ep.transitions.push_back({0, n - 1});
  ep.extras.waypoints = std::move(waypoints);
  return ep;
}

Episode generate(Task task, const GenConfig& config, const HumanLayout& layout) {
  switch (task) {
    case Task::Stir: return gen_stirring(config, layout);
    case Task::Handover: return gen_handover(config, layout);
    case Task::TableSet: return gen_tableset(config, layout);
  }
  throw std::invalid_argument("unknown task");
}

DatasetSplit split_dataset(std::size_t n, std::uint64_t seed) {
  if (n < 10) throw std::invalid_argument("split_dataset needs at least 10 episodes");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const std::size_t n_train = n * 8 / 10;
  const std::size_t n_val = n / 10;
  DatasetSplit split;
  split.train.assign(order.begin(), order.begin() + n_train);
  split.val.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  split.test.assign(order.begin() + n_train + n_val, order.end());
  return split;
}

}  // namespace hrc
