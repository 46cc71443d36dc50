#pragma once

#include "hrc/motion.hpp"

#include <cstdint>
#include <vector>

namespace hrc {

struct GenConfig {
  std::uint64_t seed = 0;
  double fps = 1.0 / kFrameDt;
  double episode_len_s = 40.0;
  int n_interactions = 4;
  double jitter_sigma = 0.002;
  Vec3 pot_position{0.55, 0.0, 0.95};
  Vec3 rest_wrist{0.0, -0.6, 1.0};
  double reach_duration_s = 1.2;
  double hold_duration_s = 0.8;
  /// Table-setting dwell at each waypoint.
  double dwell_duration_s = 0.5;

  void validate() const;
};

/// Fixed torso and arm geometry of the generated human.
struct HumanLayout {
  Vec3 right_shoulder{0.55, -0.35, 1.25};
  Vec3 left_shoulder{0.20, -0.35, 1.25};
  Vec3 upper_back{0.375, -0.42, 1.15};
  Vec3 left_wrist_rest{0.20, -0.45, 0.85};
  double upper_arm = 0.43;
  double forearm = 0.43;
};

/// Handover goals and table waypoints are drawn from these boxes.
struct SampleBox {
  Vec3 lo;
  Vec3 hi;
  bool contains(const Vec3& p, double tol = 0.0) const {
    return (p.array() >= lo.array() - tol).all() && (p.array() <= hi.array() + tol).all();
  }
};

inline const SampleBox kHandoverGoalBox{{0.4, -0.2, 0.8}, {0.7, 0.2, 1.2}};
inline const SampleBox kTableWaypointBox{{0.3, -0.35, 0.9}, {0.8, 0.35, 0.9}};
inline constexpr int kTableWaypoints = 6;

/// Quintic minimum-jerk blend from a to b, s in [0, 1].
Vec3 min_jerk(const Vec3& a, const Vec3& b, double s);

/// Elbow position on the two-link solution circle, taken at its lowest point.
Vec3 place_elbow(const Vec3& shoulder, const Vec3& wrist, double upper_arm, double forearm);

Pose make_pose(const HumanLayout& layout, const Vec3& right_wrist, const Vec3& left_wrist);

Episode gen_stirring(const GenConfig& config, const HumanLayout& layout = {});
Episode gen_handover(const GenConfig& config, const HumanLayout& layout = {});
Episode gen_tableset(const GenConfig& config, const HumanLayout& layout = {});
Episode generate(Task task, const GenConfig& config, const HumanLayout& layout = {});

struct DatasetSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

/// Seeded 8:1:1 episode-level split over indices [0, n).
DatasetSplit split_dataset(std::size_t n, std::uint64_t seed);

}  // namespace hrc
