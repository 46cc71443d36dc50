#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hrc {

using Vec3 = Eigen::Vector3d;

// Upper-body skeleton, fixed joint order.
enum Joint : std::size_t {
  kLeftWrist = 0,
  kRightWrist = 1,
  kLeftElbow = 2,
  kRightElbow = 3,
  kLeftShoulder = 4,
  kRightShoulder = 5,
  kUpperBack = 6,
};

inline constexpr std::size_t kNumJoints = 7;
inline constexpr std::size_t kContextLength = 10;
inline constexpr std::size_t kHorizon = 25;
inline constexpr double kFrameDt = 0.04;

inline constexpr std::array<std::string_view, kNumJoints> kJointNames = {
    "left_wrist",    "right_wrist",    "left_elbow", "right_elbow",
    "left_shoulder", "right_shoulder", "upper_back"};

inline constexpr std::array<std::size_t, 2> kWristJoints = {kLeftWrist, kRightWrist};

struct Pose {
  std::array<Vec3, kNumJoints> joints = [] {
    std::array<Vec3, kNumJoints> z;
    z.fill(Vec3::Zero());
    return z;
  }();

  const Vec3& operator[](std::size_t j) const { return joints[j]; }
  Vec3& operator[](std::size_t j) { return joints[j]; }

  bool all_finite() const;
  Pose translated(const Vec3& offset) const;
};

/// k observed poses, oldest first. The last frame is the current pose.
struct Context {
  std::vector<Pose> frames;
  double dt = kFrameDt;

  const Pose& current() const { return frames.back(); }
  std::size_t size() const { return frames.size(); }
};

/// T future poses; frames[0] is one dt after the context's current pose.
struct Trajectory {
  std::vector<Pose> frames;
  double dt = kFrameDt;

  std::size_t size() const { return frames.size(); }
};

enum class Task { Stir, Handover, TableSet };

std::string_view to_string(Task task);
Task task_from_string(std::string_view name);

/// Closed frame interval [start, end].
struct Interval {
  int start = 0;
  int end = 0;

  bool contains(int frame) const { return frame >= start && frame <= end; }
  bool operator==(const Interval&) const = default;
};

struct EpisodeExtras {
  std::optional<Vec3> pot_position;
  /// One handover goal per interaction, in interaction order.
  std::vector<Vec3> handover_goals;
  /// Per-frame flag; empty when the task has no held object.
  std::vector<bool> object_in_hand;
  std::vector<Vec3> waypoints;
  std::optional<long long> seed;
};

struct Episode {
  double fps = 1.0 / kFrameDt;
  std::vector<Pose> frames;
  std::vector<Interval> transitions;
  Task task = Task::Stir;
  EpisodeExtras extras;

  double dt() const { return 1.0 / fps; }
  std::size_t size() const { return frames.size(); }
  bool in_transition(int frame) const;

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;
};

struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

/// Position plus unit quaternion orientation.
struct RigidPose {
  Vec3 position = Vec3::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
};

struct Window {
  Context context;
  Trajectory future;
  bool is_transition = false;
  /// Index of the context's first frame in the source episode.
  std::size_t start = 0;
};

/// Windows at starts 0, stride, 2*stride, ... using k context and T future frames.
/// Throws std::length_error when the episode has fewer than k + T frames.
std::vector<Window> slide_windows(const Episode& episode, std::size_t k = kContextLength,
                                  std::size_t horizon = kHorizon, std::size_t stride = 1);

/// Mean per-joint Euclidean distance in meters.
double pose_distance(const Pose& a, const Pose& b);

/// Linear resampling to a new frame rate. Transition intervals are remapped by
/// time and rounded outward.
Episode resample(const Episode& episode, double target_fps);

}  // namespace hrc
