#pragma once

#include "hrc/motion.hpp"

#include <array>
#include <span>
#include <vector>

namespace hrc {

inline constexpr std::size_t kArmDof = 7;
inline constexpr double kHumanCapsuleRadius = 0.05;

using JointVector = Eigen::Matrix<double, 7, 1>;
using Jacobian = Eigen::Matrix<double, 6, 7>;

/// Modified (Craig) DH row: RotX(alpha) * TransX(a) * RotZ(q) * TransZ(d).
struct DhRow {
  double a = 0.0;
  double d = 0.0;
  double alpha = 0.0;
};

struct JointLimit {
  double lo = 0.0;
  double hi = 0.0;
  double mid() const { return 0.5 * (lo + hi); }
  double half_range() const { return 0.5 * (hi - lo); }
};

struct LinkSphere {
  /// Link-frame index, 0 = base frame, 7 = last joint frame.
  std::size_t link = 0;
  Vec3 offset = Vec3::Zero();
  double radius = 0.0;
};

struct ArmModel {
  std::array<DhRow, kArmDof> dh{};
  double flange_offset = 0.0;
  std::array<JointLimit, kArmDof> joint_limits{};
  JointVector vel_limits = JointVector::Zero();
  std::vector<LinkSphere> collision_spheres;
  /// World placement of the base frame.
  RigidPose base;

  /// Franka-class defaults, two spheres of 6 cm per link.
  static ArmModel franka_like();

  /// Rebuilds collision_spheres at 1/3 and 2/3 of every link segment.
  void place_link_spheres(double radius);
  void validate() const;
};

struct ArmState {
  JointVector q = JointVector::Zero();
  JointVector qd = JointVector::Zero();
};

/// Joint-space plan: the start state plus H successor states.
struct RobotPlan {
  ArmState start;
  std::vector<ArmState> states;
  double dt = kFrameDt;

  std::size_t horizon() const { return states.size(); }
};

struct FkResult {
  RigidPose ee;
  /// Base frame followed by the seven joint frames.
  std::array<RigidPose, 8> link_frames;
};

FkResult fk(const ArmModel& model, const JointVector& q);

/// Frames as isometries, plus world-space collision sphere centers.
struct ArmKinematics {
  std::array<Eigen::Isometry3d, 8> frames;
  Eigen::Isometry3d ee;
  std::vector<Sphere> spheres;
};

ArmKinematics arm_kinematics(const ArmModel& model, const JointVector& q);

/// Geometric Jacobian at the end effector; rows 0-2 linear, 3-5 angular.
Jacobian jacobian(const ArmModel& model, const JointVector& q);
Jacobian jacobian(const ArmKinematics& kin);

/// sqrt(det(Jv Jv^T)) of the linear block.
double manipulability(const ArmModel& model, const JointVector& q);
double manipulability(const ArmKinematics& kin);

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b);

/// The four arm capsules of the human: shoulder-elbow and elbow-wrist per side.
std::array<std::pair<Vec3, Vec3>, 4> human_arm_segments(const Pose& human);

/// Signed clearance between robot spheres and human capsules (or safety-volume
/// spheres when supplied); negative values are penetration depth.
double min_separation(const ArmModel& model, const JointVector& q, const Pose& human,
                      std::span<const Sphere> volume = {},
                      double human_radius = kHumanCapsuleRadius);
double min_separation(std::span<const Sphere> robot, const Pose& human,
                      double human_radius = kHumanCapsuleRadius);
double min_separation(std::span<const Sphere> robot, std::span<const Sphere> volume);

/// Velocity-clamped, limit-clamped kinematic integration.
ArmState step(const ArmModel& model, const ArmState& state, const JointVector& qd_cmd, double dt);

/// Sum of link segment lengths, including the flange.
double total_link_length(const ArmModel& model);

}  // namespace hrc
