#include "hrc/robot.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hrc {

namespace {

Eigen::Isometry3d dh_transform(const DhRow& row, double q) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.rotate(Eigen::AngleAxisd(row.alpha, Vec3::UnitX()));
  t.translate(Vec3(row.a, 0.0, 0.0));
  t.rotate(Eigen::AngleAxisd(q, Vec3::UnitZ()));
  t.translate(Vec3(0.0, 0.0, row.d));
  return t;
}

// Origin of the next frame expressed in the current one; independent of q.
Vec3 link_vector(const ArmModel& model, std::size_t link) {
  if (link == kArmDof) return Vec3(0.0, 0.0, model.flange_offset);
  const DhRow& row = model.dh[link];
  return Vec3(row.a, 0.0, 0.0) + Eigen::AngleAxisd(row.alpha, Vec3::UnitX()) * Vec3(0.0, 0.0, row.d);
}

Eigen::Isometry3d base_isometry(const RigidPose& base) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.translate(base.position);
  t.rotate(base.orientation);
  return t;
}

RigidPose to_rigid(const Eigen::Isometry3d& t) {
  RigidPose p;
  p.position = t.translation();
  p.orientation = Eigen::Quaterniond(t.rotation()).normalized();
  return p;
}

}  // namespace

ArmModel ArmModel::franka_like() {
  constexpr double pi = std::numbers::pi;
  ArmModel m;
  const std::array<double, 7> d{0.333, 0.0, 0.316, 0.0, 0.384, 0.0, 0.0};
  const std::array<double, 7> a{0.0, 0.0, 0.0, 0.0825, -0.0825, 0.0, 0.088};
  const std::array<double, 7> alpha{0.0, -pi / 2, pi / 2, pi / 2, -pi / 2, pi / 2, pi / 2};
  for (std::size_t i = 0; i < kArmDof; ++i) {
    m.dh[i] = {a[i], d[i], alpha[i]};
    const double lim = (i % 2 == 0) ? 2.7 : 1.7;
    m.joint_limits[i] = {-lim, lim};
  }
  m.flange_offset = 0.107;
  m.vel_limits.setConstant(2.0);
  m.base.position = Vec3(0.55, 0.65, 0.65);
  m.place_link_spheres(0.06);
  return m;
}

void ArmModel::place_link_spheres(double radius) {
  collision_spheres.clear();
  for (std::size_t link = 0; link <= kArmDof; ++link) {
    const Vec3 v = link_vector(*this, link);
    collision_spheres.push_back({link, v / 3.0, radius});
    collision_spheres.push_back({link, 2.0 * v / 3.0, radius});
  }
}

void ArmModel::validate() const {
  for (const auto& lim : joint_limits)
    if (!(lim.lo < lim.hi)) throw std::invalid_argument("joint limit lo must be < hi");
  for (const auto& s : collision_spheres) {
    if (!(s.radius > 0.0)) throw std::invalid_argument("collision sphere radius must be > 0");
    if (s.link > kArmDof) throw std::invalid_argument("collision sphere link index out of range");
  }
  if (!(vel_limits.array() > 0.0).all()) throw std::invalid_argument("velocity limits must be > 0");
  if (std::abs(base.orientation.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("base orientation must be a unit quaternion");
}

ArmKinematics arm_kinematics(const ArmModel& model, const JointVector& q) {
  ArmKinematics kin;
  kin.frames[0] = base_isometry(model.base);
  for (std::size_t i = 0; i < kArmDof; ++i) kin.frames[i + 1] = kin.frames[i] * dh_transform(model.dh[i], q[i]);
  kin.ee = kin.frames[kArmDof] * Eigen::Translation3d(0.0, 0.0, model.flange_offset);
  kin.spheres.reserve(model.collision_spheres.size());
  for (const auto& s : model.collision_spheres) kin.spheres.push_back({kin.frames[s.link] * s.offset, s.radius});
  return kin;
}

FkResult fk(const ArmModel& model, const JointVector& q) {
  const ArmKinematics kin = arm_kinematics(model, q);
  FkResult out;
  out.ee = to_rigid(kin.ee);
  for (std::size_t i = 0; i < kin.frames.size(); ++i) out.link_frames[i] = to_rigid(kin.frames[i]);
  return out;
}

Jacobian jacobian(const ArmKinematics& kin) {
  Jacobian j;
  const Vec3 p = kin.ee.translation();
  for (std::size_t i = 0; i < kArmDof; ++i) {
    const auto& frame = kin.frames[i + 1];
    const Vec3 z = frame.linear().col(2);
    j.block<3, 1>(0, static_cast<Eigen::Index>(i)) = z.cross(p - frame.translation());
    j.block<3, 1>(3, static_cast<Eigen::Index>(i)) = z;
  }
  return j;
}

Jacobian jacobian(const ArmModel& model, const JointVector& q) {
  return jacobian(arm_kinematics(model, q));
}

double manipulability(const ArmKinematics& kin) {
  const Eigen::Matrix<double, 3, 7> jv = jacobian(kin).topRows<3>();
  const double det = (jv * jv.transpose()).determinant();
  return std::sqrt(std::max(0.0, det));
}

double manipulability(const ArmModel& model, const JointVector& q) {
  return manipulability(arm_kinematics(model, q));
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

std::array<std::pair<Vec3, Vec3>, 4> human_arm_segments(const Pose& human) {
  return {{{human[kLeftShoulder], human[kLeftElbow]},
           {human[kLeftElbow], human[kLeftWrist]},
           {human[kRightShoulder], human[kRightElbow]},
           {human[kRightElbow], human[kRightWrist]}}};
}

double min_separation(std::span<const Sphere> robot, const Pose& human, double human_radius) {
  const auto segments = human_arm_segments(human);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : robot) {
    for (const auto& [a, b] : segments) {
      best = std::min(best, point_segment_distance(s.center, a, b) - s.radius - human_radius);
    }
  }
  return best;
}

double min_separation(std::span<const Sphere> robot, std::span<const Sphere> volume) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : robot)
    for (const auto& v : volume) best = std::min(best, (s.center - v.center).norm() - s.radius - v.radius);
  return best;
}

double min_separation(const ArmModel& model, const JointVector& q, const Pose& human,
                      std::span<const Sphere> volume, double human_radius) {
  const ArmKinematics kin = arm_kinematics(model, q);
  if (!volume.empty()) return min_separation(kin.spheres, volume);
  return min_separation(kin.spheres, human, human_radius);
}

ArmState step(const ArmModel& model, const ArmState& state, const JointVector& qd_cmd, double dt) {
  ArmState next;
  for (std::size_t i = 0; i < kArmDof; ++i) {
    const double vmax = model.vel_limits[i];
    double qd = std::clamp(qd_cmd[i], -vmax, vmax);
    double q = state.q[i] + qd * dt;
    const auto& lim = model.joint_limits[i];
    if (q < lim.lo || q > lim.hi) {
      q = std::clamp(q, lim.lo, lim.hi);
      qd = 0.0;
    }
    next.q[i] = q;
    next.qd[i] = qd;
  }
  return next;
}

double total_link_length(const ArmModel& model) {
  double sum = 0.0;
  for (std::size_t link = 0; link <= kArmDof; ++link) sum += link_vector(model, link).norm();
  return sum;
}

}  // namespace hrc
