#include "adavu/poses.hpp"

#include <array>
#include <cmath>
#include <map>
#include <numbers>

#include <Eigen/Geometry>

#include "adavu/error.hpp"

namespace adavu {

namespace {

constexpr double kUpperArm = 0.28;
constexpr double kForearm = 0.25;
constexpr double kHand = 0.08;
constexpr double kThigh = 0.42;
constexpr double kShin = 0.40;

double rad(double deg) { return deg * std::numbers::pi / 180.0; }

// Unit limb direction from the rest direction (straight down) after
// abduction to the side `side` (+1 left, -1 right) and a turn towards -z.
Eigen::Vector3d limb_direction(double abduction, double forward, double side) {
  const double a = rad(abduction);
  const double f = rad(forward);
  return Eigen::Vector3d(side * std::sin(a) * std::cos(f), -std::cos(a) * std::cos(f), -std::sin(f)).normalized();
}

// Rotates `d` by `angle` towards `target`, within their common plane.
// `fallback` supplies the plane when `target` is parallel to `d`.
Eigen::Vector3d bend(const Eigen::Vector3d& d, double angle, const Eigen::Vector3d& target,
                     const Eigen::Vector3d& fallback) {
  Eigen::Vector3d perp = target - target.dot(d) * d;
  if (perp.norm() < 1e-6) perp = fallback - fallback.dot(d) * d;
  perp.normalize();
  const double a = rad(angle);
  return (std::cos(a) * d + std::sin(a) * perp).normalized();
}

using Row = std::array<double, 14>;

PoseParams from_row(const Row& r) {
  PoseParams p;
  p.arm_abduction[0] = r[0];
  p.arm_forward[0] = r[1];
  p.elbow_bend[0] = r[2];
  p.arm_abduction[1] = r[3];
  p.arm_forward[1] = r[4];
  p.elbow_bend[1] = r[5];
  p.leg_abduction[0] = r[6];
  p.leg_forward[0] = r[7];
  p.knee_bend[0] = r[8];
  p.leg_abduction[1] = r[9];
  p.leg_forward[1] = r[10];
  p.knee_bend[1] = r[11];
  p.twist = r[12];
  p.lean = r[13];
  return p;
}

// Left arm (abduction, forward, bend), right arm, left leg, right leg, twist, lean.
// C16/C17 and C19/C20 are mirror images; C13 and C15 differ only slightly.
const std::map<std::string, Row, std::less<>>& pose_table() {
  static const std::map<std::string, Row, std::less<>> table = {
      {"STANCE", {10, 0, 5, 10, 0, 5, 5, 0, 0, 5, 0, 0, 0, 0}},
      {"C01", {40, 0, 110, 40, 0, 110, 45, 0, 50, 45, 0, 50, 0, 0}},
      {"C02", {40, 0, 110, 90, 0, 0, 45, 0, 50, 65, 0, 5, 0, 0}},
      {"C03", {90, 0, 0, 40, 0, 110, 65, 0, 5, 45, 0, 50, 0, 0}},
      {"C04", {60, 60, 20, 60, 60, 20, 45, 0, 50, 45, 0, 50, 20, 0}},
      {"C05", {60, 60, 20, 60, 60, 20, 45, 0, 50, 45, 0, 50, -20, 0}},
      {"C06", {150, 0, 30, 40, 0, 110, 45, 0, 50, 45, 25, 30, 0, 10}},
      {"C07", {40, 0, 110, 150, 0, 30, 45, 25, 30, 45, 0, 50, 0, -10}},
      {"C08", {90, 0, 60, 90, 0, 60, 30, 40, 40, 45, 0, 50, 15, 0}},
      {"C09", {90, 0, 60, 90, 0, 60, 45, 0, 50, 30, 40, 40, -15, 0}},
      {"C10", {120, 20, 0, 20, 40, 90, 45, 0, 50, 65, 0, 5, 0, 0}},
      {"C11", {20, 40, 90, 120, 20, 0, 65, 0, 5, 45, 0, 50, 0, 0}},
      {"C12", {170, 0, 10, 170, 0, 10, 45, 0, 50, 45, 0, 50, 0, 0}},
      {"C13", {90, 70, 0, 30, 0, 120, 50, 30, 40, 45, 0, 50, 25, 5}},
      {"C14", {40, 0, 110, 40, 0, 110, 20, 0, 10, 20, 0, 10, 0, 0}},
      {"C15", {90, 85, 10, 30, 0, 120, 50, 30, 40, 45, 0, 50, 40, 5}},
      {"C16", {135, 0, 0, 45, 0, 0, 70, 0, 10, 40, 0, 60, 0, 15}},
      {"C17", {45, 0, 0, 135, 0, 0, 40, 0, 60, 70, 0, 10, 0, -15}},
      {"C18", {90, 90, 0, 90, 90, 0, 45, 0, 50, 45, 0, 50, 0, 0}},
      {"C19", {5, 120, 30, 60, 0, 90, 45, 60, 20, 45, 0, 50, 30, 0}},
      {"C20", {60, 0, 90, 5, 120, 30, 45, 0, 50, 45, 60, 20, -30, 0}},
      {"C21", {100, 30, 40, 100, 30, 40, 10, 80, 10, 45, 0, 50, 0, 0}},
      {"C22", {100, 30, 40, 100, 30, 40, 45, 0, 50, 10, 80, 10, 0, 0}},
      {"C23", {180, 0, 0, 90, 0, 0, 45, 0, 50, 45, 0, 50, 0, 20}},
      {"T01", {120, 45, 30, 70, 20, 60, 30, 30, 20, 50, 0, 40, 10, 0}},
      {"T02", {70, 20, 60, 120, 45, 30, 50, 0, 40, 30, 30, 20, -10, 0}},
      {"T03", {110, 60, 20, 110, 60, 20, 35, 20, 30, 35, 20, 30, 0, 5}},
      {"T04", {80, 10, 70, 80, 10, 70, 55, 10, 45, 55, 10, 45, 0, -5}},
  };
  return table;
}

}  // namespace

SkeletonFrame build_pose(const PoseParams& p, double depth) {
  SkeletonFrame f;
  const Eigen::Vector3d base(0.0, 0.0, depth);
  // Upper body turns and leans about the spine base; the pelvis follows half
  // of the twist.
  const Eigen::Matrix3d upper =
      (Eigen::AngleAxisd(rad(p.lean), Eigen::Vector3d::UnitZ()) * Eigen::AngleAxisd(rad(p.twist), Eigen::Vector3d::UnitY()))
          .toRotationMatrix();
  const Eigen::Matrix3d pelvis = Eigen::AngleAxisd(rad(0.5 * p.twist), Eigen::Vector3d::UnitY()).toRotationMatrix();
  auto up = [&](double x, double y, double z) { return Eigen::Vector3d(base + upper * Eigen::Vector3d(x, y, z)); };

  f[Joint::spine_base] = base;
  f[Joint::spine_mid] = up(0.0, 0.25, 0.0);
  f[Joint::spine_shoulder] = up(0.0, 0.50, 0.0);
  f[Joint::head] = up(0.0, 0.70, 0.0);
  f[Joint::shoulder_left] = up(0.18, 0.48, 0.0);
  f[Joint::shoulder_right] = up(-0.18, 0.48, 0.0);
  f[Joint::hip_left] = base + pelvis * Eigen::Vector3d(0.10, -0.05, 0.0);
  f[Joint::hip_right] = base + pelvis * Eigen::Vector3d(-0.10, -0.05, 0.0);

  const Eigen::Vector3d y_up = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d toward = -Eigen::Vector3d::UnitZ();
  const Joint shoulders[2] = {Joint::shoulder_left, Joint::shoulder_right};
  const Joint elbows[2] = {Joint::elbow_left, Joint::elbow_right};
  const Joint wrists[2] = {Joint::wrist_left, Joint::wrist_right};
  const Joint hands[2] = {Joint::hand_left, Joint::hand_right};
  const Joint hips[2] = {Joint::hip_left, Joint::hip_right};
  const Joint knees[2] = {Joint::knee_left, Joint::knee_right};
  const Joint ankles[2] = {Joint::ankle_left, Joint::ankle_right};
  const Joint feet[2] = {Joint::foot_left, Joint::foot_right};
  for (int s = 0; s < 2; ++s) {
    const double side = s == 0 ? 1.0 : -1.0;
    const Eigen::Vector3d arm = upper * limb_direction(p.arm_abduction[s], p.arm_forward[s], side);
    const Eigen::Vector3d fore = bend(arm, p.elbow_bend[s], y_up, toward);
    f[elbows[s]] = f[shoulders[s]] + kUpperArm * arm;
    f[wrists[s]] = f[elbows[s]] + kForearm * fore;
    f[hands[s]] = f[wrists[s]] + kHand * fore;

    const Eigen::Vector3d thigh = pelvis * limb_direction(p.leg_abduction[s], p.leg_forward[s], side);
    const Eigen::Vector3d shin = bend(thigh, p.knee_bend[s], -y_up, Eigen::Vector3d::UnitZ());
    f[knees[s]] = f[hips[s]] + kThigh * thigh;
    f[ankles[s]] = f[knees[s]] + kShin * shin;
    f[feet[s]] = f[ankles[s]] + Eigen::Vector3d(0.0, -0.05, -0.08);
  }
  return f;
}

const std::vector<std::string>& canonical_pose_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& [id, row] : pose_table()) v.push_back(id);
    return v;
  }();
  return ids;
}

SkeletonFrame canonical_pose(std::string_view id) {
  const auto& table = pose_table();
  const auto it = table.find(id);
  if (it == table.end()) throw DomainError("no canonical pose for posture `" + std::string(id) + "`");
  return build_pose(from_row(it->second));
}

}  // namespace adavu
