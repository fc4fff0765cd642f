#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace adavu {

// The 20-joint Kinect body model.
enum class Joint : std::size_t {
  spine_base,
  spine_mid,
  spine_shoulder,
  head,
  shoulder_left,
  elbow_left,
  wrist_left,
  hand_left,
  shoulder_right,
  elbow_right,
  wrist_right,
  hand_right,
  hip_left,
  knee_left,
  ankle_left,
  foot_left,
  hip_right,
  knee_right,
  ankle_right,
  foot_right,
};

inline constexpr std::size_t kJointCount = 20;

// Upper-case name as written in skeleton streams, e.g. "SPINE_SHOULDER".
std::string_view joint_name(Joint joint);
std::optional<Joint> parse_joint(std::string_view name);

// Joint positions in meters, indexed by Joint.
struct SkeletonFrame {
  std::array<Eigen::Vector3d, kJointCount> joints;

  SkeletonFrame() { joints.fill(Eigen::Vector3d::Zero()); }

  const Eigen::Vector3d& operator[](Joint j) const { return joints[static_cast<std::size_t>(j)]; }
  Eigen::Vector3d& operator[](Joint j) { return joints[static_cast<std::size_t>(j)]; }

  bool finite() const;
};

// Parent-child pairs drawn when rendering a figure (19 segments).
std::span<const std::pair<Joint, Joint>> body_segments();

// Record format `frame_index,joint_name,x,y,z` with a header row; coordinates
// use 6 decimal places. Every frame must list all 20 joints.
void write_skeleton_stream(const std::string& path, std::span<const SkeletonFrame> frames);
std::vector<SkeletonFrame> read_skeleton_stream(const std::string& path);

}  // namespace adavu
