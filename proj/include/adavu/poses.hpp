#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "adavu/skeleton.hpp"

namespace adavu {

// Joint-angle description of a figure, all angles in degrees. Arm abduction
// is measured in the frontal plane from hanging down, the forward angle turns
// the limb towards the camera (-z), the bend folds the distal segment.
struct PoseParams {
  double arm_abduction[2] = {10.0, 10.0};  // left, right
  double arm_forward[2] = {0.0, 0.0};
  double elbow_bend[2] = {0.0, 0.0};
  double leg_abduction[2] = {5.0, 5.0};
  double leg_forward[2] = {0.0, 0.0};
  double knee_bend[2] = {0.0, 0.0};
  // Upper body rotation about the vertical axis and sideways lean.
  double twist = 0.0;
  double lean = 0.0;
};

// Builds the 20 joints of a figure standing at depth `depth` meters.
SkeletonFrame build_pose(const PoseParams& params, double depth = 2.5);

// Ids with a canonical pose: STANCE, C01..C23 and the trajectory postures
// T01..T04.
const std::vector<std::string>& canonical_pose_ids();
// Throws DomainError for an unknown id.
SkeletonFrame canonical_pose(std::string_view id);

}  // namespace adavu
