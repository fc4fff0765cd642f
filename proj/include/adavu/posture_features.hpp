#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "adavu/event_model.hpp"
#include "adavu/image.hpp"
#include "adavu/skeleton.hpp"

namespace adavu {

struct Bone {
  Joint parent;
  Joint child;
};

using BoneSet = std::array<Bone, 8>;

// Shoulder line, upper arms, hip line and thighs, left before right.
const BoneSet& default_bones();
std::string bone_name(const Bone& bone);

inline constexpr std::size_t kAngleFeatureDim = 24;
inline constexpr std::size_t kMaxAveragedFrames = 5;

// Angles in degrees between each bone and the X, Y and Z axes, bone-major.
struct AngleFeature {
  std::array<double, kAngleFeatureDim> values{};

  Eigen::VectorXd to_vector() const { return Eigen::Map<const Eigen::VectorXd>(values.data(), kAngleFeatureDim); }
};

// Averages the joints of 1 to 5 frames, then measures every bone against the
// coordinate axes. Throws DomainError for an empty or oversized window,
// non-finite coordinates, or a zero-length bone (named in the message).
AngleFeature bone_angles(std::span<const SkeletonFrame> frames, const BoneSet& bones = default_bones());

// Column names such as `SPINE_SHOULDER-SHOULDER_LEFT.x`.
std::vector<std::string> angle_feature_names(const BoneSet& bones = default_bones());

// Up to five consecutive frames centred on the representative frame of
// `range`, clipped to the range and to the stream.
std::span<const SkeletonFrame> kframe_window(std::span<const SkeletonFrame> stream, const FrameRange& range);

struct HogParams {
  int cell_size = 8;
  int block_size = 2;
  int block_overlap = 1;
  int num_bins = 9;
  int image_height = 120;
  int image_width = 160;

  void validate() const;
};

// Blocks per dimension are floor((cells - block) / (block - overlap)) + 1.
// Throws DomainError when an image holds fewer cells than a block needs.
std::size_t hog_length(const HogParams& params);

// Central-difference gradients, unsigned orientation over [0, 180) with linear
// interpolation between adjacent bins (bin b centred at b * 180 / bins),
// L2-normalised blocks (v / sqrt(|v|^2 + 1e-12)) concatenated block row by
// block row, cells row-major inside a block.
std::vector<double> hog_descriptor(const GrayFrame& image, const HogParams& params = {});

std::vector<std::string> hog_feature_names(const HogParams& params = {});

// Binary player mask in depth-image space and the 2x3 affine taking depth
// pixel coordinates to RGB pixel coordinates.
struct PlayerMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;  // row-major, each 0 or 1
  Eigen::Matrix<double, 2, 3> affine = Eigen::Matrix<double, 2, 3>::Identity();
};

// Warps the mask into RGB space (nearest neighbour), zeroes the background,
// converts to grayscale and resizes to width x height. Throws DomainError for
// a singular affine or a malformed mask.
GrayFrame apply_player_mask(const ColorFrame& rgb, const PlayerMask& mask, int width = 160, int height = 120);

}  // namespace adavu
