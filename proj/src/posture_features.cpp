#include "adavu/posture_features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>
#include <fmt/format.h>

#include "adavu/error.hpp"
#include "adavu/motion_segmentation.hpp"

namespace adavu {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kHogEpsilon = 1e-6;

const BoneSet kDefaultBones = {{
    {Joint::spine_shoulder, Joint::shoulder_left},
    {Joint::spine_shoulder, Joint::shoulder_right},
    {Joint::shoulder_left, Joint::elbow_left},
    {Joint::shoulder_right, Joint::elbow_right},
    {Joint::spine_base, Joint::hip_left},
    {Joint::spine_base, Joint::hip_right},
    {Joint::hip_left, Joint::knee_left},
    {Joint::hip_right, Joint::knee_right},
}};

int blocks_along(int pixels, const HogParams& p) {
  const int cells = pixels / p.cell_size;
  if (cells < p.block_size) {
    throw DomainError(fmt::format("{} pixels hold {} cells of {} px, fewer than the block size {}", pixels,
                                  cells, p.cell_size, p.block_size));
  }
  return (cells - p.block_size) / (p.block_size - p.block_overlap) + 1;
}

}  // namespace

const BoneSet& default_bones() { return kDefaultBones; }

std::string bone_name(const Bone& bone) {
  return std::string(joint_name(bone.parent)) + "-" + std::string(joint_name(bone.child));
}

AngleFeature bone_angles(std::span<const SkeletonFrame> frames, const BoneSet& bones) {
  if (frames.empty()) throw DomainError("bone angles need at least one skeleton frame");
  if (frames.size() > kMaxAveragedFrames) {
    throw DomainError(fmt::format("bone angles average at most {} frames, got {}", kMaxAveragedFrames, frames.size()));
  }
  SkeletonFrame mean;
  for (const auto& f : frames) {
    if (!f.finite()) throw DomainError("skeleton frame has non-finite joint coordinates");
    for (std::size_t j = 0; j < kJointCount; ++j) mean.joints[j] += f.joints[j];
  }
  for (auto& j : mean.joints) j /= static_cast<double>(frames.size());

  AngleFeature out;
  for (std::size_t b = 0; b < bones.size(); ++b) {
    const Eigen::Vector3d v = mean[bones[b].child] - mean[bones[b].parent];
    const double norm = v.norm();
    if (!(norm > 1e-12)) throw DomainError("zero-length bone " + bone_name(bones[b]));
    // arccos(v_axis / |v|), evaluated as atan2(|v x axis|, v . axis) for accuracy near 0 and 180.
    for (int axis = 0; axis < 3; ++axis) {
      const double along = v[axis];
      const double across = std::hypot(v[(axis + 1) % 3], v[(axis + 2) % 3]);
      out.values[b * 3 + static_cast<std::size_t>(axis)] = std::atan2(across, along) * kRadToDeg;
    }
  }
  return out;
}

std::vector<std::string> angle_feature_names(const BoneSet& bones) {
  std::vector<std::string> names;
  for (const auto& b : bones) {
    for (const char* axis : {"x", "y", "z"}) names.push_back(bone_name(b) + "." + axis);
  }
  return names;
}

std::span<const SkeletonFrame> kframe_window(std::span<const SkeletonFrame> stream, const FrameRange& range) {
  const auto n = static_cast<FrameIndex>(stream.size());
  const FrameIndex lo_bound = range.start;
  const FrameIndex hi_bound = std::min(range.end, n - 1);
  if (lo_bound > hi_bound) throw DomainError("K-frame range lies outside the skeleton stream");
  const auto half = static_cast<FrameIndex>(kMaxAveragedFrames / 2);
  FrameIndex lo = std::max(lo_bound, representative_frame(range) - half);
  FrameIndex hi = std::min(hi_bound, lo + static_cast<FrameIndex>(kMaxAveragedFrames) - 1);
  lo = std::max(lo_bound, hi - static_cast<FrameIndex>(kMaxAveragedFrames) + 1);
  return stream.subspan(static_cast<std::size_t>(lo), static_cast<std::size_t>(hi - lo + 1));
}

void HogParams::validate() const {
  if (cell_size <= 0 || block_size <= 0 || num_bins <= 0 || image_height <= 0 || image_width <= 0) {
    throw DomainError("HOG parameters must be positive");
  }
  if (block_overlap < 0 || block_overlap >= block_size) {
    throw DomainError("HOG block overlap must lie in [0, block_size)");
  }
}

std::size_t hog_length(const HogParams& p) {
  p.validate();
  const auto by = static_cast<std::size_t>(blocks_along(p.image_height, p));
  const auto bx = static_cast<std::size_t>(blocks_along(p.image_width, p));
  const auto bs = static_cast<std::size_t>(p.block_size);
  return by * bx * bs * bs * static_cast<std::size_t>(p.num_bins);
}

std::vector<double> hog_descriptor(const GrayFrame& image, const HogParams& p) {
  const std::size_t length = hog_length(p);
  if (image.width() != p.image_width || image.height() != p.image_height) {
    throw DomainError(fmt::format("HOG expects a {}x{} image, got {}x{}", p.image_width, p.image_height,
                                  image.width(), image.height()));
  }
  const int cells_x = p.image_width / p.cell_size;
  const int cells_y = p.image_height / p.cell_size;
  const int bins = p.num_bins;
  const double bin_width = 180.0 / bins;
  std::vector<double> hist(static_cast<std::size_t>(cells_x) * cells_y * bins, 0.0);

  const int w = image.width();
  const int h = image.height();
  for (int y = 0; y < cells_y * p.cell_size; ++y) {
    for (int x = 0; x < cells_x * p.cell_size; ++x) {
      const double gx = static_cast<double>(image.at(std::min(x + 1, w - 1), y)) - image.at(std::max(x - 1, 0), y);
      const double gy = static_cast<double>(image.at(x, std::min(y + 1, h - 1))) - image.at(x, std::max(y - 1, 0));
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      double angle = std::atan2(gy, gx) * kRadToDeg;
      if (angle < 0.0) angle += 180.0;
      if (angle >= 180.0) angle -= 180.0;
      const double pos = angle / bin_width;
      const int lo = static_cast<int>(std::floor(pos)) % bins;
      const int hi = (lo + 1) % bins;
      const double frac = pos - std::floor(pos);
      const auto cell = (static_cast<std::size_t>(y / p.cell_size) * cells_x + static_cast<std::size_t>(x / p.cell_size)) * bins;
      hist[cell + static_cast<std::size_t>(lo)] += mag * (1.0 - frac);
      hist[cell + static_cast<std::size_t>(hi)] += mag * frac;
    }
  }

  const int stride = p.block_size - p.block_overlap;
  const int blocks_y = blocks_along(p.image_height, p);
  const int blocks_x = blocks_along(p.image_width, p);
  const auto block_len = static_cast<std::size_t>(p.block_size) * p.block_size * bins;
  std::vector<double> out;
  out.reserve(length);
  for (int by = 0; by < blocks_y; ++by) {
    for (int bx = 0; bx < blocks_x; ++bx) {
      const auto begin = out.size();
      for (int cy = 0; cy < p.block_size; ++cy) {
        for (int cx = 0; cx < p.block_size; ++cx) {
          const auto cell = (static_cast<std::size_t>(by * stride + cy) * cells_x + static_cast<std::size_t>(bx * stride + cx)) * bins;
          out.insert(out.end(), hist.begin() + static_cast<std::ptrdiff_t>(cell),
                     hist.begin() + static_cast<std::ptrdiff_t>(cell + static_cast<std::size_t>(bins)));
        }
      }
      double sq = 0.0;
      for (auto i = begin; i < begin + block_len; ++i) sq += out[i] * out[i];
      const double scale = 1.0 / std::sqrt(sq + kHogEpsilon * kHogEpsilon);
      for (auto i = begin; i < begin + block_len; ++i) out[i] *= scale;
    }
  }
  return out;
}

std::vector<std::string> hog_feature_names(const HogParams& p) {
  const auto n = hog_length(p);
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) names.push_back(fmt::format("hog_{}", i));
  return names;
}

GrayFrame apply_player_mask(const ColorFrame& rgb, const PlayerMask& mask, int width, int height) {
  if (mask.width <= 0 || mask.height <= 0 ||
      mask.values.size() != static_cast<std::size_t>(mask.width) * mask.height) {
    throw DomainError("player mask dimensions do not match its value buffer");
  }
  for (const auto v : mask.values) {
    if (v > 1) throw DomainError("player mask values must be 0 or 1");
  }
  const Eigen::Matrix2d linear = mask.affine.leftCols<2>();
  const double det = linear.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-12) throw DomainError("player mask affine is not invertible");
  const Eigen::Matrix2d inv = linear.inverse();
  const Eigen::Vector2d offset = mask.affine.col(2);

  GrayFrame gray(rgb.width(), rgb.height());
  for (int y = 0; y < rgb.height(); ++y) {
    for (int x = 0; x < rgb.width(); ++x) {
      const Eigen::Vector2d src = inv * (Eigen::Vector2d(x, y) - offset);
      const long mx = std::lround(src.x());
      const long my = std::lround(src.y());
      if (mx < 0 || my < 0 || mx >= mask.width || my >= mask.height) continue;
      if (mask.values[static_cast<std::size_t>(my) * mask.width + static_cast<std::size_t>(mx)] == 0) continue;
      const auto px = rgb.at(x, y);
      gray.at(x, y) = luminance(px[0], px[1], px[2]);
    }
  }
  return resize_bilinear(gray, width, height);
}

}  // namespace adavu
