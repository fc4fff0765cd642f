#include "adavu/skeleton.hpp"

#include <cmath>

#include <fmt/format.h>

#include "adavu/csv.hpp"
#include "adavu/error.hpp"

namespace adavu {

namespace {

constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "SPINE_BASE",     "SPINE_MID",   "SPINE_SHOULDER", "HEAD",        "SHOULDER_LEFT",
    "ELBOW_LEFT",     "WRIST_LEFT",  "HAND_LEFT",      "SHOULDER_RIGHT", "ELBOW_RIGHT",
    "WRIST_RIGHT",    "HAND_RIGHT",  "HIP_LEFT",       "KNEE_LEFT",   "ANKLE_LEFT",
    "FOOT_LEFT",      "HIP_RIGHT",   "KNEE_RIGHT",     "ANKLE_RIGHT", "FOOT_RIGHT",
};

constexpr std::array<std::pair<Joint, Joint>, 19> kSegments = {{
    {Joint::spine_base, Joint::spine_mid},
    {Joint::spine_mid, Joint::spine_shoulder},
    {Joint::spine_shoulder, Joint::head},
    {Joint::spine_shoulder, Joint::shoulder_left},
    {Joint::shoulder_left, Joint::elbow_left},
    {Joint::elbow_left, Joint::wrist_left},
    {Joint::wrist_left, Joint::hand_left},
    {Joint::spine_shoulder, Joint::shoulder_right},
    {Joint::shoulder_right, Joint::elbow_right},
    {Joint::elbow_right, Joint::wrist_right},
    {Joint::wrist_right, Joint::hand_right},
    {Joint::spine_base, Joint::hip_left},
    {Joint::hip_left, Joint::knee_left},
    {Joint::knee_left, Joint::ankle_left},
    {Joint::ankle_left, Joint::foot_left},
    {Joint::spine_base, Joint::hip_right},
    {Joint::hip_right, Joint::knee_right},
    {Joint::knee_right, Joint::ankle_right},
    {Joint::ankle_right, Joint::foot_right},
}};

}  // namespace

std::string_view joint_name(Joint joint) { return kJointNames[static_cast<std::size_t>(joint)]; }

std::optional<Joint> parse_joint(std::string_view name) {
  for (std::size_t i = 0; i < kJointCount; ++i) {
    if (kJointNames[i] == name) return static_cast<Joint>(i);
  }
  return std::nullopt;
}

bool SkeletonFrame::finite() const {
  for (const auto& j : joints) {
    if (!j.allFinite()) return false;
  }
  return true;
}

std::span<const std::pair<Joint, Joint>> body_segments() { return kSegments; }

void write_skeleton_stream(const std::string& path, std::span<const SkeletonFrame> frames) {
  auto out = csv::open_for_write(path);
  out << "frame_index,joint_name,x,y,z\n";
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (std::size_t j = 0; j < kJointCount; ++j) {
      const auto& p = frames[f].joints[j];
      // Avoid "-0.000000" so equal streams print identically.
      auto fix = [](double v) { return std::abs(v) < 5e-7 ? 0.0 : v; };
      out << fmt::format("{},{},{:.6f},{:.6f},{:.6f}\n", f, kJointNames[j], fix(p.x()), fix(p.y()), fix(p.z()));
    }
  }
  if (!out) throw IoError("write failed for " + path);
}

std::vector<SkeletonFrame> read_skeleton_stream(const std::string& path) {
  csv::Reader reader(path);
  reader.expect_header({"frame_index", "joint_name", "x", "y", "z"});
  std::vector<SkeletonFrame> frames;
  std::vector<std::array<bool, kJointCount>> seen;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != 5) reader.fail("expected 5 fields, got " + std::to_string(f.size()));
    const auto index = reader.to_int(f[0], "frame_index");
    if (index < 0) reader.fail("negative frame_index");
    const auto joint = parse_joint(f[1]);
    if (!joint) reader.fail("unknown joint `" + f[1] + "`");
    const auto u = static_cast<std::size_t>(index);
    // Frames appear in order without gaps.
    if (u == frames.size()) {
      frames.emplace_back();
      seen.emplace_back().fill(false);
    } else if (u + 1 != frames.size()) {
      reader.fail("frame_index " + f[0] + " out of sequence");
    }
    const auto j = static_cast<std::size_t>(*joint);
    if (seen[u][j]) reader.fail("duplicate joint " + f[1] + " in frame " + f[0]);
    seen[u][j] = true;
    frames[u].joints[j] = {reader.to_double(f[2], "x"), reader.to_double(f[3], "y"), reader.to_double(f[4], "z")};
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    for (std::size_t j = 0; j < kJointCount; ++j) {
      if (!seen[i][j]) {
        throw ParseError(path, reader.line(), fmt::format("frame {} lacks joint {}", i, kJointNames[j]));
      }
    }
  }
  return frames;
}

}  // namespace adavu
