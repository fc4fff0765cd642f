#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adavu/event_model.hpp"
#include "adavu/image.hpp"

namespace adavu {

struct MotionConfig {
  // A pixel moves when |target - reference| > th_pix.
  int th_pix = 50;
  // A frame moves when more than th_frm pixels move.
  std::int64_t th_frm = 100;
  // Relabel transition runs of at most min_gap frames that sit between two
  // no-motion runs. Off by default.
  bool merge_gaps = false;
  std::int64_t min_gap = 3;

  // Throws DomainError when a field is out of range.
  void validate() const;
};

std::int64_t motion_pixel_count(const GrayFrame& reference, const GrayFrame& target, int th_pix);

inline bool is_motion_frame(std::int64_t count, std::int64_t th_frm) { return count > th_frm; }

// One flag per frame, true = motion. Frame i compares against frame i-1;
// frame 0 copies the flag of frame 1. Requires at least two frames.
std::vector<bool> motion_flags(std::span<const GrayFrame> frames, const MotionConfig& cfg);

// Applies the optional gap merge of `cfg` to a flag sequence.
std::vector<bool> smooth_flags(std::vector<bool> flags, const MotionConfig& cfg);

// Run-length encodes flags into alternating events tiling [0, flags.size()).
std::vector<VideoEvent> video_events_from_flags(const std::vector<bool>& flags);

std::vector<VideoEvent> detect_video_events(std::span<const GrayFrame> frames, const MotionConfig& cfg);

// Every no-motion range overlapping a full or half beat becomes a sync event
// carrying that range. A full-beat overlap takes precedence for the kind.
std::vector<SyncEvent> extract_kframes(std::span<const AudioEvent> audio, std::span<const VideoEvent> video);

// Midpoint floor((start + end) / 2).
FrameIndex representative_frame(const FrameRange& range);

struct SegmentationReport {
  std::vector<SyncEvent> kframes;
  // Per-kframe flag: overlaps at least one annotation.
  std::vector<bool> kframe_matched;
  // K-frame ranges overlapping an annotation.
  std::int64_t matched = 0;
  // max(#kframes, #annotations), so spurious and missed detections both count.
  std::int64_t total = 0;
  double accuracy = 1.0;

  std::int64_t kframe_count = 0;
  std::int64_t annotation_count = 0;
  // Annotations overlapped by at least one K-frame range.
  std::int64_t annotations_matched = 0;
  // Annotated frames covered by some K-frame range, out of all annotated frames.
  std::int64_t frames_matched = 0;
  std::int64_t frames_total = 0;
  // Number of performances summarised (1 for a single validation).
  std::int64_t performances = 1;
  // Performances whose ranges all matched one to one.
  std::int64_t performances_perfect = 0;
};

SegmentationReport validate_kframes(std::span<const SyncEvent> kframes,
                                    std::span<const AnnotationRecord> annotations);

// Sums the counts of several reports; accuracy is recomputed from the sums.
// The K-frame lists are not concatenated.
SegmentationReport combine_reports(std::span<const SegmentationReport> reports);

// K-frame list: `id,kind,start_frame,end_frame,representative_frame,matched`.
void write_kframes_csv(const std::string& path, const SegmentationReport& report);
std::vector<SyncEvent> read_kframes_csv(const std::string& path);
// Counts as `metric,value` rows.
void write_segmentation_report_csv(const std::string& path, const SegmentationReport& report);
std::string format_segmentation_summary(const SegmentationReport& report);

}  // namespace adavu
