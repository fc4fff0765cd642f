#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace adavu {

using FrameIndex = std::int64_t;

inline constexpr double kDefaultFps = 30.0;
inline constexpr FrameIndex kDefaultBeatHalfWindow = 10;

// Inclusive interval [start, end] of video frame indices.
struct FrameRange {
  FrameIndex start = 0;
  FrameIndex end = 0;

  FrameRange() = default;
  // Throws DomainError unless 0 <= start <= end.
  FrameRange(FrameIndex s, FrameIndex e);

  FrameIndex length() const { return end - start + 1; }
  bool contains(FrameIndex f) const { return f >= start && f <= end; }

  friend bool operator==(const FrameRange&, const FrameRange&) = default;
};

enum class AudioKind { fb, hb, qb, fn, hn, qn, bol };
enum class VideoKind { no_motion, transition };
enum class SyncKind { psi_fb, psi_hb };

std::string_view to_string(AudioKind kind);
std::string_view to_string(VideoKind kind);
std::string_view to_string(SyncKind kind);
AudioKind parse_audio_kind(std::string_view text);

// Full or half beat (with or without bol).
bool is_full_beat(AudioKind kind);
bool is_half_beat(AudioKind kind);

struct AudioEvent {
  std::int64_t id = 0;
  AudioKind kind = AudioKind::fb;
  FrameRange range;
  // Absent for stick beats.
  std::optional<std::string> bol;

  friend bool operator==(const AudioEvent&, const AudioEvent&) = default;
};

struct VideoEvent {
  std::int64_t id = 0;
  VideoKind kind = VideoKind::no_motion;
  FrameRange range;

  friend bool operator==(const VideoEvent&, const VideoEvent&) = default;
};

struct SyncEvent {
  SyncKind kind = SyncKind::psi_fb;
  FrameRange range;
  // Absent when the no-motion interval carries no recognised posture.
  std::optional<std::string> posture_label;

  friend bool operator==(const SyncEvent&, const SyncEvent&) = default;
};

struct AnnotationRecord {
  std::string posture_class;
  FrameRange range;
  int beat_number = 0;
  std::string bol;

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

// Result of a stream validation: ok, or the index of the first offending event.
struct StreamCheck {
  bool ok = true;
  std::optional<std::size_t> first_violation;
  std::string reason;

  explicit operator bool() const { return ok; }
};

// floor(t * fps). Negative time throws DomainError.
FrameIndex time_to_frame(double seconds, double fps = kDefaultFps);
double frame_to_time(FrameIndex frame, double fps = kDefaultFps);

// A beat heard at `frame` spans [frame, frame + half_window].
FrameRange beat_range_at_frame(FrameIndex frame, FrameIndex half_window = kDefaultBeatHalfWindow);
FrameRange beat_range(double seconds, FrameIndex half_window = kDefaultBeatHalfWindow,
                      double fps = kDefaultFps);

bool ranges_overlap(const FrameRange& a, const FrameRange& b);

// Consecutive events must tile the timeline and alternate kinds.
StreamCheck validate_video_stream(std::span<const VideoEvent> events);
// Ranges must be strictly ordered and pairwise disjoint.
StreamCheck validate_audio_stream(std::span<const AudioEvent> events);
// Annotation ranges must be ordered and non-overlapping.
StreamCheck validate_annotations(std::span<const AnnotationRecord> records);

// Beat-track file: header `id,kind,start_frame,end_frame,bol`. An empty bol
// field marks a stick beat.
std::vector<AudioEvent> read_beat_track(const std::string& path);
void write_beat_track(const std::string& path, std::span<const AudioEvent> events);

// Annotation file: header `posture_class,start_frame,end_frame,beat_number,bol`.
std::vector<AnnotationRecord> read_annotations(const std::string& path);
void write_annotations(const std::string& path, std::span<const AnnotationRecord> records);

}  // namespace adavu
