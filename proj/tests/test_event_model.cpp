#include <gtest/gtest.h>

#include <cmath>

#include "adavu/error.hpp"
#include "adavu/event_model.hpp"
#include "test_support.hpp"

namespace adavu {
namespace {

using testing::TempDir;
using testing::write_text;

VideoEvent video(std::int64_t id, VideoKind kind, FrameIndex s, FrameIndex e) { return {id, kind, {s, e}}; }
AudioEvent beat(std::int64_t id, FrameIndex s, FrameIndex e) { return {id, AudioKind::fb, {s, e}, std::nullopt}; }

TEST(TimeToFrame, ThirtyFramesPerSecond) {
  EXPECT_EQ(time_to_frame(0.0), 0);
  EXPECT_EQ(time_to_frame(1.0), 30);
  EXPECT_EQ(time_to_frame(3.27), 98);
  EXPECT_DOUBLE_EQ(frame_to_time(45), 1.5);
}

TEST(TimeToFrame, RoundTripsEveryFrame) {
  for (FrameIndex f = 0; f < 100000; ++f) ASSERT_EQ(time_to_frame(frame_to_time(f)), f) << f;
}

TEST(TimeToFrame, RejectsNegativeTime) {
  EXPECT_THROW(time_to_frame(-0.1), DomainError);
  EXPECT_THROW(time_to_frame(std::nan("")), DomainError);
}

TEST(FrameRange, RejectsReversedOrNegativeBounds) {
  EXPECT_THROW(FrameRange(5, 4), DomainError);
  EXPECT_THROW(FrameRange(-1, 4), DomainError);
  EXPECT_EQ(FrameRange(5, 5).length(), 1);
}

TEST(BeatRange, SpansTenFramesAfterTheBeat) {
  EXPECT_EQ(beat_range(1.0), FrameRange(30, 40));
  EXPECT_EQ(beat_range_at_frame(98), FrameRange(98, 108));
}

TEST(RangesOverlap, Cases) {
  EXPECT_TRUE(ranges_overlap({98, 109}, {108, 132}));
  EXPECT_FALSE(ranges_overlap({10, 20}, {21, 30}));
  EXPECT_TRUE(ranges_overlap({5, 5}, {5, 5}));
  EXPECT_TRUE(ranges_overlap({0, 100}, {40, 41}));
}

TEST(RangesOverlap, MatchesFrameSetIntersection) {
  for (FrameIndex a = 0; a < 8; ++a)
    for (FrameIndex b = a; b < 8; ++b)
      for (FrameIndex c = 0; c < 8; ++c)
        for (FrameIndex d = c; d < 8; ++d) {
          bool shared = false;
          for (FrameIndex f = 0; f < 8; ++f) shared = shared || (f >= a && f <= b && f >= c && f <= d);
          ASSERT_EQ(ranges_overlap({a, b}, {c, d}), shared);
        }
}

TEST(VideoStream, AlternatingContiguousIsValid) {
  const std::vector<VideoEvent> ok = {video(0, VideoKind::no_motion, 1, 50), video(1, VideoKind::transition, 51, 62),
                                      video(2, VideoKind::no_motion, 63, 90)};
  EXPECT_TRUE(validate_video_stream(ok));
}

TEST(VideoStream, RepeatedKindFailsAtIndexOne) {
  const std::vector<VideoEvent> bad = {video(0, VideoKind::no_motion, 1, 50), video(1, VideoKind::no_motion, 51, 60)};
  const auto c = validate_video_stream(bad);
  EXPECT_FALSE(c);
  EXPECT_EQ(c.first_violation, 1u);
}

TEST(VideoStream, GapFailsAtIndexOne) {
  const std::vector<VideoEvent> bad = {video(0, VideoKind::no_motion, 1, 50), video(1, VideoKind::transition, 52, 60)};
  const auto c = validate_video_stream(bad);
  EXPECT_FALSE(c);
  EXPECT_EQ(c.first_violation, 1u);
}

TEST(AudioStream, OrderedDisjointBeats) {
  EXPECT_TRUE(validate_audio_stream(std::vector<AudioEvent>{beat(0, 98, 109), beat(1, 143, 173), beat(2, 186, 220)}));
  EXPECT_TRUE(validate_audio_stream(std::vector<AudioEvent>{beat(0, 98, 109)}));
  const auto c = validate_audio_stream(std::vector<AudioEvent>{beat(0, 98, 109), beat(1, 105, 120)});
  EXPECT_FALSE(c);
  EXPECT_EQ(c.first_violation, 1u);
}

TEST(Annotations, OverlapIsReported) {
  const std::vector<AnnotationRecord> a = {{"C01", {10, 20}, 1, "ta"}, {"C02", {20, 30}, 2, "ta"}};
  EXPECT_FALSE(validate_annotations(a));
}

TEST(BeatTrackFile, RoundTrip) {
  TempDir dir;
  std::vector<AudioEvent> events = {beat(0, 98, 108), {1, AudioKind::hb, {120, 130}, std::string("tai yum")}};
  write_beat_track(dir.file("b.csv"), events);
  EXPECT_EQ(read_beat_track(dir.file("b.csv")), events);
}

TEST(BeatTrackFile, ErrorNamesFileAndLine) {
  TempDir dir;
  write_text(dir.file("b.csv"), "id,kind,start_frame,end_frame,bol\n0,fb,1,5,\n1,zz,9,12,\n");
  try {
    read_beat_track(dir.file("b.csv"));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("b.csv:3"), std::string::npos);
  }
}

TEST(BeatTrackFile, ReversedRangeIsRejected) {
  TempDir dir;
  write_text(dir.file("b.csv"), "id,kind,start_frame,end_frame,bol\n0,fb,9,5,\n");
  EXPECT_THROW(read_beat_track(dir.file("b.csv")), ParseError);
}

TEST(AnnotationFile, RoundTrip) {
  TempDir dir;
  const std::vector<AnnotationRecord> a = {{"C02", {104, 135}, 1, "tai yum"}, {"C01", {146, 170}, 2, "tat tat"}};
  write_annotations(dir.file("a.csv"), a);
  EXPECT_EQ(read_annotations(dir.file("a.csv")), a);
}

}  // namespace
}  // namespace adavu
