#include <gtest/gtest.h>

#include <cstdlib>

#include "adavu/datagen.hpp"
#include "adavu/error.hpp"
#include "adavu/motion_segmentation.hpp"
#include "adavu/rng.hpp"
#include "test_support.hpp"

namespace adavu {
namespace {

GrayFrame filled(std::uint8_t v) { return GrayFrame(16, 12, v); }

// Scalar reference for the per-pixel rule.
std::int64_t oracle_count(const GrayFrame& a, const GrayFrame& b, int th) {
  std::int64_t n = 0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) n += std::abs(int(a.at(x, y)) - int(b.at(x, y))) > th;
  return n;
}

TEST(MotionPixels, ConstructedCases) {
  const GrayFrame a = filled(10);
  EXPECT_EQ(motion_pixel_count(a, a, 50), 0);
  GrayFrame b = filled(0);
  GrayFrame c = b;
  c.at(1, 1) = c.at(2, 3) = c.at(15, 11) = 255;
  EXPECT_EQ(motion_pixel_count(b, c, 50), 3);
  EXPECT_EQ(motion_pixel_count(filled(100), filled(150), 50), 0);
  EXPECT_EQ(motion_pixel_count(filled(100), filled(151), 50), 16 * 12);
}

TEST(MotionPixels, AgreesWithScalarOracleOnRandomFrames) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    GrayFrame a(16, 12), b(16, 12);
    for (auto& p : a.pixels()) p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    for (auto& p : b.pixels()) p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    const int th = static_cast<int>(rng.uniform_int(0, 255));
    ASSERT_EQ(motion_pixel_count(a, b, th), oracle_count(a, b, th));
  }
}

TEST(MotionFrame, StrictThreshold) {
  EXPECT_TRUE(is_motion_frame(101, 100));
  EXPECT_FALSE(is_motion_frame(100, 100));
  EXPECT_FALSE(is_motion_frame(0, 100));
}

TEST(VideoEvents, IdenticalFramesFormOneStillEvent) {
  std::vector<GrayFrame> frames(100, filled(7));
  MotionConfig cfg;
  cfg.th_frm = 10;
  const auto ev = detect_video_events(frames, cfg);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].kind, VideoKind::no_motion);
  EXPECT_EQ(ev[0].range, FrameRange(0, 99));
}

TEST(VideoEvents, PlantedMotionBoundaries) {
  std::vector<GrayFrame> frames;
  for (int i = 0; i < 50; ++i) frames.push_back(filled(0));
  for (int i = 50; i < 60; ++i) frames.push_back(filled(i % 2 == 0 ? 255 : 100));
  for (int i = 60; i < 100; ++i) frames.push_back(filled(0));
  MotionConfig cfg;
  cfg.th_frm = 10;
  const auto ev = detect_video_events(frames, cfg);
  ASSERT_EQ(ev.size(), 3u);
  EXPECT_EQ(ev[0].range, FrameRange(0, 49));
  EXPECT_EQ(ev[1].kind, VideoKind::transition);
  EXPECT_EQ(ev[1].range, FrameRange(50, 60));
  EXPECT_EQ(ev[2].range, FrameRange(61, 99));
  EXPECT_TRUE(validate_video_stream(ev));
}

TEST(VideoEvents, RunLengthOfRandomFlagsTilesAndAlternates) {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<bool> flags(static_cast<std::size_t>(rng.uniform_int(1, 60)));
    for (std::size_t i = 0; i < flags.size(); ++i) flags[i] = rng.bernoulli(0.4);
    const auto ev = video_events_from_flags(flags);
    ASSERT_TRUE(validate_video_stream(ev));
    EXPECT_EQ(ev.front().range.start, 0);
    EXPECT_EQ(ev.back().range.end, static_cast<FrameIndex>(flags.size()) - 1);
    for (const auto& e : ev) {
      for (FrameIndex f = e.range.start; f <= e.range.end; ++f) {
        ASSERT_EQ(flags[static_cast<std::size_t>(f)], e.kind == VideoKind::transition);
      }
    }
  }
}

TEST(VideoEvents, GapMergeRelabelsShortTransitions) {
  MotionConfig cfg;
  cfg.merge_gaps = true;
  cfg.min_gap = 2;
  const std::vector<bool> flags = {false, false, true, true, false, false, true, true, true, false};
  const std::vector<bool> expect = {false, false, false, false, false, false, true, true, true, false};
  EXPECT_EQ(smooth_flags(flags, cfg), expect);
  cfg.merge_gaps = false;
  EXPECT_EQ(smooth_flags(flags, cfg), flags);
}

TEST(VideoEvents, NeedsTwoFrames) {
  std::vector<GrayFrame> one(1, filled(0));
  EXPECT_THROW(detect_video_events(one, MotionConfig{}), DomainError);
}

std::vector<VideoEvent> table4_video() {
  return {{0, VideoKind::no_motion, {3, 94}},     {1, VideoKind::transition, {95, 107}},
          {2, VideoKind::no_motion, {108, 132}},  {3, VideoKind::transition, {133, 141}},
          {4, VideoKind::no_motion, {142, 161}},  {5, VideoKind::transition, {162, 162}},
          {6, VideoKind::no_motion, {163, 186}},  {7, VideoKind::transition, {187, 199}}};
}

TEST(KFrames, NoMotionRangesOverlappingBeats) {
  const std::vector<AudioEvent> audio = {{0, AudioKind::fb, {98, 109}, std::nullopt},
                                         {1, AudioKind::fb, {143, 173}, std::nullopt}};
  const auto k = extract_kframes(audio, table4_video());
  ASSERT_EQ(k.size(), 3u);
  EXPECT_EQ(k[0].range, FrameRange(108, 132));
  EXPECT_EQ(k[1].range, FrameRange(142, 161));
  EXPECT_EQ(k[2].range, FrameRange(163, 186));
  EXPECT_EQ(k[0].kind, SyncKind::psi_fb);
}

TEST(KFrames, HalfBeatsCountAndOtherEventsDoNot) {
  const std::vector<AudioEvent> audio = {{0, AudioKind::qb, {98, 109}, std::nullopt},
                                         {1, AudioKind::hb, {150, 155}, std::nullopt}};
  const auto k = extract_kframes(audio, table4_video());
  ASSERT_EQ(k.size(), 1u);
  EXPECT_EQ(k[0].range, FrameRange(142, 161));
  EXPECT_EQ(k[0].kind, SyncKind::psi_hb);
}

TEST(Representative, Midpoint) {
  EXPECT_EQ(representative_frame({108, 132}), 120);
  EXPECT_EQ(representative_frame({5, 5}), 5);
  EXPECT_EQ(representative_frame({0, 1}), 0);
}

TEST(ValidateKFrames, MatchedMissedAndEmpty) {
  const std::vector<SyncEvent> k = {{SyncKind::psi_fb, {108, 132}, std::nullopt}};
  const std::vector<AnnotationRecord> a = {{"C02", {104, 135}, 1, ""}, {"C01", {116, 125}, 2, ""}};
  const std::vector<AnnotationRecord> one(a.begin(), a.begin() + 1);
  const auto r1 = validate_kframes(k, one);
  EXPECT_EQ(r1.matched, 1);
  EXPECT_DOUBLE_EQ(r1.accuracy, 1.0);
  const std::vector<AnnotationRecord> missed = {{"C02", {104, 135}, 1, ""}, {"C01", {150, 160}, 2, ""}};
  const auto r2 = validate_kframes(k, missed);
  EXPECT_EQ(r2.total, 2);
  EXPECT_DOUBLE_EQ(r2.accuracy, 0.5);
  EXPECT_DOUBLE_EQ(validate_kframes({}, {}).accuracy, 1.0);
}

TEST(ValidateKFrames, SpuriousDetectionsCount) {
  const std::vector<SyncEvent> k = {{SyncKind::psi_fb, {10, 20}, std::nullopt},
                                    {SyncKind::psi_fb, {40, 50}, std::nullopt}};
  const std::vector<AnnotationRecord> a = {{"C01", {12, 18}, 1, ""}};
  const auto r = validate_kframes(k, a);
  EXPECT_EQ(r.matched, 1);
  EXPECT_EQ(r.total, 2);
  EXPECT_EQ(r.performances_perfect, 0);
}

TEST(KFrameFile, RoundTrip) {
  testing::TempDir dir;
  SegmentationReport r;
  r.kframes = {{SyncKind::psi_fb, {108, 132}, std::nullopt}, {SyncKind::psi_hb, {140, 150}, std::nullopt}};
  r.kframe_matched = {true, false};
  write_kframes_csv(dir.file("k.csv"), r);
  const auto back = read_kframes_csv(dir.file("k.csv"));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].range, r.kframes[0].range);
  EXPECT_EQ(back[1].kind, SyncKind::psi_hb);
}

// The generator plants every hold; segmentation must return them exactly.
TEST(SegmentationRoundTrip, ZeroNoiseNattaThree) {
  const auto perf = gen_performance(natta_spec("Natta3"), NoiseSpec{});
  const auto k = extract_kframes(perf.beats, detect_video_events(perf.frames, MotionConfig{}));
  ASSERT_EQ(k.size(), perf.annotations.size());
  for (std::size_t i = 0; i < k.size(); ++i) EXPECT_EQ(k[i].range, perf.annotations[i].range) << i;
  EXPECT_DOUBLE_EQ(validate_kframes(k, perf.annotations).accuracy, 1.0);
}

}  // namespace
}  // namespace adavu
