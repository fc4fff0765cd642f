#include "adavu/motion_segmentation.hpp"

#include <algorithm>
#include <cstdlib>

#include <fmt/format.h>

#include "adavu/csv.hpp"
#include "adavu/error.hpp"

namespace adavu {

void MotionConfig::validate() const {
  if (th_pix <= 0 || th_pix > 255) throw DomainError("th_pix must lie in (0, 255]");
  if (th_frm < 0) throw DomainError("th_frm must be non-negative");
  if (min_gap < 0) throw DomainError("min_gap must be non-negative");
}

std::int64_t motion_pixel_count(const GrayFrame& reference, const GrayFrame& target, int th_pix) {
  if (reference.width() != target.width() || reference.height() != target.height()) {
    throw DomainError(fmt::format("frame dimensions differ: {}x{} vs {}x{}", reference.width(),
                                  reference.height(), target.width(), target.height()));
  }
  const auto ref = reference.pixels();
  const auto tgt = target.pixels();
  std::int64_t count = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const int diff = std::abs(static_cast<int>(tgt[i]) - static_cast<int>(ref[i]));
    count += diff > th_pix;
  }
  return count;
}

std::vector<bool> motion_flags(std::span<const GrayFrame> frames, const MotionConfig& cfg) {
  cfg.validate();
  if (frames.size() < 2) throw DomainError("motion detection needs at least two frames");
  std::vector<bool> flags(frames.size());
  for (std::size_t i = 1; i < frames.size(); ++i) {
    flags[i] = is_motion_frame(motion_pixel_count(frames[i - 1], frames[i], cfg.th_pix), cfg.th_frm);
  }
  flags[0] = flags[1];
  return flags;
}

std::vector<bool> smooth_flags(std::vector<bool> flags, const MotionConfig& cfg) {
  if (!cfg.merge_gaps) return flags;
  std::size_t i = 0;
  while (i < flags.size()) {
    std::size_t j = i;
    while (j < flags.size() && flags[j] == flags[i]) ++j;
    const bool interior = i > 0 && j < flags.size();
    if (flags[i] && interior && static_cast<std::int64_t>(j - i) <= cfg.min_gap) {
      std::fill(flags.begin() + static_cast<std::ptrdiff_t>(i), flags.begin() + static_cast<std::ptrdiff_t>(j),
                false);
    }
    i = j;
  }
  return flags;
}

std::vector<VideoEvent> video_events_from_flags(const std::vector<bool>& flags) {
  std::vector<VideoEvent> events;
  std::size_t i = 0;
  while (i < flags.size()) {
    std::size_t j = i;
    while (j < flags.size() && flags[j] == flags[i]) ++j;
    events.push_back({static_cast<std::int64_t>(events.size()),
                      flags[i] ? VideoKind::transition : VideoKind::no_motion,
                      FrameRange(static_cast<FrameIndex>(i), static_cast<FrameIndex>(j - 1))});
    i = j;
  }
  return events;
}

std::vector<VideoEvent> detect_video_events(std::span<const GrayFrame> frames, const MotionConfig& cfg) {
  return video_events_from_flags(smooth_flags(motion_flags(frames, cfg), cfg));
}

std::vector<SyncEvent> extract_kframes(std::span<const AudioEvent> audio, std::span<const VideoEvent> video) {
  if (!audio.empty()) {
    const auto check = validate_audio_stream(audio);
    if (!check) throw DomainError(fmt::format("invalid audio stream at event {}: {}", *check.first_violation, check.reason));
  }
  if (!video.empty()) {
    const auto check = validate_video_stream(video);
    if (!check) throw DomainError(fmt::format("invalid video stream at event {}: {}", *check.first_violation, check.reason));
  }
  std::vector<SyncEvent> out;
  // Both streams are ordered, so a moving lower bound over the audio suffices.
  std::size_t first = 0;
  for (const auto& nu : video) {
    if (nu.kind != VideoKind::no_motion) continue;
    while (first < audio.size() && audio[first].range.end < nu.range.start) ++first;
    bool full = false;
    bool half = false;
    for (std::size_t k = first; k < audio.size() && audio[k].range.start <= nu.range.end; ++k) {
      if (!ranges_overlap(audio[k].range, nu.range)) continue;
      full = full || is_full_beat(audio[k].kind);
      half = half || is_half_beat(audio[k].kind);
    }
    if (full || half) out.push_back({full ? SyncKind::psi_fb : SyncKind::psi_hb, nu.range, std::nullopt});
  }
  return out;
}

FrameIndex representative_frame(const FrameRange& range) { return (range.start + range.end) / 2; }

SegmentationReport validate_kframes(std::span<const SyncEvent> kframes,
                                    std::span<const AnnotationRecord> annotations) {
  SegmentationReport r;
  r.kframes.assign(kframes.begin(), kframes.end());
  r.kframe_count = static_cast<std::int64_t>(kframes.size());
  r.annotation_count = static_cast<std::int64_t>(annotations.size());
  std::vector<int> hits_per_annotation(annotations.size(), 0);
  bool one_to_one = kframes.size() == annotations.size();
  for (const auto& psi : kframes) {
    int hits = 0;
    for (std::size_t j = 0; j < annotations.size(); ++j) {
      if (ranges_overlap(psi.range, annotations[j].range)) {
        ++hits;
        ++hits_per_annotation[j];
      }
    }
    r.kframe_matched.push_back(hits > 0);
    r.matched += hits > 0;
    one_to_one = one_to_one && hits == 1;
  }
  for (std::size_t j = 0; j < annotations.size(); ++j) {
    r.annotations_matched += hits_per_annotation[j] > 0;
    one_to_one = one_to_one && hits_per_annotation[j] == 1;
    const auto& a = annotations[j].range;
    r.frames_total += a.length();
    for (FrameIndex f = a.start; f <= a.end; ++f) {
      const bool covered = std::any_of(kframes.begin(), kframes.end(),
                                       [f](const SyncEvent& psi) { return psi.range.contains(f); });
      r.frames_matched += covered;
    }
  }
  r.total = std::max(r.kframe_count, r.annotation_count);
  r.accuracy = r.total == 0 ? 1.0 : static_cast<double>(r.matched) / static_cast<double>(r.total);
  r.performances_perfect = one_to_one ? 1 : 0;
  return r;
}

SegmentationReport combine_reports(std::span<const SegmentationReport> reports) {
  SegmentationReport sum;
  sum.performances = 0;
  for (const auto& r : reports) {
    sum.matched += r.matched;
    sum.total += r.total;
    sum.kframe_count += r.kframe_count;
    sum.annotation_count += r.annotation_count;
    sum.annotations_matched += r.annotations_matched;
    sum.frames_matched += r.frames_matched;
    sum.frames_total += r.frames_total;
    sum.performances += r.performances;
    sum.performances_perfect += r.performances_perfect;
  }
  sum.accuracy = sum.total == 0 ? 1.0 : static_cast<double>(sum.matched) / static_cast<double>(sum.total);
  return sum;
}

void write_kframes_csv(const std::string& path, const SegmentationReport& report) {
  auto out = csv::open_for_write(path);
  out << "id,kind,start_frame,end_frame,representative_frame,matched\n";
  for (std::size_t i = 0; i < report.kframes.size(); ++i) {
    const auto& k = report.kframes[i];
    const bool matched = i < report.kframe_matched.size() && report.kframe_matched[i];
    out << i << ',' << to_string(k.kind) << ',' << k.range.start << ',' << k.range.end << ','
        << representative_frame(k.range) << ',' << (matched ? 1 : 0) << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

std::vector<SyncEvent> read_kframes_csv(const std::string& path) {
  csv::Reader reader(path);
  reader.expect_header({"id", "kind", "start_frame", "end_frame", "representative_frame", "matched"});
  std::vector<SyncEvent> out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != 6) reader.fail("expected 6 fields");
    SyncEvent ev;
    if (f[1] == "psi_fb") ev.kind = SyncKind::psi_fb;
    else if (f[1] == "psi_hb") ev.kind = SyncKind::psi_hb;
    else reader.fail("unknown sync kind `" + f[1] + "`");
    try {
      ev.range = FrameRange(reader.to_int(f[2], "start_frame"), reader.to_int(f[3], "end_frame"));
    } catch (const ParseError&) {
      throw;
    } catch (const DomainError& e) {
      reader.fail(e.what());
    }
    out.push_back(ev);
  }
  return out;
}

void write_segmentation_report_csv(const std::string& path, const SegmentationReport& r) {
  auto out = csv::open_for_write(path);
  out << "metric,value\n"
      << "kframes," << r.kframe_count << '\n'
      << "annotations," << r.annotation_count << '\n'
      << "matched," << r.matched << '\n'
      << "total," << r.total << '\n'
      << "accuracy," << fmt::format("{:.6f}", r.accuracy) << '\n'
      << "annotations_matched," << r.annotations_matched << '\n'
      << "frames_matched," << r.frames_matched << '\n'
      << "frames_total," << r.frames_total << '\n'
      << "performances," << r.performances << '\n'
      << "performances_perfect," << r.performances_perfect << '\n';
  if (!out) throw IoError("write failed for " + path);
}

std::string format_segmentation_summary(const SegmentationReport& r) {
  std::string s;
  s += fmt::format("K-frame ranges      : {}\n", r.kframe_count);
  s += fmt::format("Annotated postures  : {}\n", r.annotation_count);
  s += fmt::format("Matched ranges      : {} / {}\n", r.matched, r.total);
  s += fmt::format("Range accuracy      : {:.2f}%\n", 100.0 * r.accuracy);
  s += fmt::format("Annotations covered : {} / {}\n", r.annotations_matched, r.annotation_count);
  const double frame_cov = r.frames_total == 0 ? 1.0 : static_cast<double>(r.frames_matched) / r.frames_total;
  s += fmt::format("Frame coverage      : {} / {} ({:.2f}%)\n", r.frames_matched, r.frames_total, 100.0 * frame_cov);
  s += fmt::format("Perfect performances: {} / {}\n", r.performances_perfect, r.performances);
  return s;
}

}  // namespace adavu
