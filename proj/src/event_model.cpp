#include "adavu/event_model.hpp"

#include <algorithm>
#include <cmath>

#include "adavu/csv.hpp"
#include "adavu/error.hpp"

namespace adavu {

FrameRange::FrameRange(FrameIndex s, FrameIndex e) : start(s), end(e) {
  if (s < 0) throw DomainError("frame range start must be non-negative, got " + std::to_string(s));
  if (s > e) {
    throw DomainError("frame range start " + std::to_string(s) + " exceeds end " + std::to_string(e));
  }
}

std::string_view to_string(AudioKind kind) {
  switch (kind) {
    case AudioKind::fb: return "fb";
    case AudioKind::hb: return "hb";
    case AudioKind::qb: return "qb";
    case AudioKind::fn: return "fn";
    case AudioKind::hn: return "hn";
    case AudioKind::qn: return "qn";
    case AudioKind::bol: return "bol";
  }
  return "?";
}

std::string_view to_string(VideoKind kind) {
  return kind == VideoKind::no_motion ? "no_motion" : "transition";
}

std::string_view to_string(SyncKind kind) { return kind == SyncKind::psi_fb ? "psi_fb" : "psi_hb"; }

AudioKind parse_audio_kind(std::string_view text) {
  for (auto k : {AudioKind::fb, AudioKind::hb, AudioKind::qb, AudioKind::fn, AudioKind::hn,
                 AudioKind::qn, AudioKind::bol}) {
    if (to_string(k) == text) return k;
  }
  throw DomainError("unknown audio event kind `" + std::string(text) + "`");
}

bool is_full_beat(AudioKind kind) { return kind == AudioKind::fb; }
bool is_half_beat(AudioKind kind) { return kind == AudioKind::hb; }

FrameIndex time_to_frame(double seconds, double fps) {
  if (!(seconds >= 0.0) || !std::isfinite(seconds)) {
    throw DomainError("time must be a finite non-negative number of seconds");
  }
  if (!(fps > 0.0)) throw DomainError("frame rate must be positive");
  // The small slack absorbs representation error, e.g. (98.0 / 30) * 30.
  return static_cast<FrameIndex>(std::floor(seconds * fps + 1e-9));
}

double frame_to_time(FrameIndex frame, double fps) {
  if (!(fps > 0.0)) throw DomainError("frame rate must be positive");
  return static_cast<double>(frame) / fps;
}

FrameRange beat_range_at_frame(FrameIndex frame, FrameIndex half_window) {
  if (half_window < 0) throw DomainError("beat half window must be non-negative");
  return FrameRange(frame, frame + half_window);
}

FrameRange beat_range(double seconds, FrameIndex half_window, double fps) {
  return beat_range_at_frame(time_to_frame(seconds, fps), half_window);
}

bool ranges_overlap(const FrameRange& a, const FrameRange& b) {
  return std::max(a.start, b.start) <= std::min(a.end, b.end);
}

StreamCheck validate_video_stream(std::span<const VideoEvent> events) {
  if (events.empty()) throw DomainError("video event stream is empty");
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].kind == events[i - 1].kind) {
      return {false, i, "consecutive events of the same kind"};
    }
    if (events[i].range.start != events[i - 1].range.end + 1) {
      return {false, i, "events do not tile the timeline"};
    }
  }
  return {};
}

StreamCheck validate_audio_stream(std::span<const AudioEvent> events) {
  if (events.empty()) throw DomainError("audio event stream is empty");
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].range.start <= events[i - 1].range.end) {
      return {false, i, "audio events overlap or are out of order"};
    }
  }
  return {};
}

StreamCheck validate_annotations(std::span<const AnnotationRecord> records) {
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].range.start <= records[i - 1].range.end) {
      return {false, i, "annotations overlap or are out of order"};
    }
  }
  return {};
}

namespace {

const std::vector<std::string> kBeatHeader = {"id", "kind", "start_frame", "end_frame", "bol"};
const std::vector<std::string> kAnnotationHeader = {"posture_class", "start_frame", "end_frame",
                                                    "beat_number", "bol"};

FrameRange parse_range(const csv::Reader& reader, const std::string& s, const std::string& e) {
  const auto start = reader.to_int(s, "start_frame");
  const auto end = reader.to_int(e, "end_frame");
  try {
    return FrameRange(start, end);
  } catch (const DomainError& err) {
    reader.fail(err.what());
  }
}

void check_field(const std::string& text, const char* what) {
  if (text.find_first_of(",\n\r") != std::string::npos) {
    throw DomainError(std::string(what) + " must not contain commas or line breaks: `" + text + "`");
  }
}

}  // namespace

std::vector<AudioEvent> read_beat_track(const std::string& path) {
  csv::Reader reader(path);
  reader.expect_header(kBeatHeader);
  std::vector<AudioEvent> events;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != kBeatHeader.size()) reader.fail("expected 5 fields, got " + std::to_string(f.size()));
    AudioEvent ev;
    ev.id = reader.to_int(f[0], "id");
    try {
      ev.kind = parse_audio_kind(f[1]);
    } catch (const DomainError& err) {
      reader.fail(err.what());
    }
    ev.range = parse_range(reader, f[2], f[3]);
    if (!f[4].empty()) ev.bol = f[4];
    if (!events.empty() && ev.id <= events.back().id) reader.fail("event ids must strictly increase");
    events.push_back(std::move(ev));
  }
  return events;
}

void write_beat_track(const std::string& path, std::span<const AudioEvent> events) {
  auto out = csv::open_for_write(path);
  out << "id,kind,start_frame,end_frame,bol\n";
  for (const auto& ev : events) {
    if (ev.bol) check_field(*ev.bol, "bol");
    out << ev.id << ',' << to_string(ev.kind) << ',' << ev.range.start << ',' << ev.range.end << ','
        << ev.bol.value_or("") << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

std::vector<AnnotationRecord> read_annotations(const std::string& path) {
  csv::Reader reader(path);
  reader.expect_header(kAnnotationHeader);
  std::vector<AnnotationRecord> records;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != kAnnotationHeader.size()) {
      reader.fail("expected 5 fields, got " + std::to_string(f.size()));
    }
    AnnotationRecord rec;
    if (f[0].empty()) reader.fail("empty posture_class");
    rec.posture_class = f[0];
    rec.range = parse_range(reader, f[1], f[2]);
    rec.beat_number = static_cast<int>(reader.to_int(f[3], "beat_number"));
    rec.bol = f[4];
    if (!records.empty() && rec.range.start <= records.back().range.end) {
      reader.fail("annotation ranges must be ordered and non-overlapping");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_annotations(const std::string& path, std::span<const AnnotationRecord> records) {
  auto out = csv::open_for_write(path);
  out << "posture_class,start_frame,end_frame,beat_number,bol\n";
  for (const auto& rec : records) {
    check_field(rec.posture_class, "posture_class");
    check_field(rec.bol, "bol");
    out << rec.posture_class << ',' << rec.range.start << ',' << rec.range.end << ','
        << rec.beat_number << ',' << rec.bol << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace adavu
