#include "adavu/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <fmt/format.h>

#include "adavu/csv.hpp"
#include "adavu/error.hpp"
#include "adavu/poses.hpp"
#include "adavu/posture_features.hpp"
#include "adavu/rng.hpp"

namespace adavu {

namespace {

bool is_transition_posture(const std::string& id) { return !id.empty() && id.front() == 'T'; }

SkeletonFrame interpolate(const SkeletonFrame& a, const SkeletonFrame& b, double s, double dip) {
  SkeletonFrame out;
  for (std::size_t j = 0; j < kJointCount; ++j) {
    out.joints[j] = (1.0 - s) * a.joints[j] + s * b.joints[j];
    out.joints[j].y() -= dip;
  }
  return out;
}

// Depth of the dip after t of n transition frames: down over the first half,
// back up over the second, zero at both ends.
double dip_at(std::int64_t t, std::int64_t n, double depth) {
  const std::int64_t m = (n + 1) / 2;
  if (t <= m) return depth * static_cast<double>(t) / static_cast<double>(m);
  return depth * static_cast<double>(n - t) / static_cast<double>(n - m);
}

SkeletonFrame jittered(const SkeletonFrame& pose, double sigma, Rng& rng) {
  SkeletonFrame out = pose;
  if (sigma <= 0.0) return out;
  for (auto& j : out.joints) {
    for (int c = 0; c < 3; ++c) j[c] += rng.normal(0.0, sigma);
  }
  return out;
}

std::vector<std::string> split_sequence(const char* text) { return csv::split(text); }

}  // namespace

std::int64_t AdavuSpec::hold_frames() const {
  return static_cast<std::int64_t>(std::llround(hold_fraction * static_cast<double>(tempo_frames)));
}

void AdavuSpec::validate() const {
  if (postures.empty()) throw DomainError("Adavu `" + label + "` has no postures");
  if (!(hold_fraction > 0.0 && hold_fraction < 1.0)) {
    throw DomainError(fmt::format("hold fraction of `{}` must lie in (0, 1), got {}", label, hold_fraction));
  }
  const auto h = hold_frames();
  if (h < 1) throw DomainError(fmt::format("Adavu `{}` holds its postures for no frame", label));
  if (tempo_frames - h < 2) {
    throw DomainError(fmt::format("Adavu `{}` leaves {} transition frames per beat, at least 2 are needed", label,
                                  tempo_frames - h));
  }
  if (lead_in_frames < 1 || tail_frames < 1) throw DomainError("lead-in and tail must span at least one frame");
  for (const auto& p : postures) {
    if (!poses.count(p)) throw DomainError(fmt::format("Adavu `{}` has no pose for posture `{}`", label, p));
  }
}

void NoiseSpec::validate() const {
  if (!(joint_jitter >= 0.0) || !(pixel_noise_rate >= 0.0) || pixel_noise_rate > 1.0 || pixel_noise_amplitude < 0 ||
      beat_jitter < 0) {
    throw DomainError("noise parameters must be non-negative and the pixel noise rate at most 1");
  }
}

std::string natta_bol(std::size_t beat) {
  static const char* const bols[4] = {"tai yum", "tat tat", "tai yum", "ta"};
  return bols[beat % 4];
}

std::vector<AdavuSpec> natta_specs() {
  static const char* const orders[8] = {
      "C02,C01,C03,C01,C02,C01,C03,C01,C02,C01,C03,C01,C02,C01,C03,C01",
      "C02,C01,C02,C01,C03,C01,C03,C01,C02,C01,C02,C01,C03,C01,C03,C01",
      "C02,C01,C03,C01,C04,C04,C02,C01,C03,C01,C02,C01,C05,C05,C03,C01",
      "C02,C01,C02,C01,C03,C01,C03,C01,C04,C04,C04,C04,C02,C01,C02,C01,"
      "C03,C01,C03,C01,C02,C01,C02,C01,C05,C05,C05,C05,C03,C01,C03,C01",
      "C07,C07,C06,C06,C02,C01,C02,C01,C07,C07,C06,C06,C03,C01,C03,C01",
      "C08,C08,C10,C10,C02,C01,C02,C01,C09,C09,C11,C11,C03,C01,C03,C01",
      "C12,C12,C14,C14,C07,C07,C06,C06,C13,C13,C15,C15,C07,C07,C06,C06",
      "C16,C16,T01,C18,C19,C21,T02,C23,C17,C17,T03,C18,C20,C22,T04,C23",
  };
  std::vector<AdavuSpec> specs;
  for (int i = 0; i < 8; ++i) {
    AdavuSpec s;
    s.label = fmt::format("Natta{}", i + 1);
    s.postures = split_sequence(orders[i]);
    for (const auto& p : s.postures) {
      if (!s.poses.count(p)) s.poses.emplace(p, canonical_pose(p));
    }
    s.stance_pose = canonical_pose(s.stance);
    specs.push_back(std::move(s));
  }
  return specs;
}

AdavuSpec natta_spec(const std::string& label) {
  for (auto& s : natta_specs()) {
    if (s.label == label) return s;
  }
  throw DomainError("unknown Adavu `" + label + "`");
}

GrayFrame render_skeleton(const SkeletonFrame& skeleton, const RenderParams& rp) {
  GrayFrame img(rp.width, rp.height, rp.background);
  auto project = [&](const Eigen::Vector3d& p) {
    return Eigen::Vector2d(0.5 * rp.width + rp.pixels_per_meter * (p.x() - rp.center_x),
                           0.5 * rp.height - rp.pixels_per_meter * (p.y() - rp.center_y));
  };
  const double r = rp.limb_radius_px;
  for (const auto& [from, to] : body_segments()) {
    const Eigen::Vector2d a = project(skeleton[from]);
    const Eigen::Vector2d b = project(skeleton[to]);
    const Eigen::Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x(), b.x()) - r - 1)));
    const int x1 = std::min(rp.width - 1, static_cast<int>(std::ceil(std::max(a.x(), b.x()) + r + 1)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y(), b.y()) - r - 1)));
    const int y1 = std::min(rp.height - 1, static_cast<int>(std::ceil(std::max(a.y(), b.y()) + r + 1)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const Eigen::Vector2d p(x + 0.5, y + 0.5);
        const double s = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
        if ((p - (a + s * ab)).squaredNorm() > r * r) continue;
        // Stripes two pixels wide travel with the limb.
        const auto stripe = static_cast<long>(std::floor(s * std::sqrt(len2) / 2.0));
        img.at(x, y) = stripe % 2 == 0 ? rp.light : rp.dark;
      }
    }
  }
  const Eigen::Vector2d h = project(skeleton[Joint::head]);
  const double hr = rp.head_radius_px;
  for (int y = std::max(0, static_cast<int>(h.y() - hr - 1)); y <= std::min(rp.height - 1, static_cast<int>(h.y() + hr + 1)); ++y) {
    for (int x = std::max(0, static_cast<int>(h.x() - hr - 1)); x <= std::min(rp.width - 1, static_cast<int>(h.x() + hr + 1)); ++x) {
      const double dy = y + 0.5 - h.y();
      const double dx = x + 0.5 - h.x();
      if (dx * dx + dy * dy <= hr * hr) img.at(x, y) = static_cast<long>(std::floor(dy + hr)) / 2 % 2 == 0 ? rp.light : rp.dark;
    }
  }
  return img;
}

void add_pixel_noise(GrayFrame& frame, double rate, int amplitude, std::uint64_t seed) {
  if (rate <= 0.0 || amplitude <= 0) return;
  Rng rng(seed);
  auto px = frame.pixels();
  const auto n = px.size();
  auto perturb = [&](std::size_t i) {
    const auto v = static_cast<std::int64_t>(px[i]) + rng.uniform_int(-amplitude, amplitude);
    px[i] = static_cast<std::uint8_t>(std::clamp<std::int64_t>(v, 0, 255));
  };
  if (rate >= 1.0) {
    for (std::size_t i = 0; i < n; ++i) perturb(i);
    return;
  }
  // Geometric gaps between perturbed pixels.
  const double log_q = std::log1p(-rate);
  auto gap = [&]() { return static_cast<std::size_t>(std::floor(std::log(1.0 - rng.uniform()) / log_q)); };
  for (std::size_t i = gap(); i < n; i += 1 + gap()) perturb(i);
}

Performance gen_performance(const AdavuSpec& spec, const NoiseSpec& noise, const RenderParams& render) {
  spec.validate();
  noise.validate();
  if (spec.tempo_frames <= kDefaultBeatHalfWindow + 2 * noise.beat_jitter) {
    throw DomainError(fmt::format("tempo of {} frames is too short for beat windows of {} frames jittered by {}",
                                  spec.tempo_frames, kDefaultBeatHalfWindow + 1, noise.beat_jitter));
  }
  const std::int64_t hold = spec.hold_frames();

  std::vector<SkeletonFrame> clean;
  std::vector<FrameIndex> beat_frames;
  auto push_hold = [&](const SkeletonFrame& pose, std::int64_t count) {
    for (std::int64_t i = 0; i < count; ++i) clean.push_back(pose);
  };
  // The target pose is reached on the last transition frame, so the next
  // hold adds no motion of its own.
  auto push_transition = [&](const SkeletonFrame& from, const SkeletonFrame& to, std::int64_t n) {
    for (std::int64_t t = 1; t <= n; ++t) {
      clean.push_back(interpolate(from, to, static_cast<double>(t) / static_cast<double>(n),
                                  dip_at(t, n, render.transition_dip)));
    }
  };

  push_hold(spec.stance_pose, spec.lead_in_frames);
  SkeletonFrame current = spec.stance_pose;
  std::int64_t previous_hold = hold;
  for (const auto& id : spec.postures) {
    const SkeletonFrame& target = spec.poses.at(id);
    push_transition(current, target, spec.tempo_frames - previous_hold);
    beat_frames.push_back(static_cast<FrameIndex>(clean.size()));
    previous_hold = is_transition_posture(id) ? 0 : hold;
    push_hold(target, previous_hold);
    current = target;
  }
  push_transition(current, spec.stance_pose, spec.tempo_frames - previous_hold);
  push_hold(spec.stance_pose, spec.tail_frames);

  Performance perf;
  perf.label = spec.label;
  Rng joint_rng(derive_seed(noise.seed, "joints"));
  Rng beat_rng(derive_seed(noise.seed, "beats"));
  const std::uint64_t pixel_root = derive_seed(noise.seed, "pixels");
  perf.skeleton.reserve(clean.size());
  perf.frames.reserve(clean.size());
  for (std::size_t f = 0; f < clean.size(); ++f) {
    perf.skeleton.push_back(jittered(clean[f], noise.joint_jitter, joint_rng));
    perf.frames.push_back(render_skeleton(clean[f], render));
    add_pixel_noise(perf.frames.back(), noise.pixel_noise_rate, noise.pixel_noise_amplitude, derive_seed(pixel_root, f));
  }
  for (std::size_t k = 0; k < beat_frames.size(); ++k) {
    const FrameIndex jitter = noise.beat_jitter > 0 ? beat_rng.uniform_int(-noise.beat_jitter, noise.beat_jitter) : 0;
    const FrameIndex at = std::max<FrameIndex>(0, beat_frames[k] + jitter);
    perf.beats.push_back({static_cast<std::int64_t>(k + 1), AudioKind::fb, beat_range_at_frame(at), natta_bol(k)});
    const auto& id = spec.postures[k];
    if (!is_transition_posture(id)) {
      perf.annotations.push_back(
          {id, FrameRange(beat_frames[k], beat_frames[k] + hold - 1), static_cast<int>(k + 1), natta_bol(k)});
    }
  }
  return perf;
}

LabeledFeatures gen_clusters(int k, int d, double separation, int n_per_class, std::uint64_t seed) {
  if (k < 2) throw DomainError("cluster generation needs at least two classes");
  if (d < 1) throw DomainError("cluster dimension must be positive");
  if (!(separation >= 0.0)) throw DomainError("cluster separation must be non-negative");
  if (n_per_class < 1) throw DomainError("cluster size must be positive");
  LabeledFeatures data;
  data.features.resize(static_cast<Eigen::Index>(k) * n_per_class, d);
  for (int c = 0; c < d; ++c) data.columns.push_back(fmt::format("x{}", c));
  Rng rng(seed);
  Eigen::Index row = 0;
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    if (k <= d) mean[c] = separation / std::sqrt(2.0);
    else mean[0] = separation * c;
    const std::string label = fmt::format("C{:02d}", c + 1);
    for (int i = 0; i < n_per_class; ++i, ++row) {
      for (int j = 0; j < d; ++j) data.features(row, j) = mean[j] + rng.normal();
      data.labels.push_back(label);
      data.sources.push_back(fmt::format("cluster-{}", row));
    }
  }
  return data;
}

namespace {

Eigen::VectorXd observe(const SkeletonFrame& pose, double jitter, Rng& rng) {
  std::vector<SkeletonFrame> window;
  for (std::size_t i = 0; i < kMaxAveragedFrames; ++i) window.push_back(jittered(pose, jitter, rng));
  return bone_angles(window).to_vector();
}

}  // namespace

std::vector<ObservationSequence> gen_sequence_dataset(std::span<const AdavuSpec> specs, int count,
                                                      const NoiseSpec& noise, std::uint64_t seed) {
  noise.validate();
  if (count < 0) throw DomainError("sequence count must be non-negative");
  std::vector<ObservationSequence> out;
  for (const auto& spec : specs) {
    spec.validate();
    std::vector<std::string> held;
    for (const auto& id : spec.postures) {
      if (!is_transition_posture(id)) held.push_back(id);
    }
    if (held.empty()) throw DomainError("Adavu `" + spec.label + "` holds no posture");
    const std::uint64_t label_seed = derive_seed(seed, spec.label);
    for (int i = 0; i < count; ++i) {
      Rng rng(derive_seed(label_seed, static_cast<std::uint64_t>(i)));
      ObservationSequence seq;
      seq.label = spec.label;
      seq.source = fmt::format("{}-{:03d}", spec.label, i);
      seq.postures = held;
      seq.observations.resize(static_cast<Eigen::Index>(held.size()), kAngleFeatureDim);
      for (std::size_t t = 0; t < held.size(); ++t) {
        seq.observations.row(static_cast<Eigen::Index>(t)) = observe(spec.poses.at(held[t]), noise.joint_jitter, rng).transpose();
      }
      out.push_back(std::move(seq));
    }
  }
  return out;
}

LabeledFeatures gen_posture_dataset(std::span<const AdavuSpec> specs, int count, const NoiseSpec& noise,
                                    std::uint64_t seed) {
  noise.validate();
  if (count < 0) throw DomainError("sample count must be non-negative");
  LabeledFeatures data;
  data.columns = angle_feature_names();
  std::vector<Eigen::VectorXd> rows;
  for (const auto& spec : specs) {
    spec.validate();
    Rng rng(derive_seed(seed, spec.label));
    for (std::size_t k = 0; k < spec.postures.size(); ++k) {
      const auto& id = spec.postures[k];
      if (is_transition_posture(id)) continue;
      for (int i = 0; i < count; ++i) {
        rows.push_back(observe(spec.poses.at(id), noise.joint_jitter, rng));
        data.labels.push_back(id);
        data.sources.push_back(fmt::format("{}-b{:02d}-{:03d}", spec.label, k + 1, i));
      }
    }
  }
  data.features.resize(static_cast<Eigen::Index>(rows.size()), kAngleFeatureDim);
  for (std::size_t r = 0; r < rows.size(); ++r) data.features.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  return data;
}

std::vector<ManifestEntry> write_performance(const std::string& dir, const std::string& id, const Performance& perf) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
  const auto at = [&](const std::string& name) { return (fs::path(dir) / name).string(); };
  const std::string skel = id + ".skeleton.csv";
  const std::string frames = id + ".frames.raw";
  const std::string beats = id + ".beats.csv";
  const std::string notes = id + ".annotations.csv";
  write_skeleton_stream(at(skel), perf.skeleton);
  write_raw_stream(at(frames), perf.frames);
  write_beat_track(at(beats), perf.beats);
  write_annotations(at(notes), perf.annotations);
  return {{id, perf.label, "skeleton", skel},
          {id, perf.label, "frames", frames},
          {id, perf.label, "beats", beats},
          {id, perf.label, "annotations", notes}};
}

void write_manifest(const std::string& path, std::span<const ManifestEntry> entries) {
  auto out = csv::open_for_write(path);
  out << "performance_id,label,artifact,path\n";
  for (const auto& e : entries) out << e.performance_id << ',' << e.label << ',' << e.artifact << ',' << e.path << '\n';
  if (!out) throw IoError("write failed for " + path);
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  csv::Reader reader(path);
  reader.expect_header({"performance_id", "label", "artifact", "path"});
  std::vector<ManifestEntry> out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != 4) reader.fail(fmt::format("expected 4 fields, got {}", f.size()));
    if (f[0].empty() || f[3].empty()) reader.fail("empty performance id or path");
    out.push_back({f[0], f[1], f[2], f[3]});
  }
  return out;
}

}  // namespace adavu
