#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "adavu/dataset.hpp"
#include "adavu/event_model.hpp"
#include "adavu/image.hpp"
#include "adavu/skeleton.hpp"

namespace adavu {

// One Adavu to synthesise. Each beat k is held in posture k for H =
// round(hold_fraction * tempo_frames) frames starting at the beat; the rest
// of the period is a transition into the next posture. Postures starting
// with `T` are passed through without a hold.
struct AdavuSpec {
  std::string label;
  std::vector<std::string> postures;
  std::map<std::string, SkeletonFrame> poses;
  std::int64_t tempo_frames = 42;
  double hold_fraction = 0.6;
  // Stationary stance before the first transition and after the last one.
  std::int64_t lead_in_frames = 60;
  std::int64_t tail_frames = 30;
  std::string stance = "STANCE";
  SkeletonFrame stance_pose;

  std::int64_t hold_frames() const;
  // Throws DomainError for an empty sequence, a hold fraction outside (0, 1),
  // a transition shorter than two frames or a posture without a pose.
  void validate() const;
};

struct NoiseSpec {
  // Standard deviation of every skeleton coordinate, meters.
  double joint_jitter = 0.0;
  // Fraction of pixels perturbed per frame and the bound of the uniform
  // integer offset applied to them.
  double pixel_noise_rate = 0.0;
  int pixel_noise_amplitude = 0;
  // Beat positions move by a uniform integer in [-beat_jitter, beat_jitter].
  std::int64_t beat_jitter = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct RenderParams {
  int width = 160;
  int height = 120;
  double pixels_per_meter = 50.0;
  // World point projected to the image centre.
  double center_x = 0.0;
  double center_y = -0.1;
  double limb_radius_px = 2.2;
  double head_radius_px = 5.0;
  std::uint8_t background = 40;
  std::uint8_t light = 230;
  std::uint8_t dark = 120;
  // Vertical dip of the figure in the middle of every transition, meters.
  double transition_dip = 0.25;
};

struct Performance {
  std::string label;
  std::vector<SkeletonFrame> skeleton;
  std::vector<GrayFrame> frames;
  std::vector<AudioEvent> beats;
  std::vector<AnnotationRecord> annotations;
};

// Bol of a beat (0-based) in the eight-beat Natta bar.
std::string natta_bol(std::size_t beat);

// The eight Natta Adavus with their posture orders, canonical poses attached.
std::vector<AdavuSpec> natta_specs();
AdavuSpec natta_spec(const std::string& label);

// Orthographic drawing of the figure, limbs striped along their length.
GrayFrame render_skeleton(const SkeletonFrame& skeleton, const RenderParams& params = {});

// Adds uniform integer offsets to a `rate` fraction of the pixels.
void add_pixel_noise(GrayFrame& frame, double rate, int amplitude, std::uint64_t seed);

Performance gen_performance(const AdavuSpec& spec, const NoiseSpec& noise, const RenderParams& render = {});

// k unit-variance Gaussian clusters in d dimensions, n samples each, labels
// C01, C02, ... For k <= d the means sit at (separation / sqrt 2) e_c and are
// pairwise `separation` apart; otherwise they lie on a line with that spacing.
LabeledFeatures gen_clusters(int k, int d, double separation, int n_per_class, std::uint64_t seed);

// Per spec, `count` sequences with one skeleton-angle observation per held
// posture (5 jittered frames each). Posture ids annotate each row.
std::vector<ObservationSequence> gen_sequence_dataset(std::span<const AdavuSpec> specs, int count,
                                                      const NoiseSpec& noise, std::uint64_t seed);

// Labelled skeleton-angle features of the held postures of `specs`, `count`
// samples per occurrence of each posture.
LabeledFeatures gen_posture_dataset(std::span<const AdavuSpec> specs, int count, const NoiseSpec& noise,
                                    std::uint64_t seed);

struct ManifestEntry {
  std::string performance_id;
  std::string label;
  std::string artifact;
  std::string path;
};

// Writes `<id>.skeleton.csv`, `<id>.frames.raw` (+ `.desc`), `<id>.beats.csv`
// and `<id>.annotations.csv` under `dir` and returns their manifest entries,
// with paths relative to `dir`.
std::vector<ManifestEntry> write_performance(const std::string& dir, const std::string& id, const Performance& perf);

// Header `performance_id,label,artifact,path`.
void write_manifest(const std::string& path, std::span<const ManifestEntry> entries);
std::vector<ManifestEntry> read_manifest(const std::string& path);

}  // namespace adavu
