#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "adavu/datagen.hpp"
#include "adavu/error.hpp"
#include "adavu/poses.hpp"
#include "adavu/posture_features.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace adavu {
namespace {

TEST(NattaSpecs, EightAdavusWithTheirOrders) {
  const auto specs = natta_specs();
  ASSERT_EQ(specs.size(), 8u);
  for (const auto& s : specs) {
    s.validate();
    EXPECT_EQ(s.postures.size(), s.label == "Natta4" ? 32u : 16u) << s.label;
  }
  EXPECT_EQ(specs[0].label, "Natta1");
  EXPECT_EQ(specs[0].postures.front(), "C02");
  EXPECT_EQ(specs[7].postures[2], "T01");
  EXPECT_EQ(natta_bol(0), "tai yum");
  EXPECT_EQ(natta_bol(3), "ta");
  EXPECT_EQ(natta_bol(9), "tat tat");
  EXPECT_THROW(natta_spec("Natta9"), DomainError);
}

TEST(NattaSpecs, PosesAreDistinct) {
  const auto& ids = canonical_pose_ids();
  std::vector<Eigen::VectorXd> feats;
  for (const auto& id : ids) {
    const SkeletonFrame p = canonical_pose(id);
    feats.push_back(bone_angles(std::span<const SkeletonFrame>(&p, 1)).to_vector());
  }
  for (std::size_t i = 0; i < feats.size(); ++i)
    for (std::size_t j = i + 1; j < feats.size(); ++j) EXPECT_GT((feats[i] - feats[j]).norm(), 1.0) << ids[i] << " " << ids[j];
  EXPECT_THROW(canonical_pose("C99"), DomainError);
}

TEST(GenPerformance, HoldLengthAndAnnotations) {
  AdavuSpec spec = natta_spec("Natta1");
  spec.tempo_frames = 30;
  spec.hold_fraction = 0.6;
  EXPECT_EQ(spec.hold_frames(), 18);
  const auto perf = gen_performance(spec, NoiseSpec{});
  ASSERT_EQ(perf.beats.size(), 16u);
  ASSERT_EQ(perf.annotations.size(), 16u);
  EXPECT_EQ(perf.skeleton.size(), perf.frames.size());
  const auto expected_frames = spec.lead_in_frames + 16 * spec.tempo_frames + (spec.tempo_frames - 18) + spec.tail_frames;
  EXPECT_EQ(static_cast<std::int64_t>(perf.skeleton.size()), expected_frames);
  for (std::size_t k = 0; k < 16; ++k) {
    const auto& a = perf.annotations[k];
    EXPECT_EQ(a.posture_class, spec.postures[k]);
    EXPECT_EQ(a.range.length(), 18);
    EXPECT_EQ(a.beat_number, static_cast<int>(k + 1));
    EXPECT_EQ(a.bol, natta_bol(k));
    EXPECT_TRUE(perf.beats[k].range.contains(a.range.start));
    if (k > 0) {
      EXPECT_EQ(a.range.start - perf.annotations[k - 1].range.start, 30);
    }
  }
}

TEST(GenPerformance, ZeroNoiseHoldsReproduceTheCanonicalPose) {
  const AdavuSpec spec = natta_spec("Natta3");
  const auto perf = gen_performance(spec, NoiseSpec{});
  for (const auto& a : perf.annotations) {
    const SkeletonFrame ref = canonical_pose(a.posture_class);
    const Eigen::VectorXd want = bone_angles(std::span<const SkeletonFrame>(&ref, 1)).to_vector();
    for (auto f = a.range.start; f <= a.range.end; ++f) {
      const auto got = bone_angles(std::span<const SkeletonFrame>(&perf.skeleton[f], 1)).to_vector();
      ASSERT_LT((got - want).cwiseAbs().maxCoeff(), 1e-9);
    }
    // Held frames render identically.
    EXPECT_EQ(perf.frames[a.range.start], perf.frames[a.range.end]);
  }
}

TEST(GenPerformance, TransitionPosturesHaveNoAnnotation) {
  const auto perf = gen_performance(natta_spec("Natta8"), NoiseSpec{});
  EXPECT_EQ(perf.beats.size(), 16u);
  EXPECT_EQ(perf.annotations.size(), 12u);
  for (const auto& a : perf.annotations) EXPECT_NE(a.posture_class.front(), 'T');
}

TEST(GenPerformance, DeterministicAndSeedSensitive) {
  const AdavuSpec spec = natta_spec("Natta2");
  NoiseSpec noise;
  noise.joint_jitter = 0.01;
  noise.pixel_noise_rate = 0.01;
  noise.pixel_noise_amplitude = 5;
  noise.beat_jitter = 2;
  noise.seed = 9;
  const auto a = gen_performance(spec, noise);
  const auto b = gen_performance(spec, noise);
  EXPECT_EQ(a.frames, b.frames);
  EXPECT_EQ(a.beats, b.beats);
  EXPECT_EQ(a.skeleton[100].joints, b.skeleton[100].joints);
  noise.seed = 10;
  const auto c = gen_performance(spec, noise);
  EXPECT_NE(a.frames, c.frames);
}

TEST(GenPerformance, RejectsBadSpecs) {
  AdavuSpec spec = natta_spec("Natta1");
  spec.hold_fraction = 1.0;
  EXPECT_THROW(gen_performance(spec, NoiseSpec{}), DomainError);
  spec = natta_spec("Natta1");
  spec.postures.clear();
  EXPECT_THROW(gen_performance(spec, NoiseSpec{}), DomainError);
  NoiseSpec noise;
  noise.pixel_noise_rate = 2.0;
  EXPECT_THROW(gen_performance(natta_spec("Natta1"), noise), DomainError);
}

TEST(PixelNoise, RateZeroIsIdentityAndValuesStayInRange) {
  GrayFrame img(40, 30, 250);
  const GrayFrame orig = img;
  add_pixel_noise(img, 0.0, 50, 1);
  EXPECT_EQ(img, orig);
  add_pixel_noise(img, 1.0, 50, 1);
  EXPECT_NE(img, orig);
  for (const auto p : img.pixels()) EXPECT_GE(p, 200);
}

TEST(GenClusters, ShapeLabelsAndDeterminism) {
  const auto a = gen_clusters(3, 5, 4.0, 10, 7);
  a.validate();
  EXPECT_EQ(a.size(), 30u);
  EXPECT_EQ(a.dim(), 5);
  EXPECT_EQ(distinct_labels(a.labels), (std::vector<std::string>{"C01", "C02", "C03"}));
  const auto b = gen_clusters(3, 5, 4.0, 10, 7);
  EXPECT_TRUE((a.features.array() == b.features.array()).all());
  EXPECT_THROW(gen_clusters(1, 5, 4.0, 10, 7), DomainError);
}

TEST(GenClusters, MeansArePairwiseSeparated) {
  const auto data = gen_clusters(4, 6, 10.0, 2000, 3);
  std::vector<Eigen::RowVectorXd> means;
  for (const auto& l : distinct_labels(data.labels)) means.push_back(rows_of_class(data, l).colwise().mean());
  for (std::size_t i = 0; i < means.size(); ++i)
    for (std::size_t j = i + 1; j < means.size(); ++j) EXPECT_NEAR((means[i] - means[j]).norm(), 10.0, 0.3);
}

TEST(GenClusters, NoSeparationIsNearChance) {
  const auto train = gen_clusters(2, 4, 0.0, 500, 1);
  const auto test = gen_clusters(2, 4, 0.0, 500, 2);
  EXPECT_NEAR(oracle::nearest_mean_accuracy(train, test), 0.5, 0.06);
}

TEST(GenSequences, OneRowPerHeldPosture) {
  const auto specs = natta_specs();
  NoiseSpec noise;
  noise.joint_jitter = 0.02;
  const auto data = gen_sequence_dataset(specs, 3, noise, 5);
  ASSERT_EQ(data.size(), 24u);
  for (const auto& s : data) {
    EXPECT_EQ(s.dim(), static_cast<Eigen::Index>(kAngleFeatureDim));
    EXPECT_EQ(static_cast<std::size_t>(s.length()), s.postures.size());
  }
  EXPECT_EQ(data[0].length(), 16);
  EXPECT_EQ(data.back().length(), 12);  // Natta8 without its T postures
  const auto again = gen_sequence_dataset(specs, 3, noise, 5);
  EXPECT_TRUE((data[4].observations.array() == again[4].observations.array()).all());
}

TEST(GenPostures, LabelsAreHeldPostures) {
  const std::vector<AdavuSpec> specs = {natta_spec("Natta8")};
  const auto data = gen_posture_dataset(specs, 2, NoiseSpec{}, 1);
  data.validate();
  EXPECT_EQ(data.size(), 24u);
  for (const auto& l : data.labels) EXPECT_NE(l.front(), 'T');
}

TEST(Manifest, FourArtifactsPerPerformanceAndRoundTrip) {
  const testing::TempDir dir;
  std::vector<ManifestEntry> entries;
  for (const char* label : {"Natta1", "Natta5"}) {
    const auto e = write_performance(dir.path().string(), std::string(label) + "-000",
                                     gen_performance(natta_spec(label), NoiseSpec{}));
    EXPECT_EQ(e.size(), 4u);
    entries.insert(entries.end(), e.begin(), e.end());
  }
  std::set<std::string> artifacts;
  for (const auto& e : entries) artifacts.insert(e.artifact);
  EXPECT_EQ(artifacts.size(), 4u);
  write_manifest(dir.file("manifest.csv"), entries);
  const auto back = read_manifest(dir.file("manifest.csv"));
  ASSERT_EQ(back.size(), 8u);
  EXPECT_EQ(back[5].performance_id, "Natta5-000");
  EXPECT_EQ(back[5].path, entries[5].path);
  const auto beats = read_beat_track(dir.file(entries[0].performance_id + ".beats.csv"));
  EXPECT_EQ(beats.size(), 16u);
}

}  // namespace
}  // namespace adavu
