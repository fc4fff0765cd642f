#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adavu/datagen.hpp"
#include "adavu/gmm.hpp"
#include "adavu/hmm.hpp"
#include "adavu/motion_segmentation.hpp"
#include "adavu/posture_features.hpp"
#include "adavu/svm.hpp"

namespace adavu {

enum class GenKind { performances, clusters, sequences, postures };
enum class FeatureKind { angles, hog };
enum class ClassifierKind { gmm, svm, hmm };

std::string_view to_string(GenKind kind);
std::string_view to_string(FeatureKind kind);
std::string_view to_string(ClassifierKind kind);
GenKind parse_gen_kind(std::string_view text);
FeatureKind parse_feature_kind(std::string_view text);
ClassifierKind parse_classifier_kind(std::string_view text);

struct GenConfig {
  GenKind kind = GenKind::performances;
  // Natta labels to synthesise; empty means all eight.
  std::vector<std::string> labels;
  // Performances (or sequences) per label.
  int count = 1;
  std::int64_t tempo_frames = 42;
  double hold_fraction = 0.6;
  // gen_clusters parameters.
  int clusters = 8;
  int dim = 24;
  double separation = 10.0;
  int samples = 200;
};

// Everything a run needs. Stage seeds are derived from `seed` when the
// configuration is built, so one number reproduces a whole run.
struct PipelineConfig {
  std::uint64_t seed = 0;
  MotionConfig motion;
  // HOG extraction is the alternative feature of the posture stage.
  HogParams hog;
  GmmConfig gmm;
  SvmConfig svm;
  HmmConfig hmm;
  NoiseSpec noise;
  GenConfig gen;
  FeatureKind features = FeatureKind::angles;
  ClassifierKind classifier = ClassifierKind::gmm;
  double test_fraction = 0.2;
  double error_threshold = 5.0;
};

// Raw `section.key` -> value pairs.
using ConfigValues = std::map<std::string, std::string>;

// `[section]` headers followed by `key = value` lines; `#` and `;` start
// comments. ParseError carries the line of a malformed entry.
ConfigValues read_config_file(const std::string& path);
// `section.key=value`, as given to --set.
void apply_override(ConfigValues& values, std::string_view assignment);
// Throws DomainError naming an unknown key or an unparsable value.
PipelineConfig build_config(const ConfigValues& values);
// Every effective setting in `section.key` order, for config echoes.
std::vector<std::pair<std::string, std::string>> config_entries(const PipelineConfig& config);

}  // namespace adavu
