#include "commands.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <ostream>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "adavu/csv.hpp"
#include "adavu/error.hpp"
#include "adavu/model_io.hpp"
#include "adavu/posture_features.hpp"
#include "adavu/rng.hpp"

namespace adavu::cli {

namespace fs = std::filesystem;

namespace {

std::string join_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw DomainError(fmt::format("{} is required", flag));
}

void require_file(const std::string& path) {
  if (!fs::exists(path)) throw IoError("no such file: " + path);
}

// Creates `dir`, refusing to reuse a non-empty directory unless forced.
void prepare_output_dir(const std::string& dir, bool force) {
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir, ec)) throw DomainError("output path " + dir + " exists and is not a directory");
    if (!force && !fs::is_empty(dir, ec)) throw DomainError("output path " + dir + " already exists; pass --force to overwrite");
  }
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

void ensure_parent(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw IoError("cannot create directory " + parent.string() + ": " + ec.message());
}

class Timings {
 public:
  template <typename F>
  auto time(const std::string& stage, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      record(stage, t0);
    } else {
      auto r = f();
      record(stage, t0);
      return r;
    }
  }

  // Wall-clock times vary between runs, so they live apart from the report.
  void write(const std::string& path) const {
    auto out = csv::open_for_write(path);
    out << "stage,seconds\n";
    for (const auto& [stage, s] : rows_) out << stage << ',' << fmt::format("{:.6f}", s) << '\n';
  }

 private:
  void record(const std::string& stage, std::chrono::steady_clock::time_point t0) {
    rows_.emplace_back(stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::vector<std::pair<std::string, double>> rows_;
};

// section,key,value rows; every accuracy line sits next to the file it was
// computed from.
struct RunReport {
  std::vector<std::array<std::string, 3>> rows;

  void add(std::string section, std::string key, std::string value) {
    rows.push_back({std::move(section), std::move(key), std::move(value)});
  }

  void add_config(const PipelineConfig& config) {
    add("toolkit", "version", ADAVU_VERSION);
    for (const auto& [k, v] : config_entries(config)) add("config", k, v);
  }

  void add_segmentation(const SegmentationReport& r, const std::string& file) {
    add("segmentation", "report", file);
    add("segmentation", "kframes", std::to_string(r.kframe_count));
    add("segmentation", "annotations", std::to_string(r.annotation_count));
    add("segmentation", "matched", std::to_string(r.matched));
    add("segmentation", "total", std::to_string(r.total));
    add("segmentation", "accuracy", csv::format_double(r.accuracy));
  }

  void add_evaluation(const ConfusionMatrix& m, const std::string& file) {
    add("evaluation", "confusion", file);
    add("evaluation", "correct", std::to_string(m.correct()));
    add("evaluation", "total", std::to_string(m.total()));
    add("evaluation", "accuracy", csv::format_double(m.accuracy()));
  }

  void write(const std::string& path) const {
    auto out = csv::open_for_write(path);
    out << "section,key,value\n";
    for (const auto& r : rows) out << r[0] << ',' << r[1] << ',' << r[2] << '\n';
    if (!out) throw IoError("write failed for " + path);
  }
};

std::vector<AdavuSpec> selected_specs(const PipelineConfig& c) {
  std::vector<AdavuSpec> specs;
  if (c.gen.labels.empty()) {
    specs = natta_specs();
  } else {
    for (const auto& l : c.gen.labels) specs.push_back(natta_spec(l));
  }
  for (auto& s : specs) {
    s.tempo_frames = c.gen.tempo_frames;
    s.hold_fraction = c.gen.hold_fraction;
    s.validate();
  }
  return specs;
}

// Performances generated per label: `<label>-NNN`.
std::vector<ManifestEntry> generate_performances(const PipelineConfig& c, const std::string& dir) {
  std::vector<ManifestEntry> manifest;
  for (const auto& spec : selected_specs(c)) {
    for (int i = 0; i < c.gen.count; ++i) {
      const std::string id = fmt::format("{}-{:03d}", spec.label, i);
      NoiseSpec noise = c.noise;
      noise.seed = derive_seed(c.noise.seed, id);
      const auto perf = gen_performance(spec, noise);
      for (auto& e : write_performance(dir, id, perf)) manifest.push_back(std::move(e));
    }
  }
  return manifest;
}

struct PerformanceFiles {
  std::string id;
  std::string label;
  std::map<std::string, std::string> artifacts;

  const std::string& artifact(const std::string& kind) const {
    const auto it = artifacts.find(kind);
    if (it == artifacts.end()) throw DomainError(fmt::format("performance {} has no `{}` artifact", id, kind));
    return it->second;
  }
  bool has(const std::string& kind) const { return artifacts.count(kind) > 0; }
};

// Manifest rows grouped per performance, in manifest order, with paths
// resolved against the manifest directory.
std::vector<PerformanceFiles> read_performances(const std::string& manifest_path) {
  const auto base = fs::path(manifest_path).parent_path();
  std::vector<PerformanceFiles> out;
  std::map<std::string, std::size_t> index;
  for (const auto& e : read_manifest(manifest_path)) {
    auto [it, fresh] = index.emplace(e.performance_id, out.size());
    if (fresh) out.push_back({e.performance_id, e.label, {}});
    auto& p = out[it->second];
    if (p.label != e.label) throw DomainError(fmt::format("performance {} listed with two labels", e.performance_id));
    p.artifacts[e.artifact] = (base / e.path).string();
  }
  return out;
}

std::vector<SyncEvent> segment_stream(const std::string& frames_path, const std::string& beats_path,
                                      const MotionConfig& motion) {
  require_file(beats_path);
  const auto beats = read_beat_track(beats_path);
  if (const auto check = validate_audio_stream(beats); !check) {
    throw ParseError(beats_path, 0, "invalid beat track: " + check.reason);
  }
  const auto frames = read_frame_stream(frames_path);
  const auto video = detect_video_events(frames, motion);
  return extract_kframes(beats, video);
}

struct SegmentOutput {
  std::vector<std::pair<std::string, SegmentationReport>> per_performance;
  SegmentationReport combined;
  bool validated = false;
};

SegmentOutput segment_performances(const std::vector<PerformanceFiles>& perfs, const MotionConfig& motion,
                                   bool validate) {
  SegmentOutput out;
  out.validated = validate;
  std::vector<SegmentationReport> reports;
  for (const auto& p : perfs) {
    const auto kframes = segment_stream(p.artifact("frames"), p.artifact("beats"), motion);
    SegmentationReport r;
    if (validate) {
      r = validate_kframes(kframes, read_annotations(p.artifact("annotations")));
    } else {
      r.kframes = kframes;
      r.kframe_matched.assign(kframes.size(), false);
      r.kframe_count = static_cast<std::int64_t>(kframes.size());
    }
    reports.push_back(r);
    out.per_performance.emplace_back(p.id, std::move(r));
  }
  out.combined = combine_reports(reports);
  return out;
}

void write_segment_output(const SegmentOutput& seg, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
  for (const auto& [id, r] : seg.per_performance) write_kframes_csv(join_path(dir, id + ".kframes.csv"), r);
  if (seg.validated) write_segmentation_report_csv(join_path(dir, "segmentation.csv"), seg.combined);
}

void print_segmentation(std::ostream& out, const SegmentOutput& seg) {
  for (const auto& [id, r] : seg.per_performance) {
    if (seg.validated) {
      fmt::print(out, "{}: {} K-frame ranges, {} of {} matched\n", id, r.kframe_count, r.matched, r.total);
    } else {
      fmt::print(out, "{}: {} K-frame ranges\n", id, r.kframe_count);
    }
  }
  if (seg.validated) fmt::print(out, "{}", format_segmentation_summary(seg.combined));
}

struct FeatureOutput {
  LabeledFeatures postures;
  std::vector<ObservationSequence> sequences;
};

// Posture class of the first annotation overlapping `range`.
std::string posture_of(const FrameRange& range, const std::vector<AnnotationRecord>& annotations) {
  for (const auto& a : annotations) {
    if (ranges_overlap(range, a.range)) return a.posture_class;
  }
  return {};
}

FeatureOutput extract_features(const std::vector<PerformanceFiles>& perfs, const PipelineConfig& c,
                               const std::string& kframes_dir) {
  FeatureOutput out;
  out.postures.columns = c.features == FeatureKind::hog ? hog_feature_names(c.hog) : angle_feature_names();
  std::vector<std::vector<double>> rows;
  for (const auto& p : perfs) {
    std::vector<SyncEvent> kframes;
    if (!kframes_dir.empty()) {
      const auto path = join_path(kframes_dir, p.id + ".kframes.csv");
      require_file(path);
      kframes = read_kframes_csv(path);
    } else {
      kframes = segment_stream(p.artifact("frames"), p.artifact("beats"), c.motion);
    }
    std::vector<AnnotationRecord> annotations;
    if (p.has("annotations")) annotations = read_annotations(p.artifact("annotations"));
    const auto skeleton = read_skeleton_stream(p.artifact("skeleton"));
    std::vector<GrayFrame> frames;
    if (c.features == FeatureKind::hog) frames = read_frame_stream(p.artifact("frames"));

    ObservationSequence seq;
    seq.source = p.id;
    seq.label = p.label;
    seq.observations.resize(static_cast<Eigen::Index>(kframes.size()), static_cast<Eigen::Index>(kAngleFeatureDim));
    bool all_labelled = true;
    for (std::size_t k = 0; k < kframes.size(); ++k) {
      const auto& range = kframes[k].range;
      if (range.end >= static_cast<FrameIndex>(skeleton.size())) {
        throw DomainError(fmt::format("K-frame range [{}, {}] of {} lies past the skeleton stream", range.start,
                                      range.end, p.id));
      }
      const auto angles = bone_angles(kframe_window(skeleton, range)).to_vector();
      seq.observations.row(static_cast<Eigen::Index>(k)) = angles.transpose();
      const std::string posture = posture_of(range, annotations);
      all_labelled = all_labelled && !posture.empty();
      seq.postures.push_back(posture);
      if (posture.empty()) continue;
      if (c.features == FeatureKind::hog) {
        const auto f = representative_frame(range);
        if (f >= static_cast<FrameIndex>(frames.size())) throw DomainError("K-frame past the end of the frame stream");
        rows.push_back(hog_descriptor(frames[static_cast<std::size_t>(f)], c.hog));
      } else {
        rows.emplace_back(angles.data(), angles.data() + angles.size());
      }
      out.postures.labels.push_back(posture);
      out.postures.sources.push_back(fmt::format("{}@{}-{}", p.id, range.start, range.end));
    }
    if (!all_labelled) seq.postures.clear();
    if (seq.length() > 0) out.sequences.push_back(std::move(seq));
  }
  out.postures.features.resize(static_cast<Eigen::Index>(rows.size()),
                               static_cast<Eigen::Index>(out.postures.columns.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.postures.features.row(static_cast<Eigen::Index>(r)) =
        Eigen::Map<const Eigen::RowVectorXd>(rows[r].data(), static_cast<Eigen::Index>(rows[r].size()));
  }
  return out;
}

std::string objective_line(const EmTrace& t) {
  const double last = t.objective.empty() ? 0.0 : t.objective.back();
  return fmt::format("{}: {} iterations, final log-likelihood {:.6f}{}", t.label, t.objective.size(), last,
                     t.converged ? "" : " (iteration limit reached)");
}

// 1/2 coef' K coef - sum |coef|, the minimised dual objective.
double dual_objective(const SvmBinaryModel& m) {
  const Eigen::MatrixXd k = gram_matrix(m.support_vectors, m.kernel);
  return 0.5 * m.coefficients.dot(k * m.coefficients) - m.coefficients.cwiseAbs().sum();
}

void train_features(const LabeledFeatures& data, const PipelineConfig& c, const std::string& model_path,
                    std::ostream& out) {
  ensure_parent(model_path);
  if (c.classifier == ClassifierKind::gmm) {
    std::vector<EmTrace> traces;
    const auto model = gmm_fit(data, c.gmm, &traces);
    for (const auto& t : traces) fmt::print(out, "{}\n", objective_line(t));
    save_model(model_path, model);
  } else {
    std::vector<SmoResult> details;
    const auto model = svm_train_ovr(data, c.svm, &details);
    for (std::size_t i = 0; i < details.size(); ++i) {
      fmt::print(out, "{}: {} SMO iterations, {} support vectors, dual objective {:.6f}\n", model.classes()[i],
                 details[i].iterations, model.models()[i].coefficients.size(), dual_objective(model.models()[i]));
    }
    save_model(model_path, model);
  }
}

void train_sequences(const std::vector<ObservationSequence>& data, const PipelineConfig& c,
                     const std::string& model_path, std::ostream& out) {
  ensure_parent(model_path);
  std::vector<EmTrace> traces;
  const auto bank = train_bank(data, c.hmm, &traces);
  for (const auto& t : traces) fmt::print(out, "{}\n", objective_line(t));
  save_model(model_path, bank, c.hmm);
}

// Confusion matrix of a stored model on a feature table or sequence file.
ConfusionMatrix evaluate_model(const std::string& model_path, const std::string& input,
                               std::vector<Outcome>& outcomes) {
  require_file(model_path);
  require_file(input);
  switch (read_model_kind(model_path)) {
    case ModelKind::gmm: return evaluate(load_gmm(model_path), read_feature_table(input), &outcomes);
    case ModelKind::svm: return evaluate(load_svm(model_path), read_feature_table(input), &outcomes);
    case ModelKind::hmm_bank: {
      const auto seqs = read_sequences(input);
      return evaluate(load_bank(model_path), seqs, &outcomes);
    }
  }
  throw DomainError("unknown model kind");
}

void write_outcomes(const std::string& path, const std::vector<Outcome>& outcomes) {
  auto out = csv::open_for_write(path);
  out << "source,actual,predicted\n";
  for (const auto& o : outcomes) out << o.source << ',' << o.actual << ',' << o.predicted << '\n';
  if (!out) throw IoError("write failed for " + path);
}

void print_confusion(std::ostream& out, const ConfusionMatrix& m, double threshold) {
  fmt::print(out, "{}\n{}", format_confusion_table(m, threshold), format_confusion_grid(m));
}

// Last round(fraction * n) sequences of every label go to the test split.
void split_sequences(const std::vector<ObservationSequence>& all, double fraction,
                     std::vector<ObservationSequence>& train, std::vector<ObservationSequence>& test) {
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < all.size(); ++i) by_label[all[i].label].push_back(i);
  std::set<std::size_t> test_rows;
  for (const auto& [label, rows] : by_label) {
    auto n_test = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(rows.size())));
    if (rows.size() >= 2) n_test = std::clamp<std::size_t>(n_test, 1, rows.size() - 1);
    else n_test = 0;
    for (std::size_t k = rows.size() - n_test; k < rows.size(); ++k) test_rows.insert(rows[k]);
  }
  for (std::size_t i = 0; i < all.size(); ++i) (test_rows.count(i) ? test : train).push_back(all[i]);
}


}  // namespace

PipelineConfig resolve_config(const Options& o) {
  ConfigValues values;
  if (!o.config_path.empty()) {
    require_file(o.config_path);
    values = read_config_file(o.config_path);
  }
  for (const auto& s : o.overrides) apply_override(values, s);
  if (!o.seed.empty()) values["run.seed"] = o.seed;
  if (!o.classifier.empty()) values["train.classifier"] = o.classifier;
  if (!o.kind.empty()) values["gen.kind"] = o.kind;
  if (!o.count.empty()) values["gen.count"] = o.count;
  return build_config(values);
}

void cmd_gen(const Options& o, std::ostream& out) {
  require(o.out, "--out");
  const auto c = resolve_config(o);
  prepare_output_dir(o.out, o.force);
  std::vector<ManifestEntry> manifest;
  const auto specs = selected_specs(c);
  switch (c.gen.kind) {
    case GenKind::performances:
      manifest = generate_performances(c, o.out);
      break;
    case GenKind::clusters:
      write_feature_table(join_path(o.out, "features.csv"),
                          gen_clusters(c.gen.clusters, c.gen.dim, c.gen.separation, c.gen.samples, c.noise.seed));
      manifest.push_back({"clusters", "", "features", "features.csv"});
      break;
    case GenKind::sequences:
      write_sequences(join_path(o.out, "sequences.txt"), gen_sequence_dataset(specs, c.gen.count, c.noise, c.noise.seed));
      manifest.push_back({"sequences", "", "sequences", "sequences.txt"});
      break;
    case GenKind::postures:
      write_feature_table(join_path(o.out, "features.csv"), gen_posture_dataset(specs, c.gen.count, c.noise, c.noise.seed));
      manifest.push_back({"postures", "", "features", "features.csv"});
      break;
  }
  write_manifest(join_path(o.out, "manifest.csv"), manifest);
  fmt::print(out, "wrote {} artifacts to {}\n", manifest.size(), o.out);
}

SegmentationReport cmd_segment(const Options& o, std::ostream& out) {
  require(o.out, "--out");
  const auto c = resolve_config(o);
  std::vector<PerformanceFiles> perfs;
  if (!o.input.empty()) {
    require_file(o.input);
    perfs = read_performances(o.input);
  } else {
    require(o.frames, "--frames (or --input <manifest>)");
    require(o.beats, "--beats");
    PerformanceFiles p{fs::path(o.frames).stem().stem().string(), "", {}};
    p.artifacts["frames"] = o.frames;
    p.artifacts["beats"] = o.beats;
    if (!o.annotations.empty()) p.artifacts["annotations"] = o.annotations;
    perfs.push_back(std::move(p));
  }
  if (o.validate) {
    for (const auto& p : perfs) {
      if (!p.has("annotations")) throw DomainError("--validate needs annotations for " + p.id);
    }
  }
  // Everything is computed before the first file is written.
  const auto seg = segment_performances(perfs, c.motion, o.validate);
  write_segment_output(seg, o.out);
  print_segmentation(out, seg);
  return seg.combined;
}

void cmd_features(const Options& o, std::ostream& out) {
  require(o.input, "--input <manifest>");
  require(o.out, "--out");
  require_file(o.input);
  const auto c = resolve_config(o);
  const auto f = extract_features(read_performances(o.input), c, o.kframes);
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec) throw IoError("cannot create directory " + o.out + ": " + ec.message());
  write_feature_table(join_path(o.out, "features.csv"), f.postures);
  write_sequences(join_path(o.out, "sequences.txt"), f.sequences);
  fmt::print(out, "{} labelled {} features, {} sequences\n", f.postures.size(), to_string(c.features),
             f.sequences.size());
}

void cmd_train(const Options& o, std::ostream& out) {
  require(o.input, "--input");
  require(o.model, "--model");
  require_file(o.input);
  const auto c = resolve_config(o);
  if (c.classifier == ClassifierKind::hmm) {
    train_sequences(read_sequences(o.input), c, o.model, out);
  } else {
    train_features(read_feature_table(o.input), c, o.model, out);
  }
  fmt::print(out, "model written to {}\n", o.model);
}

void cmd_classify(const Options& o, std::ostream& out) {
  require(o.model, "--model");
  require(o.input, "--input");
  std::vector<Outcome> outcomes;
  evaluate_model(o.model, o.input, outcomes);
  if (!o.out.empty()) {
    ensure_parent(o.out);
    write_outcomes(o.out, outcomes);
  } else {
    fmt::print(out, "source,actual,predicted\n");
    for (const auto& r : outcomes) fmt::print(out, "{},{},{}\n", r.source, r.actual, r.predicted);
  }
}

ConfusionMatrix cmd_evaluate(const Options& o, std::ostream& out) {
  const auto c = resolve_config(o);
  if (!o.counts.empty()) {
    require_file(o.counts);
    const auto m = read_confusion_csv(o.counts);
    print_confusion(out, m, c.error_threshold);
    return m;
  }
  require(o.model, "--model (or --counts)");
  require(o.input, "--input");
  std::vector<Outcome> outcomes;
  const auto m = evaluate_model(o.model, o.input, outcomes);
  if (!o.out.empty()) {
    std::error_code ec;
    fs::create_directories(o.out, ec);
    if (ec) throw IoError("cannot create directory " + o.out + ": " + ec.message());
    write_confusion_csv(join_path(o.out, "confusion.csv"), m);
    write_outcomes(join_path(o.out, "outcomes.csv"), outcomes);
    RunReport report;
    report.add_config(c);
    report.add("evaluation", "model", o.model);
    report.add("evaluation", "input", o.input);
    report.add_evaluation(m, "confusion.csv");
    report.write(join_path(o.out, "report.csv"));
  }
  print_confusion(out, m, c.error_threshold);
  return m;
}

void cmd_pipeline(const Options& o, std::ostream& out) {
  require(o.out, "--out");
  const auto c = resolve_config(o);
  prepare_output_dir(o.out, o.force);
  Timings timings;
  RunReport report;
  report.add_config(c);

  const auto data_dir = join_path(o.out, "data");
  const auto manifest = timings.time("gen", [&] {
    std::error_code ec;
    fs::create_directories(data_dir, ec);
    auto m = generate_performances(c, data_dir);
    write_manifest(join_path(data_dir, "manifest.csv"), m);
    return m;
  });
  const auto perfs = read_performances(join_path(data_dir, "manifest.csv"));
  fmt::print(out, "generated {} performances\n", perfs.size());
  if (perfs.empty()) throw DomainError("pipeline needs at least one performance (gen.count > 0)");

  const auto seg_dir = join_path(o.out, "segment");
  const auto seg = timings.time("segment", [&] {
    auto s = segment_performances(perfs, c.motion, true);
    write_segment_output(s, seg_dir);
    return s;
  });
  fmt::print(out, "{}", format_segmentation_summary(seg.combined));
  report.add_segmentation(seg.combined, "segment/segmentation.csv");

  const auto feat_dir = join_path(o.out, "features");
  const auto feats = timings.time("features", [&] { return extract_features(perfs, c, seg_dir); });
  {
    std::error_code ec;
    fs::create_directories(feat_dir, ec);
  }
  write_feature_table(join_path(feat_dir, "features.csv"), feats.postures);
  write_sequences(join_path(feat_dir, "sequences.txt"), feats.sequences);

  const auto model_path = join_path(o.out, "model.json");
  const auto eval_dir = join_path(o.out, "evaluate");
  std::error_code ec;
  fs::create_directories(eval_dir, ec);
  std::vector<Outcome> outcomes;
  ConfusionMatrix m;
  if (c.classifier == ClassifierKind::hmm) {
    std::vector<ObservationSequence> train, test;
    split_sequences(feats.sequences, c.test_fraction, train, test);
    write_sequences(join_path(feat_dir, "train_sequences.txt"), train);
    write_sequences(join_path(feat_dir, "test_sequences.txt"), test);
    timings.time("train", [&] { train_sequences(train, c, model_path, out); });
    m = timings.time("evaluate", [&] { return evaluate(load_bank(model_path), test, &outcomes); });
  } else {
    LabeledFeatures train, test;
    train_test_split(feats.postures, c.test_fraction, train, test);
    write_feature_table(join_path(feat_dir, "train.csv"), train);
    write_feature_table(join_path(feat_dir, "test.csv"), test);
    timings.time("train", [&] { train_features(train, c, model_path, out); });
    m = timings.time("evaluate", [&] {
      return c.classifier == ClassifierKind::gmm ? evaluate(load_gmm(model_path), test, &outcomes)
                                                 : evaluate(load_svm(model_path), test, &outcomes);
    });
  }
  write_confusion_csv(join_path(eval_dir, "confusion.csv"), m);
  write_outcomes(join_path(eval_dir, "outcomes.csv"), outcomes);
  report.add("evaluation", "model", "model.json");
  report.add_evaluation(m, "evaluate/confusion.csv");
  report.write(join_path(o.out, "report.csv"));
  timings.write(join_path(o.out, "timings.csv"));
  print_confusion(out, m, c.error_threshold);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bharatanatyam Adavu analysis toolkit"};
  app.set_version_flag("--version", ADAVU_VERSION);
  app.require_subcommand(1);
  Options o;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "configuration file");
    sub->add_option("--set", o.overrides, "override a setting, section.key=value");
    sub->add_option("--seed", o.seed, "root seed of the run");
  };

  auto* gen = app.add_subcommand("gen", "synthesise a dataset and its manifest");
  common(gen);
  gen->add_option("--out", o.out, "output directory");
  gen->add_option("--kind", o.kind, "performances, clusters, sequences or postures");
  gen->add_option("--count", o.count, "performances or sequences per label");
  gen->add_flag("--force", o.force, "write into an existing directory");

  auto* segment = app.add_subcommand("segment", "extract K-frame ranges from frames and beats");
  common(segment);
  segment->add_option("--input", o.input, "manifest of performances");
  segment->add_option("--frames", o.frames, "frame stream (.raw or directory of .pgm)");
  segment->add_option("--beats", o.beats, "beat track csv");
  segment->add_option("--annotations", o.annotations, "annotation csv");
  segment->add_option("--out", o.out, "output directory");
  segment->add_flag("--validate", o.validate, "score K-frames against the annotations");

  auto* features = app.add_subcommand("features", "posture features and sequences from K-frames");
  common(features);
  features->add_option("--input", o.input, "manifest of performances");
  features->add_option("--kframes", o.kframes, "directory of <id>.kframes.csv (segmented on the fly if absent)");
  features->add_option("--out", o.out, "output directory");

  auto* train = app.add_subcommand("train", "fit a classifier");
  common(train);
  train->add_option("--classifier", o.classifier, "gmm, svm or hmm");
  train->add_option("--input", o.input, "feature table, or sequence file for hmm");
  train->add_option("--model", o.model, "model file to write");

  auto* classify = app.add_subcommand("classify", "predict labels with a stored model");
  common(classify);
  classify->add_option("--model", o.model, "model file");
  classify->add_option("--input", o.input, "feature table or sequence file");
  classify->add_option("--out", o.out, "predictions csv (stdout if absent)");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "confusion matrix of a model on a labelled set");
  common(evaluate_cmd);
  evaluate_cmd->add_option("--model", o.model, "model file");
  evaluate_cmd->add_option("--input", o.input, "labelled feature table or sequence file");
  evaluate_cmd->add_option("--counts", o.counts, "render a stored confusion csv instead");
  evaluate_cmd->add_option("--out", o.out, "directory for confusion, outcomes and report csv");

  auto* pipeline = app.add_subcommand("pipeline", "gen, segment, features, train and evaluate in one run");
  common(pipeline);
  pipeline->add_option("--classifier", o.classifier, "gmm, svm or hmm");
  pipeline->add_option("--out", o.out, "output directory");
  pipeline->add_flag("--force", o.force, "write into an existing directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) cmd_gen(o, out);
    else if (segment->parsed()) cmd_segment(o, out);
    else if (features->parsed()) cmd_features(o, out);
    else if (train->parsed()) cmd_train(o, out);
    else if (classify->parsed()) cmd_classify(o, out);
    else if (evaluate_cmd->parsed()) cmd_evaluate(o, out);
    else if (pipeline->parsed()) cmd_pipeline(o, out);
    return 0;
  } catch (const NumericError& e) {
    fmt::print(err, "numeric failure: {}\n", e.what());
    return 3;
  } catch (const IoError& e) {
    fmt::print(err, "i/o error: {}\n", e.what());
    return 4;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 2;
  }
}

}  // namespace adavu::cli
