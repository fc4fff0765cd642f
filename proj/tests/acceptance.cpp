// Acceptance checks, one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "adavu/confusion.hpp"
#include "adavu/datagen.hpp"
#include "adavu/gmm.hpp"
#include "adavu/hmm.hpp"
#include "adavu/motion_segmentation.hpp"
#include "adavu/posture_features.hpp"
#include "adavu/rng.hpp"
#include "adavu/svm.hpp"
#include "commands.hpp"
#include "oracles.hpp"

namespace adavu {
namespace {

namespace fs = std::filesystem;

struct Verdict {
  bool pass = false;
  std::string detail;
};

// Tolerances.
constexpr double kOracleRel = 1e-9;
constexpr double kEmSlack = 1e-8;
constexpr double kSegmentationFloor = 0.80;
constexpr double kOracleMarginPp = 2.0;
constexpr double kSequenceFloor = 0.90;
constexpr double kAngleTol = 1e-9;
constexpr double kKkt = 1e-3;

Verdict hog_dimension() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto n = hog_length(HogParams{8, 2, 1, 9, 120, 160});
  const double us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
  return {n == 9576 && us < 1000.0, fmt::format("hog_length = {} in {:.1f} us", n, us)};
}

Verdict hmm_oracle() {
  Rng rng(2024);
  int worst_trial = -1, unique = 0, path_mismatch = 0;
  double worst = 0.0;
  const int trials = 400;
  for (int trial = 0; trial < trials; ++trial) {
    const int s = static_cast<int>(rng.uniform_int(1, 4));
    const int t = static_cast<int>(rng.uniform_int(1, 7));
    const int d = static_cast<int>(rng.uniform_int(1, 3));
    const auto h = oracle::random_hmm(rng, s, d);
    const auto obs = oracle::random_observations(rng, t, d);
    const auto ref = oracle::enumerate_paths(h, obs);
    const double ll = hmm_log_likelihood(h, obs);
    const auto v = viterbi(h, obs);
    const double scale = std::max(1.0, std::abs(ref.log_likelihood));
    const double err = std::max(std::abs(ll - ref.log_likelihood) / scale,
                                std::abs(v.log_probability - ref.best) / std::max(1.0, std::abs(ref.best)));
    if (err > worst) {
      worst = err;
      worst_trial = trial;
    }
    if (ref.best - ref.second > kOracleRel * std::max(1.0, std::abs(ref.best))) {
      ++unique;
      path_mismatch += v.path != ref.best_path;
    }
  }
  return {worst <= kOracleRel && path_mismatch == 0,
          fmt::format("{} HMMs, max relative error {:.2e} (trial {}), {} unique optima, {} path mismatches", trials,
                      worst, worst_trial, unique, path_mismatch)};
}

// Largest drop of the objective between consecutive iterations.
double worst_drop(const EmTrace& trace) {
  double w = 0.0;
  for (std::size_t i = 1; i < trace.objective.size(); ++i) w = std::max(w, trace.objective[i - 1] - trace.objective[i]);
  return w;
}

Verdict em_monotone() {
  double gmm_worst = 0.0, hmm_worst = 0.0;
  long iterations = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Rng rng(7000 + trial);
    const int k = static_cast<int>(rng.uniform_int(2, 4));
    const int d = static_cast<int>(rng.uniform_int(1, 5));
    const auto data = gen_clusters(k, d, rng.uniform(0.5, 4.0), 50, 100 + trial);
    GmmConfig cfg;
    cfg.covariance = static_cast<CovarianceType>(trial % 4);
    cfg.tolerance = 0.0;
    cfg.max_iterations = 200;
    EmTrace trace;
    fit_mixture(data.features, k, cfg, 300 + trial, &trace);
    gmm_worst = std::max(gmm_worst, worst_drop(trace));
    iterations += static_cast<long>(trace.objective.size());
  }
  for (int trial = 0; trial < 50; ++trial) {
    Rng rng(9000 + trial);
    const int s = static_cast<int>(rng.uniform_int(2, 4));
    const int d = static_cast<int>(rng.uniform_int(1, 3));
    const auto truth = oracle::random_hmm(rng, s, d);
    std::vector<Eigen::MatrixXd> seqs;
    for (int n = 0; n < 6; ++n) {
      // Sample from the generating chain.
      const int len = static_cast<int>(rng.uniform_int(8, 20));
      Eigen::MatrixXd o(len, d);
      int state = 0;
      for (double u = rng.uniform(), acc = 0.0; state < s - 1; ++state) {
        acc += truth.pi[state];
        if (u < acc) break;
      }
      for (int t = 0; t < len; ++t) {
        if (t > 0) {
          const double u = rng.uniform();
          double acc = 0.0;
          int next = 0;
          for (; next < s - 1; ++next) {
            acc += truth.transition(state, next);
            if (u < acc) break;
          }
          state = next;
        }
        for (int j = 0; j < d; ++j) o(t, j) = truth.means(state, j) + std::sqrt(truth.variances(state, j)) * rng.normal();
      }
      seqs.push_back(o);
    }
    HmmConfig cfg;
    cfg.tolerance = 0.0;
    cfg.max_iterations = 200;
    EmTrace trace;
    hmm_fit(seqs, s, cfg, 500 + trial, &trace);
    hmm_worst = std::max(hmm_worst, worst_drop(trace));
    iterations += static_cast<long>(trace.objective.size());
  }
  return {gmm_worst <= kEmSlack && hmm_worst <= kEmSlack,
          fmt::format("50 GMM + 50 Baum-Welch fits, {} iterations, largest decrease GMM {:.2e}, HMM {:.2e}", iterations,
                      gmm_worst, hmm_worst)};
}

std::vector<SyncEvent> segment(const Performance& perf) {
  return extract_kframes(perf.beats, detect_video_events(perf.frames, MotionConfig{}));
}

Verdict segmentation_round_trip() {
  int exact = 0;
  std::string first_miss;
  for (const auto& spec : natta_specs()) {
    const auto perf = gen_performance(spec, NoiseSpec{});
    const auto kf = segment(perf);
    bool same = kf.size() == perf.annotations.size();
    for (std::size_t i = 0; same && i < kf.size(); ++i) same = kf[i].range == perf.annotations[i].range;
    exact += same;
    if (!same && first_miss.empty()) first_miss = spec.label;
  }
  double worst = 1.0, sum = 0.0;
  for (int run = 0; run < 20; ++run) {
    std::vector<SegmentationReport> reports;
    for (const auto& spec : natta_specs()) {
      NoiseSpec noise;
      noise.pixel_noise_rate = 0.001;
      noise.pixel_noise_amplitude = 60;
      noise.beat_jitter = 3;
      noise.seed = derive_seed(derive_seed(1234, static_cast<std::uint64_t>(run)), spec.label);
      const auto perf = gen_performance(spec, noise);
      reports.push_back(validate_kframes(segment(perf), perf.annotations));
    }
    const double acc = combine_reports(reports).accuracy;
    worst = std::min(worst, acc);
    sum += acc;
  }
  return {exact == 8 && worst >= kSegmentationFloor,
          fmt::format("zero noise exact on {}/8 Adavus{}; noisy accuracy min {:.4f} mean {:.4f} over 20 runs", exact,
                      first_miss.empty() ? "" : " (first miss " + first_miss + ")", worst, sum / 20.0)};
}

struct SvmRun {
  double accuracy = 0.0;
  double worst_kkt = 0.0;
};

SvmRun svm_accuracy(const LabeledFeatures& train, const LabeledFeatures& test, std::uint64_t seed) {
  SvmConfig cfg;
  cfg.seed = seed;
  std::vector<SmoResult> details;
  const auto model = svm_train_ovr(train, cfg, &details);
  SvmRun r;
  r.accuracy = evaluate(model, test).accuracy();
  for (std::size_t c = 0; c < details.size(); ++c) {
    std::vector<int> y;
    for (const auto& l : train.labels) y.push_back(l == model.classes()[c] ? 1 : -1);
    r.worst_kkt = std::max(r.worst_kkt, max_kkt_violation(details[c], train.features, y));
  }
  return r;
}

double worst_kkt_seen = 0.0;

Verdict posture_classifiers() {
  LabeledFeatures train, test;
  train_test_split(gen_clusters(8, 24, 10.0, 200, 42), 0.25, train, test);
  GmmConfig gcfg;
  gcfg.seed = 1;
  const auto gmm_sep = evaluate(gmm_fit(train, gcfg), test);
  const auto svm_sep = svm_accuracy(train, test, 1);
  const bool big_ok = test.size() == 400 && gmm_sep.correct() == 400 && svm_sep.accuracy == 1.0;

  train_test_split(gen_clusters(8, 24, 2.0, 200, 43), 0.25, train, test);
  const double oracle_acc = oracle::nearest_mean_accuracy(train, test);
  const double gmm_acc = evaluate(gmm_fit(train, gcfg), test).accuracy();
  const auto svm_close = svm_accuracy(train, test, 2);
  worst_kkt_seen = std::max({worst_kkt_seen, svm_sep.worst_kkt, svm_close.worst_kkt});
  const double floor = oracle_acc - kOracleMarginPp / 100.0;
  const bool close_ok = gmm_acc >= floor && svm_close.accuracy >= floor;
  return {big_ok && close_ok,
          fmt::format("separation 10: GMM {}/{} SVM {:.4f}; separation 2: oracle {:.4f}, GMM {:.4f}, SVM {:.4f}",
                      gmm_sep.correct(), gmm_sep.total(), svm_sep.accuracy, oracle_acc, gmm_acc, svm_close.accuracy)};
}

std::set<std::string> alphabet(const AdavuSpec& spec) {
  std::set<std::string> a;
  for (const auto& p : spec.postures) {
    if (p.front() != 'T') a.insert(p);
  }
  return a;
}

Verdict sequence_recognition() {
  const auto specs = natta_specs();
  std::map<std::string, std::set<std::string>> alphabets;
  for (const auto& s : specs) alphabets[s.label] = alphabet(s);
  std::int64_t correct = 0, total = 0;
  double worst_seed = 1.0;
  std::map<std::pair<std::string, std::string>, std::int64_t> confusions;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    NoiseSpec noise;
    noise.joint_jitter = 0.02;
    const auto all = gen_sequence_dataset(specs, 37, noise, derive_seed(seed, "sequences"));
    std::vector<ObservationSequence> train, test;
    for (std::size_t i = 0; i < all.size(); ++i) (i % 37 < 30 ? train : test).push_back(all[i]);
    HmmConfig cfg;
    cfg.seed = derive_seed(seed, "hmm");
    const auto m = evaluate(train_bank(train, cfg), test);
    worst_seed = std::min(worst_seed, m.accuracy());
    correct += m.correct();
    total += m.total();
    for (std::size_t a = 0; a < m.classes().size(); ++a)
      for (std::size_t p = 0; p < m.classes().size(); ++p) {
        const auto n = m.counts()(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(p));
        if (a != p && n > 0) confusions[{m.classes()[a], m.classes()[p]}] += n;
      }
  }
  // Every confusion must be between Adavus built from nested posture sets.
  bool nested = true;
  std::string listing;
  for (const auto& [pair, n] : confusions) {
    const auto& x = alphabets[pair.first];
    const auto& y = alphabets[pair.second];
    const bool sub = std::includes(x.begin(), x.end(), y.begin(), y.end()) ||
                     std::includes(y.begin(), y.end(), x.begin(), x.end());
    nested = nested && sub;
    listing += fmt::format("{}{}->{}:{}", listing.empty() ? "" : " ", pair.first, pair.second, n);
  }
  const double acc = static_cast<double>(correct) / static_cast<double>(total);
  return {acc >= kSequenceFloor && nested,
          fmt::format("accuracy {}/{} = {:.4f} (worst seed {:.4f}), confusions nested: {} [{}]", correct, total, acc,
                      worst_seed, nested ? "yes" : "no", listing)};
}

SkeletonFrame random_skeleton(Rng& rng) {
  SkeletonFrame s;
  for (auto& j : s.joints) j = Eigen::Vector3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(1, 4));
  return s;
}

Verdict invariances() {
  Rng rng(77);
  double translate = 0.0, scale = 0.0, cosine = 0.0, hog_shift = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const SkeletonFrame s = random_skeleton(rng);
    const Eigen::VectorXd base = bone_angles(std::span(&s, 1)).to_vector();
    const Eigen::Vector3d offset(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
    const double k = rng.uniform(0.1, 10.0);
    SkeletonFrame moved = s, scaled = s;
    for (auto& j : moved.joints) j += offset;
    for (auto& j : scaled.joints) j *= k;
    translate = std::max(translate, (bone_angles(std::span(&moved, 1)).to_vector() - base).cwiseAbs().maxCoeff());
    scale = std::max(scale, (bone_angles(std::span(&scaled, 1)).to_vector() - base).cwiseAbs().maxCoeff());
    for (int b = 0; b < 8; ++b) {
      double sum = 0.0;
      for (int a = 0; a < 3; ++a) sum += std::pow(std::cos(base[3 * b + a] * std::numbers::pi / 180.0), 2);
      cosine = std::max(cosine, std::abs(sum - 1.0));
    }
  }
  const HogParams hp{8, 2, 1, 9, 48, 64};
  for (int trial = 0; trial < 1000; ++trial) {
    GrayFrame img(64, 48);
    for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(rng.uniform_int(0, 200));
    const auto shift = static_cast<std::uint8_t>(rng.uniform_int(1, 55));
    GrayFrame shifted = img;
    for (auto& p : shifted.pixels()) p = static_cast<std::uint8_t>(p + shift);
    const auto a = hog_descriptor(img, hp);
    const auto b = hog_descriptor(shifted, hp);
    for (std::size_t i = 0; i < a.size(); ++i) hog_shift = std::max(hog_shift, std::abs(a[i] - b[i]));
  }
  return {translate <= kAngleTol && scale <= kAngleTol && cosine <= kAngleTol && hog_shift <= 1e-12,
          fmt::format("max deviation: translation {:.1e} deg, scaling {:.1e} deg, cosine identity {:.1e}, HOG shift {:.1e}",
                      translate, scale, cosine, hog_shift)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && e.path().filename() != "timings.csv") {
      files[fs::relative(e.path(), root).string()] = slurp(e.path());
    }
  }
  return files;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "adavu");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "adavu_acceptance_determinism";
  fs::remove_all(root);
  int compared = 0, differing = 0, failures = 0;
  for (const char* classifier : {"gmm", "svm", "hmm"}) {
    std::map<std::string, std::string> first;
    for (int rep = 0; rep < 2; ++rep) {
      const auto dir = root / fmt::format("{}-{}", classifier, rep);
      // Full-covariance GMMs need d + 1 samples of every posture.
      const bool gmm = std::string(classifier) == "gmm";
      failures += run_cli({"pipeline", "--out", dir.string(), "--classifier", classifier, "--seed", "11", "--set",
                           gmm ? "gen.count=5" : "gen.count=3", "--set",
                           gmm ? "gen.labels=Natta1,Natta2" : "gen.labels=Natta1,Natta3,Natta8", "--set",
                           "noise.joint_jitter=0.01", "--set", "noise.pixel_noise_rate=0.001", "--set",
                           "noise.pixel_noise_amplitude=60", "--set", "noise.beat_jitter=2"}) != 0;
      auto snap = snapshot(dir);
      if (rep == 0) {
        first = std::move(snap);
        continue;
      }
      compared += static_cast<int>(first.size());
      if (snap.size() != first.size()) ++differing;
      for (const auto& [name, body] : first) differing += !snap.count(name) || snap.at(name) != body;
    }
  }
  for (const char* kind : {"clusters", "sequences", "postures"}) {
    std::string model[2];
    for (int rep = 0; rep < 2; ++rep) {
      const auto dir = root / fmt::format("{}-{}", kind, rep);
      failures += run_cli({"gen", "--out", dir.string(), "--kind", kind, "--seed", "3", "--count", "4", "--set",
                           "noise.joint_jitter=0.02", "--set", "gen.clusters=3"}) != 0;
      const bool seq = std::string(kind) == "sequences";
      failures += run_cli({"train", "--classifier", seq ? "hmm" : (std::string(kind) == "clusters" ? "gmm" : "svm"), "--input",
                           (dir / (seq ? "sequences.txt" : "features.csv")).string(), "--model",
                           (dir / "model.json").string()}) != 0;
      model[rep] = slurp(dir / "model.json");
    }
    ++compared;
    differing += model[0].empty() || model[0] != model[1];
  }
  fs::remove_all(root);
  return {failures == 0 && differing == 0 && compared > 0,
          fmt::format("{} files compared across reruns, {} differ, {} commands failed", compared, differing, failures)};
}

Verdict smo_correctness() {
  Eigen::MatrixXd x(4, 2);
  x << 0, 0, 1, 1, 0, 1, 1, 0;
  const std::vector<int> y = {1, 1, -1, -1};
  const auto r = smo_train(x, y, Kernel{KernelType::rbf, 1.0}, 10.0, 10.0, 1e-3, 100000);
  int fitted = 0;
  for (int i = 0; i < 4; ++i) fitted += y[i] * r.model.decision(x.row(i).transpose()) > 0.0;
  double worst = max_kkt_violation(r, x, y);
  // Random binary problems on top of the models trained for the posture check.
  for (int trial = 0; trial < 20; ++trial) {
    const auto data = gen_clusters(3, 4, 2.0, 30, 600 + trial);
    SvmConfig cfg;
    cfg.seed = trial;
    cfg.c = 0.5 + trial;
    std::vector<SmoResult> details;
    const auto model = svm_train_ovr(data, cfg, &details);
    for (std::size_t c = 0; c < details.size(); ++c) {
      std::vector<int> yy;
      for (const auto& l : data.labels) yy.push_back(l == model.classes()[c] ? 1 : -1);
      worst = std::max(worst, max_kkt_violation(details[c], data.features, yy));
    }
  }
  worst = std::max(worst, worst_kkt_seen);
  return {fitted == 4 && worst <= kKkt,
          fmt::format("XOR fitted {}/4; worst KKT violation {:.2e} over every trained binary model", fitted, worst)};
}

}  // namespace
}  // namespace adavu

int main() {
  using namespace adavu;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"HOG dimensionality", hog_dimension},
      {"forward and Viterbi against path enumeration", hmm_oracle},
      {"EM monotonicity", em_monotone},
      {"segmentation round trip", segmentation_round_trip},
      {"posture classifiers on synthetic clusters", posture_classifiers},
      {"Adavu sequence recognition", sequence_recognition},
      {"feature invariances", invariances},
      {"determinism of commands", determinism},
      {"SMO correctness", smo_correctness},
  };
  // SMO correctness reuses models trained by the posture check, so order
  // matters only in that direction.
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !v.pass;
    std::cout << fmt::format("{} criterion {} {}: {} ({:.2f} s)", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                             v.detail, s)
              << std::endl;
  }
  std::cout << fmt::format("{} of {} criteria passed", criteria.size() - failed, criteria.size()) << std::endl;
  return failed;
}
