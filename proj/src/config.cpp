#include "adavu/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>

#include <fmt/format.h>

#include "adavu/csv.hpp"
#include "adavu/error.hpp"
#include "adavu/rng.hpp"

namespace adavu {

namespace {

std::int64_t parse_int(const std::string& key, const std::string& text) {
  std::int64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw DomainError(fmt::format("{}: `{}` is not an integer", key, text));
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw DomainError(fmt::format("{}: `{}` is not an unsigned integer", key, text));
  return v;
}

double parse_real(const std::string& key, const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
    throw DomainError(fmt::format("{}: `{}` is not a finite number", key, text));
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw DomainError(fmt::format("{}: `{}` is not a boolean", key, text));
}

int parse_small(const std::string& key, const std::string& text) {
  const auto v = parse_int(key, text);
  if (v < -1000000000 || v > 1000000000) throw DomainError(fmt::format("{}: {} is out of range", key, v));
  return static_cast<int>(v);
}

using Setter = std::function<void(PipelineConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"run.seed", [](auto& c, auto& k, auto& v) { c.seed = parse_uint(k, v); }},
      {"motion.th_pix", [](auto& c, auto& k, auto& v) { c.motion.th_pix = parse_small(k, v); }},
      {"motion.th_frm", [](auto& c, auto& k, auto& v) { c.motion.th_frm = parse_int(k, v); }},
      {"motion.merge_gaps", [](auto& c, auto& k, auto& v) { c.motion.merge_gaps = parse_bool(k, v); }},
      {"motion.min_gap", [](auto& c, auto& k, auto& v) { c.motion.min_gap = parse_int(k, v); }},
      {"hog.cell_size", [](auto& c, auto& k, auto& v) { c.hog.cell_size = parse_small(k, v); }},
      {"hog.block_size", [](auto& c, auto& k, auto& v) { c.hog.block_size = parse_small(k, v); }},
      {"hog.block_overlap", [](auto& c, auto& k, auto& v) { c.hog.block_overlap = parse_small(k, v); }},
      {"hog.num_bins", [](auto& c, auto& k, auto& v) { c.hog.num_bins = parse_small(k, v); }},
      {"hog.image_height", [](auto& c, auto& k, auto& v) { c.hog.image_height = parse_small(k, v); }},
      {"hog.image_width", [](auto& c, auto& k, auto& v) { c.hog.image_width = parse_small(k, v); }},
      {"gmm.components", [](auto& c, auto& k, auto& v) { c.gmm.components = parse_small(k, v); }},
      {"gmm.bic_max_components", [](auto& c, auto& k, auto& v) { c.gmm.bic_max_components = parse_small(k, v); }},
      {"gmm.covariance", [](auto& c, auto&, auto& v) { c.gmm.covariance = parse_covariance_type(v); }},
      {"gmm.max_iterations", [](auto& c, auto& k, auto& v) { c.gmm.max_iterations = parse_int(k, v); }},
      {"gmm.tolerance", [](auto& c, auto& k, auto& v) { c.gmm.tolerance = parse_real(k, v); }},
      {"gmm.regularization", [](auto& c, auto& k, auto& v) { c.gmm.regularization = parse_real(k, v); }},
      {"svm.c", [](auto& c, auto& k, auto& v) { c.svm.c = parse_real(k, v); }},
      {"svm.kernel", [](auto& c, auto&, auto& v) { c.svm.kernel = parse_kernel_type(v); }},
      {"svm.sigma", [](auto& c, auto& k, auto& v) { c.svm.sigma = parse_real(k, v); }},
      {"svm.tolerance", [](auto& c, auto& k, auto& v) { c.svm.tolerance = parse_real(k, v); }},
      {"svm.max_iterations", [](auto& c, auto& k, auto& v) { c.svm.max_iterations = parse_int(k, v); }},
      {"svm.balance_classes", [](auto& c, auto& k, auto& v) { c.svm.balance_classes = parse_bool(k, v); }},
      {"hmm.n_states", [](auto& c, auto& k, auto& v) { c.hmm.n_states = parse_small(k, v); }},
      {"hmm.max_iterations", [](auto& c, auto& k, auto& v) { c.hmm.max_iterations = parse_int(k, v); }},
      {"hmm.tolerance", [](auto& c, auto& k, auto& v) { c.hmm.tolerance = parse_real(k, v); }},
      {"hmm.variance_floor", [](auto& c, auto& k, auto& v) { c.hmm.variance_floor = parse_real(k, v); }},
      {"hmm.kmeans_restarts", [](auto& c, auto& k, auto& v) { c.hmm.kmeans_restarts = parse_small(k, v); }},
      {"noise.joint_jitter", [](auto& c, auto& k, auto& v) { c.noise.joint_jitter = parse_real(k, v); }},
      {"noise.pixel_noise_rate", [](auto& c, auto& k, auto& v) { c.noise.pixel_noise_rate = parse_real(k, v); }},
      {"noise.pixel_noise_amplitude",
       [](auto& c, auto& k, auto& v) { c.noise.pixel_noise_amplitude = parse_small(k, v); }},
      {"noise.beat_jitter", [](auto& c, auto& k, auto& v) { c.noise.beat_jitter = parse_int(k, v); }},
      {"gen.kind", [](auto& c, auto&, auto& v) { c.gen.kind = parse_gen_kind(v); }},
      {"gen.labels",
       [](auto& c, auto&, auto& v) {
         c.gen.labels.clear();
         for (const auto& f : csv::split(v)) {
           if (!f.empty()) c.gen.labels.push_back(f);
         }
       }},
      {"gen.count", [](auto& c, auto& k, auto& v) { c.gen.count = parse_small(k, v); }},
      {"gen.tempo_frames", [](auto& c, auto& k, auto& v) { c.gen.tempo_frames = parse_int(k, v); }},
      {"gen.hold_fraction", [](auto& c, auto& k, auto& v) { c.gen.hold_fraction = parse_real(k, v); }},
      {"gen.clusters", [](auto& c, auto& k, auto& v) { c.gen.clusters = parse_small(k, v); }},
      {"gen.dim", [](auto& c, auto& k, auto& v) { c.gen.dim = parse_small(k, v); }},
      {"gen.separation", [](auto& c, auto& k, auto& v) { c.gen.separation = parse_real(k, v); }},
      {"gen.samples", [](auto& c, auto& k, auto& v) { c.gen.samples = parse_small(k, v); }},
      {"features.kind", [](auto& c, auto&, auto& v) { c.features = parse_feature_kind(v); }},
      {"train.classifier", [](auto& c, auto&, auto& v) { c.classifier = parse_classifier_kind(v); }},
      {"train.test_fraction", [](auto& c, auto& k, auto& v) { c.test_fraction = parse_real(k, v); }},
      {"evaluate.error_threshold", [](auto& c, auto& k, auto& v) { c.error_threshold = parse_real(k, v); }},
  };
  return table;
}

}  // namespace

std::string_view to_string(GenKind kind) {
  switch (kind) {
    case GenKind::performances: return "performances";
    case GenKind::clusters: return "clusters";
    case GenKind::sequences: return "sequences";
    case GenKind::postures: return "postures";
  }
  return "performances";
}

std::string_view to_string(FeatureKind kind) { return kind == FeatureKind::hog ? "hog" : "angles"; }

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::gmm: return "gmm";
    case ClassifierKind::svm: return "svm";
    case ClassifierKind::hmm: return "hmm";
  }
  return "gmm";
}

GenKind parse_gen_kind(std::string_view text) {
  if (text == "performances") return GenKind::performances;
  if (text == "clusters") return GenKind::clusters;
  if (text == "sequences") return GenKind::sequences;
  if (text == "postures") return GenKind::postures;
  throw DomainError(fmt::format("unknown dataset kind `{}` (performances, clusters, sequences, postures)", text));
}

FeatureKind parse_feature_kind(std::string_view text) {
  if (text == "angles") return FeatureKind::angles;
  if (text == "hog") return FeatureKind::hog;
  throw DomainError(fmt::format("unknown feature kind `{}` (angles, hog)", text));
}

ClassifierKind parse_classifier_kind(std::string_view text) {
  if (text == "gmm") return ClassifierKind::gmm;
  if (text == "svm") return ClassifierKind::svm;
  if (text == "hmm" || text == "hmm-bank") return ClassifierKind::hmm;
  throw DomainError(fmt::format("unknown classifier `{}` (gmm, svm, hmm)", text));
}

ConfigValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path + " for reading");
  ConfigValues values;
  std::string section;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = raw;
    // A comment marker at the start or after whitespace ends the line.
    for (std::size_t i = 0; i < text.size(); ++i) {
      if ((text[i] == '#' || text[i] == ';') && (i == 0 || text[i - 1] == ' ' || text[i - 1] == '\t')) {
        text = text.substr(0, i);
        break;
      }
    }
    text = csv::trim(text);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']' || text.size() < 3) throw ParseError(path, line, "malformed section header");
      section = std::string(csv::trim(text.substr(1, text.size() - 2)));
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError(path, line, "expected `key = value`");
    const auto key = csv::trim(text.substr(0, eq));
    if (key.empty()) throw ParseError(path, line, "empty key");
    if (section.empty()) throw ParseError(path, line, "key outside of any section");
    values[section + "." + std::string(key)] = std::string(csv::trim(text.substr(eq + 1)));
  }
  return values;
}

void apply_override(ConfigValues& values, std::string_view assignment) {
  const auto eq = assignment.find('=');
  const auto key = csv::trim(assignment.substr(0, eq));
  if (eq == std::string_view::npos || key.find('.') == std::string_view::npos) {
    throw DomainError(fmt::format("override `{}` must read section.key=value", assignment));
  }
  values[std::string(key)] = std::string(csv::trim(assignment.substr(eq + 1)));
}

PipelineConfig build_config(const ConfigValues& values) {
  PipelineConfig c;
  const auto& table = setters();
  for (const auto& [key, value] : values) {
    if (key.rfind("hmm.states.", 0) == 0 && key.size() > 11) {
      c.hmm.states_per_label[key.substr(11)] = parse_small(key, value);
      continue;
    }
    const auto it = table.find(key);
    if (it == table.end()) throw DomainError(fmt::format("unknown configuration key `{}`", key));
    it->second(c, key, value);
  }
  c.gmm.seed = derive_seed(c.seed, "gmm");
  c.svm.seed = derive_seed(c.seed, "svm");
  c.hmm.seed = derive_seed(c.seed, "hmm");
  c.noise.seed = derive_seed(c.seed, "gen");
  c.motion.validate();
  c.hog.validate();
  c.noise.validate();
  if (c.gen.count < 0) throw DomainError("gen.count must be non-negative");
  if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0)) throw DomainError("train.test_fraction must lie in (0, 1)");
  if (c.error_threshold < 0.0 || c.error_threshold > 100.0) {
    throw DomainError("evaluate.error_threshold must lie in [0, 100]");
  }
  return c;
}

std::vector<std::pair<std::string, std::string>> config_entries(const PipelineConfig& c) {
  const auto d = [](double v) { return csv::format_double(v); };
  std::vector<std::pair<std::string, std::string>> e = {
      {"evaluate.error_threshold", d(c.error_threshold)},
      {"features.kind", std::string(to_string(c.features))},
      {"gen.clusters", std::to_string(c.gen.clusters)},
      {"gen.count", std::to_string(c.gen.count)},
      {"gen.dim", std::to_string(c.gen.dim)},
      {"gen.hold_fraction", d(c.gen.hold_fraction)},
      {"gen.kind", std::string(to_string(c.gen.kind))},
      {"gen.labels", fmt::format("{}", fmt::join(c.gen.labels, ";"))},
      {"gen.samples", std::to_string(c.gen.samples)},
      {"gen.separation", d(c.gen.separation)},
      {"gen.tempo_frames", std::to_string(c.gen.tempo_frames)},
      {"gmm.bic_max_components", std::to_string(c.gmm.bic_max_components)},
      {"gmm.components", std::to_string(c.gmm.components)},
      {"gmm.covariance", std::string(to_string(c.gmm.covariance))},
      {"gmm.max_iterations", std::to_string(c.gmm.max_iterations)},
      {"gmm.regularization", d(c.gmm.regularization)},
      {"gmm.tolerance", d(c.gmm.tolerance)},
      {"hmm.kmeans_restarts", std::to_string(c.hmm.kmeans_restarts)},
      {"hmm.max_iterations", std::to_string(c.hmm.max_iterations)},
      {"hmm.n_states", std::to_string(c.hmm.n_states)},
  };
  for (const auto& [label, n] : c.hmm.states_per_label) e.emplace_back("hmm.states." + label, std::to_string(n));
  const std::vector<std::pair<std::string, std::string>> rest = {
      {"hmm.tolerance", d(c.hmm.tolerance)},
      {"hmm.variance_floor", d(c.hmm.variance_floor)},
      {"hog.block_overlap", std::to_string(c.hog.block_overlap)},
      {"hog.block_size", std::to_string(c.hog.block_size)},
      {"hog.cell_size", std::to_string(c.hog.cell_size)},
      {"hog.image_height", std::to_string(c.hog.image_height)},
      {"hog.image_width", std::to_string(c.hog.image_width)},
      {"hog.num_bins", std::to_string(c.hog.num_bins)},
      {"motion.merge_gaps", c.motion.merge_gaps ? "true" : "false"},
      {"motion.min_gap", std::to_string(c.motion.min_gap)},
      {"motion.th_frm", std::to_string(c.motion.th_frm)},
      {"motion.th_pix", std::to_string(c.motion.th_pix)},
      {"noise.beat_jitter", std::to_string(c.noise.beat_jitter)},
      {"noise.joint_jitter", d(c.noise.joint_jitter)},
      {"noise.pixel_noise_amplitude", std::to_string(c.noise.pixel_noise_amplitude)},
      {"noise.pixel_noise_rate", d(c.noise.pixel_noise_rate)},
      {"run.seed", std::to_string(c.seed)},
      {"svm.balance_classes", c.svm.balance_classes ? "true" : "false"},
      {"svm.c", d(c.svm.c)},
      {"svm.kernel", std::string(to_string(c.svm.kernel))},
      {"svm.max_iterations", std::to_string(c.svm.max_iterations)},
      {"svm.sigma", d(c.svm.sigma)},
      {"svm.tolerance", d(c.svm.tolerance)},
      {"train.classifier", std::string(to_string(c.classifier))},
      {"train.test_fraction", d(c.test_fraction)},
  };
  e.insert(e.end(), rest.begin(), rest.end());
  return e;
}

}  // namespace adavu
