#include "adavu/model_io.hpp"

#include <fstream>
#include <iterator>

#include <fmt/format.h>
#include <json.hpp>

#include "adavu/csv.hpp"
#include "adavu/error.hpp"

namespace adavu {

namespace {

using Json = nlohmann::ordered_json;

Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vector_json(m.row(r).transpose()));
  return a;
}

Json doubles_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (const double x : v) a.push_back(x);
  return a;
}

struct Reader {
  std::string path;

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(path, 0, message); }

  const Json& at(const Json& j, const char* key) const {
    if (!j.is_object() || !j.contains(key)) fail(fmt::format("missing field `{}`", key));
    return j.at(key);
  }

  double number(const Json& j, const char* what) const {
    if (!j.is_number()) fail(fmt::format("`{}` must be a number", what));
    return j.get<double>();
  }

  std::string text(const Json& j, const char* what) const {
    if (!j.is_string()) fail(fmt::format("`{}` must be a string", what));
    return j.get<std::string>();
  }

  Eigen::VectorXd vector(const Json& j, const char* what) const {
    if (!j.is_array()) fail(fmt::format("`{}` must be an array", what));
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], what);
    return v;
  }

  Eigen::MatrixXd matrix(const Json& j, const char* what) const {
    if (!j.is_array()) fail(fmt::format("`{}` must be an array of rows", what));
    if (j.empty()) return {};
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
      const auto row = vector(j[r], what);
      if (row.size() != cols) fail(fmt::format("`{}` has rows of unequal length", what));
      m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return m;
  }

  std::vector<std::string> strings(const Json& j, const char* what) const {
    if (!j.is_array()) fail(fmt::format("`{}` must be an array", what));
    std::vector<std::string> out;
    for (const auto& e : j) out.push_back(text(e, what));
    return out;
  }
};

Json header(ModelKind kind, Eigen::Index dim, const std::vector<std::string>& classes, std::uint64_t seed) {
  Json j;
  j["format"] = "adavu-model";
  j["version"] = kModelFormatVersion;
  j["kind"] = std::string(to_string(kind));
  j["dim"] = dim;
  j["classes"] = classes;
  j["seed"] = seed;
  return j;
}

void write_json(const std::string& path, const Json& j) {
  auto out = csv::open_for_write(path);
  out << j.dump(1) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path + " for reading");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i) line += text[i] == '\n';
    throw ParseError(path, line, "malformed model file");
  }
}

// Checks the container header and returns the document.
Json open_model(const std::string& path, ModelKind expected) {
  Reader r{path};
  Json j = read_json(path);
  if (!j.is_object() || !j.contains("format") || j["format"] != "adavu-model") r.fail("not an adavu model file");
  if (r.number(r.at(j, "version"), "version") != kModelFormatVersion) {
    r.fail(fmt::format("unsupported model format version {}", j["version"].dump()));
  }
  const auto kind = r.text(r.at(j, "kind"), "kind");
  if (kind != to_string(expected)) {
    r.fail(fmt::format("model kind is `{}`, expected `{}`", kind, to_string(expected)));
  }
  return j;
}

std::uint64_t read_seed(const Reader& r, const Json& j) {
  const auto& s = r.at(j, "seed");
  if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) r.fail("`seed` must be unsigned");
  return s.get<std::uint64_t>();
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::gmm: return "gmm";
    case ModelKind::svm: return "svm";
    case ModelKind::hmm_bank: return "hmm-bank";
  }
  return "gmm";
}

ModelKind read_model_kind(const std::string& path) {
  Reader r{path};
  const Json j = read_json(path);
  if (!j.is_object() || !j.contains("format") || j["format"] != "adavu-model") r.fail("not an adavu model file");
  if (r.number(r.at(j, "version"), "version") != kModelFormatVersion) {
    r.fail(fmt::format("unsupported model format version {}", j["version"].dump()));
  }
  const auto kind = r.text(r.at(j, "kind"), "kind");
  if (kind == "gmm") return ModelKind::gmm;
  if (kind == "svm") return ModelKind::svm;
  if (kind == "hmm-bank") return ModelKind::hmm_bank;
  r.fail("unknown model kind `" + kind + "`");
}

void save_model(const std::string& path, const GmmClassifier& model) {
  const auto& cfg = model.config();
  Json j = header(ModelKind::gmm, model.dim(), model.classes(), cfg.seed);
  j["config"] = {{"components", cfg.components},
                 {"bic_max_components", cfg.bic_max_components},
                 {"covariance", std::string(to_string(cfg.covariance))},
                 {"max_iterations", cfg.max_iterations},
                 {"tolerance", cfg.tolerance},
                 {"regularization", cfg.regularization}};
  Json mixtures = Json::array();
  for (const auto& mix : model.mixtures()) {
    Json comps = Json::array();
    for (const auto& c : mix.components()) {
      comps.push_back({{"weight", c.weight()}, {"mean", vector_json(c.mean())}, {"covariance", matrix_json(c.covariance())}});
    }
    mixtures.push_back(std::move(comps));
  }
  j["payload"] = {{"priors", doubles_json(model.priors())}, {"mixtures", std::move(mixtures)}};
  write_json(path, j);
}

void save_model(const std::string& path, const SvmOvrClassifier& model) {
  const auto& cfg = model.config();
  Json j = header(ModelKind::svm, model.dim(), model.classes(), cfg.seed);
  j["config"] = {{"c", cfg.c},
                 {"kernel", std::string(to_string(cfg.kernel))},
                 {"sigma", cfg.sigma},
                 {"tolerance", cfg.tolerance},
                 {"max_iterations", cfg.max_iterations},
                 {"balance_classes", cfg.balance_classes}};
  Json models = Json::array();
  for (const auto& m : model.models()) {
    models.push_back({{"kernel", std::string(to_string(m.kernel.type))},
                      {"sigma", m.kernel.sigma},
                      {"bias", m.bias},
                      {"coefficients", vector_json(m.coefficients)},
                      {"support_vectors", matrix_json(m.support_vectors)}});
  }
  j["payload"] = {{"models", std::move(models)}};
  write_json(path, j);
}

void save_model(const std::string& path, const AdavuBank& bank, const HmmConfig& config) {
  bank.validate();
  Json j = header(ModelKind::hmm_bank, bank.dim(), bank.labels(), config.seed);
  Json per_label = Json::object();
  for (const auto& [label, n] : config.states_per_label) per_label[label] = n;
  j["config"] = {{"n_states", config.n_states},
                 {"states_per_label", std::move(per_label)},
                 {"max_iterations", config.max_iterations},
                 {"tolerance", config.tolerance},
                 {"variance_floor", config.variance_floor},
                 {"kmeans_restarts", config.kmeans_restarts}};
  Json models = Json::array();
  for (const auto& m : bank.models) {
    models.push_back({{"label", m.label},
                      {"states", m.states()},
                      {"pi", vector_json(m.pi)},
                      {"transition", matrix_json(m.transition)},
                      {"means", matrix_json(m.means)},
                      {"variances", matrix_json(m.variances)}});
  }
  j["payload"] = {{"models", std::move(models)}};
  write_json(path, j);
}

GmmClassifier load_gmm(const std::string& path) {
  const Json j = open_model(path, ModelKind::gmm);
  Reader r{path};
  const auto classes = r.strings(r.at(j, "classes"), "classes");
  const auto dim = static_cast<Eigen::Index>(r.number(r.at(j, "dim"), "dim"));
  const Json& c = r.at(j, "config");
  GmmConfig cfg;
  cfg.components = static_cast<int>(r.number(r.at(c, "components"), "components"));
  cfg.bic_max_components = static_cast<int>(r.number(r.at(c, "bic_max_components"), "bic_max_components"));
  cfg.covariance = parse_covariance_type(r.text(r.at(c, "covariance"), "covariance"));
  cfg.max_iterations = static_cast<long>(r.number(r.at(c, "max_iterations"), "max_iterations"));
  cfg.tolerance = r.number(r.at(c, "tolerance"), "tolerance");
  cfg.regularization = r.number(r.at(c, "regularization"), "regularization");
  cfg.seed = read_seed(r, j);
  const Json& p = r.at(j, "payload");
  const Eigen::VectorXd priors_v = r.vector(r.at(p, "priors"), "priors");
  const Json& mixtures_j = r.at(p, "mixtures");
  if (!mixtures_j.is_array() || mixtures_j.size() != classes.size() ||
      static_cast<std::size_t>(priors_v.size()) != classes.size()) {
    r.fail("one prior and one mixture per class required");
  }
  std::vector<GaussianMixture> mixtures;
  try {
    for (const auto& mj : mixtures_j) {
      std::vector<GaussianComponent> comps;
      if (!mj.is_array()) r.fail("mixture must be an array of components");
      for (const auto& cj : mj) {
        Eigen::VectorXd mean = r.vector(r.at(cj, "mean"), "mean");
        Eigen::MatrixXd cov = r.matrix(r.at(cj, "covariance"), "covariance");
        if (mean.size() != dim || cov.rows() != dim || cov.cols() != dim) r.fail("component dimension mismatch");
        comps.emplace_back(r.number(r.at(cj, "weight"), "weight"), std::move(mean), std::move(cov));
      }
      mixtures.emplace_back(std::move(comps));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    r.fail(e.what());
  }
  std::vector<double> priors(priors_v.data(), priors_v.data() + priors_v.size());
  return GmmClassifier(classes, std::move(priors), std::move(mixtures), cfg);
}

SvmOvrClassifier load_svm(const std::string& path) {
  const Json j = open_model(path, ModelKind::svm);
  Reader r{path};
  const auto classes = r.strings(r.at(j, "classes"), "classes");
  const auto dim = static_cast<Eigen::Index>(r.number(r.at(j, "dim"), "dim"));
  const Json& c = r.at(j, "config");
  SvmConfig cfg;
  cfg.c = r.number(r.at(c, "c"), "c");
  cfg.kernel = parse_kernel_type(r.text(r.at(c, "kernel"), "kernel"));
  cfg.sigma = r.number(r.at(c, "sigma"), "sigma");
  cfg.tolerance = r.number(r.at(c, "tolerance"), "tolerance");
  cfg.max_iterations = static_cast<long>(r.number(r.at(c, "max_iterations"), "max_iterations"));
  if (!r.at(c, "balance_classes").is_boolean()) r.fail("`balance_classes` must be a boolean");
  cfg.balance_classes = c.at("balance_classes").get<bool>();
  cfg.seed = read_seed(r, j);
  const Json& models_j = r.at(r.at(j, "payload"), "models");
  if (!models_j.is_array() || models_j.size() != classes.size()) r.fail("one binary model per class required");
  std::vector<SvmBinaryModel> models;
  for (const auto& mj : models_j) {
    SvmBinaryModel m;
    m.kernel.type = parse_kernel_type(r.text(r.at(mj, "kernel"), "kernel"));
    m.kernel.sigma = r.number(r.at(mj, "sigma"), "sigma");
    m.bias = r.number(r.at(mj, "bias"), "bias");
    m.coefficients = r.vector(r.at(mj, "coefficients"), "coefficients");
    m.support_vectors = r.matrix(r.at(mj, "support_vectors"), "support_vectors");
    if (m.support_vectors.rows() != m.coefficients.size() || m.support_vectors.cols() != dim) {
      r.fail("support vectors do not match the coefficients or the model dimension");
    }
    models.push_back(std::move(m));
  }
  try {
    return SvmOvrClassifier(classes, std::move(models), cfg);
  } catch (const Error& e) {
    r.fail(e.what());
  }
}

AdavuBank load_bank(const std::string& path) {
  const Json j = open_model(path, ModelKind::hmm_bank);
  Reader r{path};
  const auto classes = r.strings(r.at(j, "classes"), "classes");
  const Json& models_j = r.at(r.at(j, "payload"), "models");
  if (!models_j.is_array() || models_j.size() != classes.size()) r.fail("one HMM per label required");
  AdavuBank bank;
  for (const auto& mj : models_j) {
    GaussianHmm m;
    m.label = r.text(r.at(mj, "label"), "label");
    m.pi = r.vector(r.at(mj, "pi"), "pi");
    m.transition = r.matrix(r.at(mj, "transition"), "transition");
    m.means = r.matrix(r.at(mj, "means"), "means");
    m.variances = r.matrix(r.at(mj, "variances"), "variances");
    bank.models.push_back(std::move(m));
  }
  try {
    bank.validate();
  } catch (const Error& e) {
    r.fail(e.what());
  }
  if (bank.labels() != classes) r.fail("model labels disagree with the class list");
  if (bank.dim() != static_cast<Eigen::Index>(r.number(r.at(j, "dim"), "dim"))) r.fail("model dimension mismatch");
  return bank;
}

}  // namespace adavu
