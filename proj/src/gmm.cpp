#include "adavu/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "adavu/error.hpp"
#include "adavu/kmeans.hpp"
#include "adavu/rng.hpp"

namespace adavu {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

// k-means++ seeding followed by a hard assignment to the nearest seed.
Eigen::MatrixXd initial_responsibilities(const Eigen::MatrixXd& data, int k, Rng& rng) {
  const Eigen::Index n = data.rows();
  const std::vector<Eigen::Index> centers = kmeans_plus_plus(data, k, rng);
  Eigen::MatrixXd resp = Eigen::MatrixXd::Zero(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      const double d = (data.row(i) - data.row(centers[static_cast<std::size_t>(c)])).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    resp(i, best) = 1.0;
  }
  return resp;
}

GaussianMixture m_step(const Eigen::MatrixXd& data, const Eigen::MatrixXd& resp, const GmmConfig& cfg) {
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  const Eigen::Index k = resp.cols();
  const Eigen::MatrixXd reg = cfg.regularization * Eigen::MatrixXd::Identity(d, d);
  const Eigen::VectorXd global_mean = data.colwise().mean().transpose();

  std::vector<double> weights(static_cast<std::size_t>(k));
  std::vector<Eigen::VectorXd> means(static_cast<std::size_t>(k));
  std::vector<Eigen::MatrixXd> scatter(static_cast<std::size_t>(k));
  const double min_mass = 1e-10 * static_cast<double>(n);
  for (Eigen::Index c = 0; c < k; ++c) {
    const auto ci = static_cast<std::size_t>(c);
    double mass = resp.col(c).sum();
    Eigen::MatrixXd centered;
    if (mass < min_mass) {
      // Collapsed component: restart it at the global statistics.
      means[ci] = global_mean;
      centered = data.rowwise() - global_mean.transpose();
      scatter[ci] = centered.transpose() * centered / static_cast<double>(n);
      mass = min_mass;
    } else {
      means[ci] = (resp.col(c).transpose() * data).transpose() / mass;
      centered = data.rowwise() - means[ci].transpose();
      scatter[ci] = centered.transpose() * resp.col(c).asDiagonal() * centered / mass;
    }
    weights[ci] = mass;
  }
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (auto& w : weights) w /= wsum;

  Eigen::MatrixXd tied = Eigen::MatrixXd::Zero(d, d);
  if (cfg.covariance == CovarianceType::tied) {
    for (Eigen::Index c = 0; c < k; ++c) tied += weights[static_cast<std::size_t>(c)] * scatter[static_cast<std::size_t>(c)];
  }

  std::vector<GaussianComponent> comps;
  for (Eigen::Index c = 0; c < k; ++c) {
    const auto ci = static_cast<std::size_t>(c);
    Eigen::MatrixXd cov;
    switch (cfg.covariance) {
      case CovarianceType::full: cov = scatter[ci]; break;
      case CovarianceType::diagonal: cov = scatter[ci].diagonal().asDiagonal(); break;
      case CovarianceType::spherical:
        cov = (scatter[ci].trace() / static_cast<double>(d)) * Eigen::MatrixXd::Identity(d, d);
        break;
      case CovarianceType::tied: cov = tied; break;
    }
    comps.emplace_back(weights[ci], means[ci], cov + reg);
  }
  return GaussianMixture(std::move(comps));
}

// Fills log responsibilities and returns the total log-likelihood.
double e_step(const Eigen::MatrixXd& data, const GaussianMixture& mix, Eigen::MatrixXd& resp) {
  const Eigen::Index n = data.rows();
  const auto k = static_cast<Eigen::Index>(mix.components().size());
  resp.resize(n, k);
  Eigen::VectorXd log_w(k);
  for (Eigen::Index c = 0; c < k; ++c) log_w[c] = std::log(mix.components()[static_cast<std::size_t>(c)].weight());
  double total = 0.0;
  Eigen::VectorXd row(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < k; ++c) {
      row[c] = log_w[c] + mix.components()[static_cast<std::size_t>(c)].log_density(data.row(i).transpose());
    }
    const double ll = log_sum_exp(row);
    total += ll;
    resp.row(i) = (row.array() - ll).exp().transpose();
  }
  return total;
}

}  // namespace

std::string_view to_string(CovarianceType type) {
  switch (type) {
    case CovarianceType::full: return "full";
    case CovarianceType::diagonal: return "diagonal";
    case CovarianceType::spherical: return "spherical";
    case CovarianceType::tied: return "tied";
  }
  return "?";
}

CovarianceType parse_covariance_type(std::string_view text) {
  for (auto t : {CovarianceType::full, CovarianceType::diagonal, CovarianceType::spherical, CovarianceType::tied}) {
    if (to_string(t) == text) return t;
  }
  throw DomainError("unknown covariance type `" + std::string(text) + "`");
}

GaussianComponent::GaussianComponent(double weight, Eigen::VectorXd mean, Eigen::MatrixXd covariance)
    : weight_(weight), mean_(std::move(mean)), covariance_(std::move(covariance)) {
  if (covariance_.rows() != mean_.size() || covariance_.cols() != mean_.size()) {
    throw DomainError("covariance shape does not match the mean");
  }
  if (!(weight_ > 0.0) || !std::isfinite(weight_)) throw NumericError("mixture weight must be positive");
  covariance_ = 0.5 * (covariance_ + covariance_.transpose()).eval();
  Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
  if (llt.info() != Eigen::Success || !covariance_.allFinite()) {
    throw NumericError("covariance matrix is not positive definite");
  }
  chol_lower_ = llt.matrixL();
  const double log_det = 2.0 * chol_lower_.diagonal().array().log().sum();
  log_norm_ = -0.5 * (static_cast<double>(mean_.size()) * kLog2Pi + log_det);
}

double GaussianComponent::log_density(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Eigen::VectorXd z = chol_lower_.triangularView<Eigen::Lower>().solve(x - mean_);
  return log_norm_ - 0.5 * z.squaredNorm();
}

GaussianMixture::GaussianMixture(std::vector<GaussianComponent> components) : components_(std::move(components)) {
  if (components_.empty()) throw DomainError("a mixture needs at least one component");
  double total = 0.0;
  for (const auto& c : components_) {
    if (c.mean().size() != components_.front().mean().size()) throw DomainError("mixture components differ in dimension");
    total += c.weight();
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError(fmt::format("mixture weights sum to {}", total));
}

double GaussianMixture::log_likelihood(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != dim()) throw DomainError(fmt::format("expected a {}-dimensional point, got {}", dim(), x.size()));
  Eigen::VectorXd terms(static_cast<Eigen::Index>(components_.size()));
  for (std::size_t c = 0; c < components_.size(); ++c) {
    terms[static_cast<Eigen::Index>(c)] = std::log(components_[c].weight()) + components_[c].log_density(x);
  }
  return log_sum_exp(terms);
}

GaussianMixture fit_mixture(const Eigen::MatrixXd& data, int components, const GmmConfig& config,
                            std::uint64_t seed, EmTrace* trace) {
  if (components < 1) throw DomainError("a mixture needs at least one component");
  if (data.rows() < components) throw DomainError("fewer samples than mixture components");
  if (config.regularization <= 0.0) throw DomainError("covariance regularization must be positive");
  Rng rng(seed);
  Eigen::MatrixXd resp = initial_responsibilities(data, components, rng);
  GaussianMixture mix = m_step(data, resp, config);
  double prev = -std::numeric_limits<double>::infinity();
  bool converged = false;
  for (long it = 0;; ++it) {
    const double ll = e_step(data, mix, resp);
    if (!std::isfinite(ll)) throw NumericError("EM log-likelihood became non-finite");
    if (trace) trace->objective.push_back(ll);
    if (it > 0 && ll - prev < config.tolerance * std::abs(prev)) {
      converged = true;
      break;
    }
    if (it >= config.max_iterations) break;
    prev = ll;
    mix = m_step(data, resp, config);
  }
  if (trace) trace->converged = converged;
  return mix;
}

long mixture_parameter_count(int components, Eigen::Index dim, CovarianceType type) {
  const long k = components;
  const long d = dim;
  long cov = 0;
  switch (type) {
    case CovarianceType::full: cov = k * d * (d + 1) / 2; break;
    case CovarianceType::diagonal: cov = k * d; break;
    case CovarianceType::spherical: cov = k; break;
    case CovarianceType::tied: cov = d * (d + 1) / 2; break;
  }
  return (k - 1) + k * d + cov;
}

GmmClassifier::GmmClassifier(std::vector<std::string> classes, std::vector<double> priors,
                             std::vector<GaussianMixture> mixtures, GmmConfig config)
    : classes_(std::move(classes)), priors_(std::move(priors)), mixtures_(std::move(mixtures)), config_(config) {
  if (classes_.empty() || classes_.size() != priors_.size() || classes_.size() != mixtures_.size()) {
    throw DomainError("GMM classifier needs one prior and one mixture per class");
  }
  dim_ = mixtures_.front().dim();
  for (const auto& m : mixtures_) {
    if (m.dim() != dim_) throw DomainError("class mixtures differ in dimension");
  }
  const double total = std::accumulate(priors_.begin(), priors_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) throw DomainError(fmt::format("class priors sum to {}", total));
}

std::size_t GmmClassifier::class_index(std::string_view label) const {
  const auto it = std::find(classes_.begin(), classes_.end(), label);
  if (it == classes_.end()) throw DomainError("unknown class `" + std::string(label) + "`");
  return static_cast<std::size_t>(it - classes_.begin());
}

GmmClassifier gmm_fit(const LabeledFeatures& data, const GmmConfig& config, std::vector<EmTrace>* traces) {
  data.validate();
  if (data.size() == 0) throw DomainError("cannot fit a GMM to an empty dataset");
  if (config.components < 1) throw DomainError("GMM needs at least one component per class");
  const auto classes = distinct_labels(data.labels);
  const Eigen::Index d = data.dim();
  std::vector<double> priors;
  std::vector<GaussianMixture> mixtures;
  for (const auto& label : classes) {
    const Eigen::MatrixXd rows = rows_of_class(data, label);
    const auto n = rows.rows();
    const std::uint64_t seed = derive_seed(config.seed, label);
    auto required = [d](int k) { return static_cast<Eigen::Index>(k) * (d + 1); };

    int k = config.components;
    if (config.bic_max_components > 0) {
      double best_bic = std::numeric_limits<double>::infinity();
      k = 0;
      for (int cand = 1; cand <= config.bic_max_components && n >= required(cand); ++cand) {
        const auto mix = fit_mixture(rows, cand, config, seed);
        double ll = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) ll += mix.log_likelihood(rows.row(i).transpose());
        const double bic = -2.0 * ll + static_cast<double>(mixture_parameter_count(cand, d, config.covariance)) *
                                           std::log(static_cast<double>(n));
        if (bic < best_bic) {
          best_bic = bic;
          k = cand;
        }
      }
      if (k == 0) k = 1;
    }
    if (n < required(k)) {
      throw DomainError(fmt::format("class {} has {} samples; {} component(s) in {} dimensions need at least {}",
                                    label, n, k, d, required(k)));
    }
    EmTrace trace;
    trace.label = label;
    mixtures.push_back(fit_mixture(rows, k, config, seed, traces ? &trace : nullptr));
    if (traces) traces->push_back(std::move(trace));
    priors.push_back(static_cast<double>(n) / static_cast<double>(data.size()));
  }
  return GmmClassifier(classes, std::move(priors), std::move(mixtures), config);
}

double gmm_log_likelihood(const GmmClassifier& model, std::string_view label, const Eigen::VectorXd& x) {
  return model.mixtures()[model.class_index(label)].log_likelihood(x);
}

std::size_t argmax_lowest(const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

Prediction gmm_predict(const GmmClassifier& model, const Eigen::VectorXd& x) {
  if (x.size() != model.dim()) {
    throw DomainError(fmt::format("GMM expects {} features, got {}", model.dim(), x.size()));
  }
  Prediction p;
  for (std::size_t c = 0; c < model.classes().size(); ++c) {
    p.scores.push_back(std::log(model.priors()[c]) + model.mixtures()[c].log_likelihood(x));
  }
  p.index = argmax_lowest(p.scores);
  p.label = model.classes()[p.index];
  return p;
}

}  // namespace adavu
