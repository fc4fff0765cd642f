#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "adavu/dataset.hpp"

namespace adavu {

enum class CovarianceType { full, diagonal, spherical, tied };

std::string_view to_string(CovarianceType type);
CovarianceType parse_covariance_type(std::string_view text);

// One weighted Gaussian; the Cholesky factor of the covariance is cached.
class GaussianComponent {
 public:
  // Throws NumericError unless the covariance is symmetric positive definite.
  GaussianComponent(double weight, Eigen::VectorXd mean, Eigen::MatrixXd covariance);

  double weight() const { return weight_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }

  // log N(x; mean, covariance), without the weight.
  double log_density(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  double weight_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd chol_lower_;
  double log_norm_;
};

class GaussianMixture {
 public:
  GaussianMixture() = default;
  explicit GaussianMixture(std::vector<GaussianComponent> components);

  const std::vector<GaussianComponent>& components() const { return components_; }
  Eigen::Index dim() const { return components_.empty() ? 0 : components_.front().mean().size(); }

  // log sum_k w_k N(x; mu_k, Sigma_k), evaluated with log-sum-exp.
  double log_likelihood(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  std::vector<GaussianComponent> components_;
};

struct GmmConfig {
  int components = 1;
  // When positive, the component count is chosen in [1, bic_max_components]
  // by the Bayesian information criterion and `components` is ignored.
  int bic_max_components = 0;
  CovarianceType covariance = CovarianceType::full;
  long max_iterations = 100000;
  // Stop once the relative log-likelihood gain drops below this.
  double tolerance = 1e-8;
  // Added to the diagonal of every covariance estimate.
  double regularization = 1e-6;
  std::uint64_t seed = 0;
};

// Total log-likelihood after every EM iteration of one mixture fit.
struct EmTrace {
  std::string label;
  std::vector<double> objective;
  bool converged = false;
};

// Fits one mixture by EM from k-means++ seeding. `trace` may be null.
GaussianMixture fit_mixture(const Eigen::MatrixXd& data, int components, const GmmConfig& config,
                            std::uint64_t seed, EmTrace* trace = nullptr);

// Number of free parameters of a mixture, used by the BIC.
long mixture_parameter_count(int components, Eigen::Index dim, CovarianceType type);

struct Prediction {
  std::string label;
  std::size_t index = 0;
  // One score per class in class order.
  std::vector<double> scores;
};

class GmmClassifier {
 public:
  GmmClassifier() = default;
  GmmClassifier(std::vector<std::string> classes, std::vector<double> priors, std::vector<GaussianMixture> mixtures,
                GmmConfig config);

  const std::vector<std::string>& classes() const { return classes_; }
  const std::vector<double>& priors() const { return priors_; }
  const std::vector<GaussianMixture>& mixtures() const { return mixtures_; }
  const GmmConfig& config() const { return config_; }
  Eigen::Index dim() const { return dim_; }

  std::size_t class_index(std::string_view label) const;

 private:
  std::vector<std::string> classes_;
  std::vector<double> priors_;
  std::vector<GaussianMixture> mixtures_;
  GmmConfig config_;
  Eigen::Index dim_ = 0;
};

// One mixture per class; priors are the class frequencies. Throws DomainError
// naming a class with fewer than components * (dim + 1) samples.
GmmClassifier gmm_fit(const LabeledFeatures& data, const GmmConfig& config,
                      std::vector<EmTrace>* traces = nullptr);

double gmm_log_likelihood(const GmmClassifier& model, std::string_view label, const Eigen::VectorXd& x);

// Argmax of log prior + class log-likelihood; ties go to the lowest class.
Prediction gmm_predict(const GmmClassifier& model, const Eigen::VectorXd& x);

// Lowest index of the maximum; shared tie rule of every classifier.
std::size_t argmax_lowest(const std::vector<double>& scores);

}  // namespace adavu
