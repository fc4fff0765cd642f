#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "adavu/dataset.hpp"
#include "adavu/gmm.hpp"

namespace adavu {

enum class KernelType { linear, rbf };

std::string_view to_string(KernelType type);
KernelType parse_kernel_type(std::string_view text);

// exp(-|x - y|^2 / (2 sigma^2)). Throws DomainError for sigma <= 0 or a
// dimension mismatch.
double rbf_kernel(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                  double sigma);

struct Kernel {
  KernelType type = KernelType::rbf;
  double sigma = 1.0;

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) const;
};

// f(x) = sum_i coef_i K(s_i, x) + bias with coef_i = alpha_i y_i.
struct SvmBinaryModel {
  Kernel kernel;
  Eigen::MatrixXd support_vectors;
  Eigen::VectorXd coefficients;
  double bias = 0.0;

  double decision(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

struct SmoResult {
  SvmBinaryModel model;
  // Dual variable of every training sample.
  Eigen::VectorXd alpha;
  // Box bound of every training sample.
  Eigen::VectorXd upper_bound;
  long iterations = 0;
  bool converged = false;
};

// Soft-margin dual solved by sequential minimal optimisation with
// second-order working-set selection. Stops once the maximal KKT violation
// falls to `tolerance`. `labels` holds +1 / -1. `gram` is the kernel matrix
// of `x` (computed when empty).
SmoResult smo_train(const Eigen::MatrixXd& x, const std::vector<int>& labels, const Kernel& kernel, double c_positive,
                    double c_negative, double tolerance, long max_iterations, const Eigen::MatrixXd& gram = {});

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& x, const Kernel& kernel);

// Largest KKT violation of a dual solution, measured on y_i f(x_i) as
// computed from the stored model.
double max_kkt_violation(const SmoResult& result, const Eigen::MatrixXd& x, const std::vector<int>& labels);

// Median Euclidean distance between distinct pairs of at most `max_points`
// rows drawn with `seed`; 1.0 when every distance is zero.
double median_pairwise_distance(const Eigen::MatrixXd& x, std::uint64_t seed, Eigen::Index max_points = 1000);

struct SvmConfig {
  double c = 1.0;
  KernelType kernel = KernelType::rbf;
  // Non-positive selects the median pairwise distance.
  double sigma = 0.0;
  double tolerance = 1e-3;
  long max_iterations = 10000000;
  // Scale the box bound of each side by n / (2 n_side).
  bool balance_classes = false;
  std::uint64_t seed = 0;
};

class SvmOvrClassifier {
 public:
  SvmOvrClassifier() = default;
  SvmOvrClassifier(std::vector<std::string> classes, std::vector<SvmBinaryModel> models, SvmConfig config);

  const std::vector<std::string>& classes() const { return classes_; }
  const std::vector<SvmBinaryModel>& models() const { return models_; }
  const SvmConfig& config() const { return config_; }
  Eigen::Index dim() const { return dim_; }

 private:
  std::vector<std::string> classes_;
  std::vector<SvmBinaryModel> models_;
  SvmConfig config_;
  Eigen::Index dim_ = 0;
};

// One class-vs-rest model per class. Throws DomainError for fewer than two
// classes. `details` receives the per-class dual solutions when non-null.
SvmOvrClassifier svm_train_ovr(const LabeledFeatures& data, const SvmConfig& config,
                               std::vector<SmoResult>* details = nullptr);

// Argmax of the decision values; ties go to the lowest class.
Prediction svm_predict(const SvmOvrClassifier& model, const Eigen::VectorXd& x);

}  // namespace adavu
