#include "adavu/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "adavu/error.hpp"
#include "adavu/rng.hpp"

namespace adavu {

namespace {

constexpr double kTau = 1e-12;

}  // namespace

std::string_view to_string(KernelType type) { return type == KernelType::linear ? "linear" : "rbf"; }

KernelType parse_kernel_type(std::string_view text) {
  if (text == "linear") return KernelType::linear;
  if (text == "rbf") return KernelType::rbf;
  throw DomainError("unknown kernel `" + std::string(text) + "`");
}

double rbf_kernel(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                  double sigma) {
  if (!(sigma > 0.0)) throw DomainError("RBF kernel width must be positive");
  if (x.size() != y.size()) throw DomainError("RBF kernel arguments differ in dimension");
  return std::exp(-(x - y).squaredNorm() / (2.0 * sigma * sigma));
}

double Kernel::operator()(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) const {
  if (type == KernelType::linear) {
    if (x.size() != y.size()) throw DomainError("linear kernel arguments differ in dimension");
    return x.dot(y);
  }
  return rbf_kernel(x, y, sigma);
}

double SvmBinaryModel::decision(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  double f = bias;
  for (Eigen::Index i = 0; i < support_vectors.rows(); ++i) {
    f += coefficients[i] * kernel(support_vectors.row(i).transpose(), x);
  }
  return f;
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& x, const Kernel& kernel) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = k(j, i) = kernel(x.row(i).transpose(), x.row(j).transpose());
    }
  }
  return k;
}

SmoResult smo_train(const Eigen::MatrixXd& x, const std::vector<int>& labels, const Kernel& kernel, double c_positive,
                    double c_negative, double tolerance, long max_iterations, const Eigen::MatrixXd& gram) {
  const Eigen::Index n = x.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n) throw DomainError("one label per training sample required");
  if (!(c_positive > 0.0) || !(c_negative > 0.0)) throw DomainError("SVM box bound C must be positive");
  if (!(tolerance > 0.0)) throw DomainError("SMO tolerance must be positive");
  bool has_pos = false, has_neg = false;
  for (const int y : labels) {
    if (y != 1 && y != -1) throw DomainError("binary SVM labels must be +1 or -1");
    has_pos = has_pos || y == 1;
    has_neg = has_neg || y == -1;
  }
  if (!has_pos || !has_neg) throw DomainError("binary SVM needs samples of both signs");

  const Eigen::MatrixXd k_local = gram.size() == 0 ? gram_matrix(x, kernel) : Eigen::MatrixXd();
  const Eigen::MatrixXd& k = gram.size() == 0 ? k_local : gram;
  if (k.rows() != n || k.cols() != n) throw DomainError("Gram matrix shape does not match the samples");

  Eigen::VectorXd y(n), bound(n), alpha = Eigen::VectorXd::Zero(n), grad = Eigen::VectorXd::Constant(n, -1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = labels[static_cast<std::size_t>(i)];
    bound[i] = y[i] > 0 ? c_positive : c_negative;
  }
  auto in_up = [&](Eigen::Index t) { return (y[t] > 0 && alpha[t] < bound[t]) || (y[t] < 0 && alpha[t] > 0); };
  auto in_low = [&](Eigen::Index t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < bound[t]); };

  SmoResult result;
  long iter = 0;
  for (; iter < max_iterations; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (in_up(t) && -y[t] * grad[t] >= gmax) {
        gmax = -y[t] * grad[t];
        i = t;
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    Eigen::Index j = -1;
    double best_obj = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double yg = y[t] * grad[t];
      gmax2 = std::max(gmax2, yg);
      const double grad_diff = gmax + yg;
      if (i >= 0 && grad_diff > 0.0) {
        double quad = k(i, i) + k(t, t) - 2.0 * k(i, t);
        if (quad <= 0.0) quad = kTau;
        const double obj = -(grad_diff * grad_diff) / quad;
        if (obj <= best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    if (i < 0 || j < 0 || gmax + gmax2 < tolerance) {
      result.converged = true;
      break;
    }

    const double qij = y[i] * y[j] * k(i, j);
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    const double ci = bound[i];
    const double cj = bound[j];
    if (y[i] != y[j]) {
      double quad = k(i, i) + k(j, j) + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > ci - cj) {
        if (alpha[i] > ci) {
          alpha[i] = ci;
          alpha[j] = ci - diff;
        }
      } else if (alpha[j] > cj) {
        alpha[j] = cj;
        alpha[i] = cj + diff;
      }
    } else {
      double quad = k(i, i) + k(j, j) - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > ci) {
        if (alpha[i] > ci) {
          alpha[i] = ci;
          alpha[j] = sum - ci;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > cj) {
        if (alpha[j] > cj) {
          alpha[j] = cj;
          alpha[i] = sum - cj;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    for (Eigen::Index t = 0; t < n; ++t) {
      grad[t] += y[t] * (y[i] * k(t, i) * dai + y[j] * k(t, j) * daj);
    }
  }
  result.iterations = iter;

  // Bias from the free vectors, or the middle of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  long free_count = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= bound[t]) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      free_sum += yg;
      ++free_count;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : 0.5 * (ub + lb);

  SvmBinaryModel& model = result.model;
  model.kernel = kernel;
  model.bias = -rho;
  std::vector<Eigen::Index> sv;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (alpha[t] > 0) sv.push_back(t);
  }
  model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), x.cols());
  model.coefficients.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t s = 0; s < sv.size(); ++s) {
    model.support_vectors.row(static_cast<Eigen::Index>(s)) = x.row(sv[s]);
    model.coefficients[static_cast<Eigen::Index>(s)] = alpha[sv[s]] * y[sv[s]];
  }
  result.alpha = alpha;
  result.upper_bound = bound;
  return result;
}

double max_kkt_violation(const SmoResult& result, const Eigen::MatrixXd& x, const std::vector<int>& labels) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double yf = labels[static_cast<std::size_t>(i)] * result.model.decision(x.row(i).transpose());
    const double a = result.alpha[i];
    const double c = result.upper_bound[i];
    double v = 0.0;
    if (a <= 0.0) v = std::max(0.0, 1.0 - yf);
    else if (a >= c) v = std::max(0.0, yf - 1.0);
    else v = std::abs(yf - 1.0);
    worst = std::max(worst, v);
  }
  return worst;
}

double median_pairwise_distance(const Eigen::MatrixXd& x, std::uint64_t seed, Eigen::Index max_points) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) idx[static_cast<std::size_t>(i)] = i;
  if (x.rows() > max_points) {
    // Partial Fisher-Yates shuffle for a seeded subsample.
    Rng rng(seed);
    for (Eigen::Index i = 0; i < max_points; ++i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(i, x.rows() - 1));
      std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
    }
    idx.resize(static_cast<std::size_t>(max_points));
  }
  std::vector<double> d;
  d.reserve(idx.size() * (idx.size() - 1) / 2);
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) d.push_back((x.row(idx[a]) - x.row(idx[b])).norm());
  }
  if (d.empty()) return 1.0;
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  double median = *mid;
  if (d.size() % 2 == 0) median = 0.5 * (median + *std::max_element(d.begin(), mid));
  return median > 0.0 ? median : 1.0;
}

SvmOvrClassifier::SvmOvrClassifier(std::vector<std::string> classes, std::vector<SvmBinaryModel> models,
                                   SvmConfig config)
    : classes_(std::move(classes)), models_(std::move(models)), config_(config) {
  if (classes_.size() < 2 || classes_.size() != models_.size()) {
    throw DomainError("one-vs-rest SVM needs one binary model per class and at least two classes");
  }
  dim_ = models_.front().support_vectors.cols();
  for (const auto& m : models_) {
    if (m.support_vectors.rows() == 0) throw DomainError("binary SVM model without support vectors");
    if (m.support_vectors.cols() != dim_) throw DomainError("binary SVM models differ in dimension");
  }
}

SvmOvrClassifier svm_train_ovr(const LabeledFeatures& data, const SvmConfig& config, std::vector<SmoResult>* details) {
  data.validate();
  const auto classes = distinct_labels(data.labels);
  if (classes.size() < 2) throw DomainError("one-vs-rest SVM needs at least two classes");
  if (!(config.c > 0.0)) throw DomainError("SVM box bound C must be positive");
  Kernel kernel{config.kernel, config.sigma};
  if (kernel.type == KernelType::rbf && !(kernel.sigma > 0.0)) {
    kernel.sigma = median_pairwise_distance(data.features, derive_seed(config.seed, "svm-sigma"));
  }
  const Eigen::MatrixXd gram = gram_matrix(data.features, kernel);
  const auto n = static_cast<double>(data.size());
  std::vector<SvmBinaryModel> models;
  for (const auto& label : classes) {
    std::vector<int> y;
    double n_pos = 0;
    for (const auto& l : data.labels) {
      y.push_back(l == label ? 1 : -1);
      n_pos += l == label;
    }
    double c_pos = config.c, c_neg = config.c;
    if (config.balance_classes) {
      c_pos = config.c * n / (2.0 * n_pos);
      c_neg = config.c * n / (2.0 * (n - n_pos));
    }
    auto res = smo_train(data.features, y, kernel, c_pos, c_neg, config.tolerance, config.max_iterations, gram);
    if (!res.converged) {
      throw NumericError(fmt::format("SMO for class {} did not reach tolerance {} within {} iterations", label,
                                     config.tolerance, config.max_iterations));
    }
    models.push_back(res.model);
    if (details) details->push_back(std::move(res));
  }
  return SvmOvrClassifier(classes, std::move(models), config);
}

Prediction svm_predict(const SvmOvrClassifier& model, const Eigen::VectorXd& x) {
  if (x.size() != model.dim()) {
    throw DomainError(fmt::format("SVM expects {} features, got {}", model.dim(), x.size()));
  }
  Prediction p;
  for (const auto& m : model.models()) p.scores.push_back(m.decision(x));
  p.index = argmax_lowest(p.scores);
  p.label = model.classes()[p.index];
  return p;
}

}  // namespace adavu
