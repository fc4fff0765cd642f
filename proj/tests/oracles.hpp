#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "adavu/dataset.hpp"
#include "adavu/hmm.hpp"
#include "adavu/rng.hpp"

namespace adavu::oracle {

inline GaussianHmm random_hmm(Rng& rng, int states, int dim) {
  GaussianHmm h;
  h.label = "random";
  h.pi.resize(states);
  h.transition.resize(states, states);
  h.means.resize(states, dim);
  h.variances.resize(states, dim);
  for (int i = 0; i < states; ++i) {
    h.pi[i] = rng.uniform(0.05, 1.0);
    for (int j = 0; j < states; ++j) h.transition(i, j) = rng.uniform(0.05, 1.0);
    h.transition.row(i) /= h.transition.row(i).sum();
    for (int k = 0; k < dim; ++k) {
      h.means(i, k) = rng.uniform(-2.0, 2.0);
      h.variances(i, k) = rng.uniform(0.2, 2.0);
    }
  }
  h.pi /= h.pi.sum();
  return h;
}

inline Eigen::MatrixXd random_observations(Rng& rng, int length, int dim) {
  Eigen::MatrixXd o(length, dim);
  for (int t = 0; t < length; ++t)
    for (int k = 0; k < dim; ++k) o(t, k) = rng.uniform(-3.0, 3.0);
  return o;
}

inline double log_gaussian_diag(const Eigen::RowVectorXd& x, const Eigen::RowVectorXd& mean,
                                const Eigen::RowVectorXd& var) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double r = x[k] - mean[k];
    s += -0.5 * std::log(2.0 * std::numbers::pi * var[k]) - 0.5 * r * r / var[k];
  }
  return s;
}

struct PathSearch {
  double log_likelihood = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  double second = -std::numeric_limits<double>::infinity();
  std::vector<int> best_path;
};

// Visits every one of the S^T state paths.
inline PathSearch enumerate_paths(const GaussianHmm& h, const Eigen::MatrixXd& obs) {
  const int s = static_cast<int>(h.states());
  const int t_len = static_cast<int>(obs.rows());
  std::vector<double> path_scores;
  PathSearch r;
  std::vector<int> path(static_cast<std::size_t>(t_len), 0);
  while (true) {
    double lp = std::log(h.pi[path[0]]) + log_gaussian_diag(obs.row(0), h.means.row(path[0]), h.variances.row(path[0]));
    for (int t = 1; t < t_len; ++t) {
      lp += std::log(h.transition(path[t - 1], path[t])) +
            log_gaussian_diag(obs.row(t), h.means.row(path[t]), h.variances.row(path[t]));
    }
    path_scores.push_back(lp);
    if (lp > r.best) {
      r.second = r.best;
      r.best = lp;
      r.best_path = path;
    } else if (lp > r.second) {
      r.second = lp;
    }
    int t = t_len - 1;
    while (t >= 0 && path[t] == s - 1) path[t--] = 0;
    if (t < 0) break;
    ++path[t];
  }
  double sum = 0.0;
  for (const double v : path_scores) sum += std::exp(v - r.best);
  r.log_likelihood = r.best + std::log(sum);
  return r;
}

inline bool close_relative(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

// Accuracy of assigning each test row to the class with the nearest training
// mean.
inline double nearest_mean_accuracy(const LabeledFeatures& train, const LabeledFeatures& test) {
  const auto classes = distinct_labels(train.labels);
  std::vector<Eigen::RowVectorXd> means;
  for (const auto& c : classes) means.push_back(rows_of_class(train, c).colwise().mean());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const double d = (test.features.row(static_cast<Eigen::Index>(i)) - means[c]).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    correct += classes[best] == test.labels[i];
  }
  return test.size() == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace adavu::oracle
