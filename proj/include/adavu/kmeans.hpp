#pragma once

#include <vector>

#include <Eigen/Core>

#include "adavu/rng.hpp"

namespace adavu {

// k-means++ seeding: row indices of `k` data points, each drawn with
// probability proportional to its squared distance from the nearest earlier
// pick.
std::vector<Eigen::Index> kmeans_plus_plus(const Eigen::MatrixXd& data, int k, Rng& rng);

struct KMeansResult {
  Eigen::MatrixXd centers;  // k x d
  std::vector<int> assignment;
  double inertia = 0.0;     // sum of squared distances to the assigned centre
};

// Index of the nearest centre, lowest index on ties.
int nearest_center(const Eigen::MatrixXd& centers, const Eigen::Ref<const Eigen::RowVectorXd>& x);

// Lloyd iterations from `centers` until the assignment stops changing. A
// centre that loses all its points stays where it was.
KMeansResult lloyd(const Eigen::MatrixXd& data, Eigen::MatrixXd centers, int max_iterations = 100);

}  // namespace adavu
