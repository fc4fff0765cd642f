#include "adavu/kmeans.hpp"

#include <limits>

#include "adavu/error.hpp"

namespace adavu {

std::vector<Eigen::Index> kmeans_plus_plus(const Eigen::MatrixXd& data, int k, Rng& rng) {
  const Eigen::Index n = data.rows();
  if (k < 1 || n < 1) throw DomainError("k-means++ needs at least one point and one centre");
  std::vector<Eigen::Index> centers;
  centers.push_back(static_cast<Eigen::Index>(rng.uniform_int(0, n - 1)));
  Eigen::VectorXd d2 = (data.rowwise() - data.row(centers[0])).rowwise().squaredNorm();
  while (static_cast<int>(centers.size()) < k) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (pick = 0; pick < n - 1; ++pick) {
        u -= d2[pick];
        if (u < 0.0) break;
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.uniform_int(0, n - 1));
    }
    centers.push_back(pick);
    d2 = d2.cwiseMin((data.rowwise() - data.row(pick)).rowwise().squaredNorm());
  }
  return centers;
}

int nearest_center(const Eigen::MatrixXd& centers, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    const double d = (centers.row(c) - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

KMeansResult lloyd(const Eigen::MatrixXd& data, Eigen::MatrixXd centers, int max_iterations) {
  const Eigen::Index n = data.rows();
  const Eigen::Index k = centers.rows();
  KMeansResult r;
  r.assignment.assign(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = nearest_center(centers, data.row(i));
      if (c != r.assignment[static_cast<std::size_t>(i)]) {
        r.assignment[static_cast<std::size_t>(i)] = c;
        changed = true;
      }
    }
    if (!changed) break;
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(k, data.cols());
    Eigen::VectorXd count = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      sum.row(r.assignment[static_cast<std::size_t>(i)]) += data.row(i);
      count[r.assignment[static_cast<std::size_t>(i)]] += 1.0;
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      if (count[c] > 0.0) centers.row(c) = sum.row(c) / count[c];
    }
  }
  r.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    r.inertia += (data.row(i) - centers.row(r.assignment[static_cast<std::size_t>(i)])).squaredNorm();
  }
  r.centers = std::move(centers);
  return r;
}

}  // namespace adavu
