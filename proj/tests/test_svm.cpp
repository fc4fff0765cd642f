#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "adavu/datagen.hpp"
#include "adavu/error.hpp"
#include "adavu/rng.hpp"
#include "adavu/svm.hpp"

namespace adavu {
namespace {

Eigen::MatrixXd random_points(Rng& rng, int n, int d, double scale = 1.0) {
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = scale * rng.normal();
  return x;
}

TEST(RbfKernel, ClosedFormValues) {
  Eigen::VectorXd x(2), y(2);
  x << 1.0, 2.0;
  EXPECT_DOUBLE_EQ(rbf_kernel(x, x, 0.7), 1.0);
  const double sigma = 1.3;
  y = x;
  y[0] += std::sqrt(2.0) * sigma;
  EXPECT_NEAR(rbf_kernel(x, y, sigma), std::exp(-1.0), 1e-15);
  EXPECT_THROW(rbf_kernel(x, y, 0.0), DomainError);
  EXPECT_THROW(rbf_kernel(x, Eigen::VectorXd::Zero(3), 1.0), DomainError);
}

TEST(RbfKernel, ValuesLieInUnitInterval) {
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::MatrixXd p = random_points(rng, 2, 3, 3.0);
    const double k = rbf_kernel(p.row(0).transpose(), p.row(1).transpose(), rng.uniform(0.1, 5.0));
    ASSERT_GE(k, 0.0);
    ASSERT_LE(k, 1.0);
  }
}

TEST(GramMatrix, SymmetricPositiveSemidefinite) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd x = random_points(rng, 30, 4);
    const Eigen::MatrixXd k = gram_matrix(x, Kernel{KernelType::rbf, rng.uniform(0.3, 3.0)});
    ASSERT_LT((k - k.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
    ASSERT_GT(es.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(Smo, XorWithRbfFitsAllFourPoints) {
  Eigen::MatrixXd x(4, 2);
  x << 0, 0, 1, 1, 0, 1, 1, 0;
  const std::vector<int> y = {1, 1, -1, -1};
  const Kernel k{KernelType::rbf, 1.0};
  const auto r = smo_train(x, y, k, 10.0, 10.0, 1e-3, 100000);
  ASSERT_TRUE(r.converged);
  for (int i = 0; i < 4; ++i) EXPECT_GT(y[i] * r.model.decision(x.row(i).transpose()), 0.0) << i;
  EXPECT_LE(max_kkt_violation(r, x, y), 1e-3);
}

TEST(Smo, LinearlySeparableClustersWithLinearKernel) {
  Rng rng(21);
  const int n = 60;
  Eigen::MatrixXd x(n, 2);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    y[i] = i < n / 2 ? 1 : -1;
    x(i, 0) = 3.0 * y[i] + 0.5 * rng.normal();
    x(i, 1) = rng.normal();
  }
  const auto r = smo_train(x, y, Kernel{KernelType::linear, 1.0}, 1.0, 1.0, 1e-3, 100000);
  for (int i = 0; i < n; ++i) ASSERT_GT(y[i] * r.model.decision(x.row(i).transpose()), 0.0);
  EXPECT_LE(max_kkt_violation(r, x, y), 1e-3);
}

TEST(Smo, DualFeasibilityAndKktOnRandomProblems) {
  for (int trial = 0; trial < 30; ++trial) {
    Rng rng(300 + trial);
    const int n = static_cast<int>(rng.uniform_int(10, 60));
    const Eigen::MatrixXd x = random_points(rng, n, 3);
    std::vector<int> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) y[i] = (x(i, 0) * x(i, 1) + 0.3 * rng.normal()) > 0 ? 1 : -1;
    y[0] = 1;
    y[1] = -1;
    const double c = rng.uniform(0.1, 20.0);
    const auto r = smo_train(x, y, Kernel{KernelType::rbf, rng.uniform(0.5, 2.0)}, c, c, 1e-3, 1000000);
    ASSERT_TRUE(r.converged);
    double balance = 0.0;
    for (int i = 0; i < n; ++i) {
      ASSERT_GE(r.alpha[i], 0.0);
      ASSERT_LE(r.alpha[i], c + 1e-12);
      balance += r.alpha[i] * y[i];
    }
    ASSERT_NEAR(balance, 0.0, 1e-9);
    ASSERT_LE(max_kkt_violation(r, x, y), 1e-3) << "trial " << trial;
  }
}

TEST(Smo, LabelValidation) {
  Eigen::MatrixXd x(2, 1);
  x << 0, 1;
  EXPECT_THROW(smo_train(x, {1, 1}, Kernel{}, 1, 1, 1e-3, 100), DomainError);
  EXPECT_THROW(smo_train(x, {1, 2}, Kernel{}, 1, 1, 1e-3, 100), DomainError);
}

TEST(MedianDistance, SmallExactCase) {
  Eigen::MatrixXd x(3, 1);
  x << 0, 1, 3;
  EXPECT_DOUBLE_EQ(median_pairwise_distance(x, 1), 2.0);
  EXPECT_DOUBLE_EQ(median_pairwise_distance(Eigen::MatrixXd::Zero(4, 2), 1), 1.0);
}

TEST(SvmOvr, OneModelPerClassAndDeepPointsWin) {
  const auto data = gen_clusters(4, 6, 8.0, 40, 2);
  SvmConfig cfg;
  cfg.seed = 5;
  std::vector<SmoResult> details;
  const auto model = svm_train_ovr(data, cfg, &details);
  ASSERT_EQ(model.models().size(), 4u);
  for (std::size_t c = 0; c < 4; ++c) {
    const Eigen::VectorXd centre = rows_of_class(data, model.classes()[c]).colwise().mean().transpose();
    const auto p = svm_predict(model, centre);
    EXPECT_EQ(p.label, model.classes()[c]);
    EXPECT_GT(p.scores[c], 0.0);
    EXPECT_EQ(p.scores.size(), 4u);
    EXPECT_LE(max_kkt_violation(details[c], data.features, [&] {
                std::vector<int> y;
                for (const auto& l : data.labels) y.push_back(l == model.classes()[c] ? 1 : -1);
                return y;
              }()),
              1e-3);
  }
}

TEST(SvmOvr, TieGoesToLowestClass) {
  SvmBinaryModel m;
  m.kernel = Kernel{KernelType::rbf, 1.0};
  m.support_vectors = Eigen::MatrixXd::Zero(1, 2);
  m.coefficients = Eigen::VectorXd::Ones(1);
  const SvmOvrClassifier model({"A", "B"}, {m, m}, SvmConfig{});
  EXPECT_EQ(svm_predict(model, Eigen::VectorXd::Zero(2)).label, "A");
}

TEST(SvmOvr, NeedsTwoClasses) {
  auto data = gen_clusters(2, 2, 1.0, 10, 1);
  std::fill(data.labels.begin(), data.labels.end(), "C01");
  EXPECT_THROW(svm_train_ovr(data, SvmConfig{}), DomainError);
}

TEST(SvmOvr, DimensionMismatchOnPredict) {
  const auto data = gen_clusters(2, 3, 5.0, 10, 1);
  const auto model = svm_train_ovr(data, SvmConfig{});
  EXPECT_THROW(svm_predict(model, Eigen::VectorXd::Zero(4)), DomainError);
}

}  // namespace
}  // namespace adavu
