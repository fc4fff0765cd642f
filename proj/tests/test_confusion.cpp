#include <gtest/gtest.h>

#include "adavu/confusion.hpp"
#include "adavu/datagen.hpp"
#include "adavu/error.hpp"
#include "adavu/gmm.hpp"
#include "test_support.hpp"

namespace adavu {
namespace {

std::vector<std::string> natta_labels() {
  std::vector<std::string> l;
  for (int i = 1; i <= 8; ++i) l.push_back("Natta" + std::to_string(i));
  return l;
}

// Seven test sequences per Adavu, three of Natta1 taken for Natta2.
ConfusionMatrix sequence_result() {
  CountMatrix c = CountMatrix::Zero(8, 8);
  for (int i = 0; i < 8; ++i) c(i, i) = 7;
  c(0, 0) = 4;
  c(0, 1) = 3;
  return ConfusionMatrix::from_counts(natta_labels(), c);
}

TEST(Confusion, SequenceTableFromStoredCounts) {
  const auto m = sequence_result();
  EXPECT_DOUBLE_EQ(m.self_percent(0), 57.1);
  EXPECT_DOUBLE_EQ(m.self_percent(1), 100.0);
  EXPECT_EQ(m.correct(), 53);
  EXPECT_EQ(m.total(), 56);
  EXPECT_NEAR(m.accuracy(), 0.9464, 5e-5);
  const auto errors = m.error_cells(0, 5.0);
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0].predicted, "Natta2");
  EXPECT_EQ(errors[0].count, 3);
  EXPECT_DOUBLE_EQ(errors[0].percent, 42.8);
  const auto table = format_confusion_table(m);
  EXPECT_NE(table.find("57.1"), std::string::npos);
  EXPECT_NE(table.find("(42.8, Natta2)"), std::string::npos);
}

TEST(Confusion, PercentagesAreTruncated) {
  CountMatrix c(2, 2);
  c << 72, 8, 75, 5;
  const auto m = ConfusionMatrix::from_counts({"A", "B"}, c);
  EXPECT_DOUBLE_EQ(m.self_percent(0), 90.0);
  EXPECT_DOUBLE_EQ(m.self_percent(1), 6.2);  // 6.25 would round up
  EXPECT_DOUBLE_EQ(m.error_cells(0, 5.0)[0].percent, 10.0);
}

TEST(Confusion, ErrorCellThreshold) {
  CountMatrix c(3, 3);
  c << 90, 6, 4, 0, 10, 0, 0, 0, 0;
  const auto m = ConfusionMatrix::from_counts({"A", "B", "C"}, c);
  const auto at5 = m.error_cells(0, 5.0);
  ASSERT_EQ(at5.size(), 1u);
  EXPECT_EQ(at5[0].predicted, "B");
  const auto all = m.error_cells(0, 0.0);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].predicted, "B");
  EXPECT_EQ(all[1].predicted, "C");
  EXPECT_TRUE(m.error_cells(2, 0.0).empty());
  EXPECT_DOUBLE_EQ(m.self_percent(2), 0.0);
}

TEST(Confusion, EmptyMatrixHasUnitAccuracy) {
  EXPECT_DOUBLE_EQ(ConfusionMatrix({"A", "B"}).accuracy(), 1.0);
  EXPECT_DOUBLE_EQ(ConfusionMatrix().accuracy(), 1.0);
}

TEST(Confusion, RejectsBadInput) {
  EXPECT_THROW(ConfusionMatrix({"A", "A"}), DomainError);
  EXPECT_THROW(ConfusionMatrix::from_counts({"A", "B"}, CountMatrix::Zero(3, 3)), DomainError);
  EXPECT_THROW(ConfusionMatrix::from_counts({"A"}, CountMatrix::Constant(1, 1, -1)), DomainError);
  ConfusionMatrix m({"A"});
  EXPECT_THROW(m.add("A", "Z"), DomainError);
}

TEST(Confusion, CsvRoundTrip) {
  const testing::TempDir dir;
  const auto m = sequence_result();
  write_confusion_csv(dir.file("c.csv"), m);
  const auto back = read_confusion_csv(dir.file("c.csv"));
  EXPECT_EQ(back.classes(), m.classes());
  EXPECT_TRUE((back.counts().array() == m.counts().array()).all());
  testing::write_text(dir.file("bad.csv"), "actual,A\nA,x\n");
  EXPECT_THROW(read_confusion_csv(dir.file("bad.csv")), ParseError);
}

TEST(Confusion, GridHasTotals) {
  const auto grid = format_confusion_grid(sequence_result());
  EXPECT_NE(grid.find("Total"), std::string::npos);
  EXPECT_NE(grid.find("56"), std::string::npos);
}

TEST(Evaluate, ConstantClassifierOnBalancedDataIsHalfRight) {
  const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  Eigen::VectorXd far(1);
  far << 1e3;
  // Class B sits so far away that every test point goes to A.
  const GmmClassifier model({"A", "B"}, {0.5, 0.5},
                            {GaussianMixture({GaussianComponent(1.0, Eigen::VectorXd::Zero(1), one)}),
                             GaussianMixture({GaussianComponent(1.0, far, one)})},
                            GmmConfig{});
  LabeledFeatures test;
  test.features = Eigen::MatrixXd::Zero(10, 1);
  test.columns = {"x"};
  for (int i = 0; i < 10; ++i) {
    test.labels.push_back(i % 2 ? "B" : "A");
    test.sources.push_back(std::to_string(i));
  }
  std::vector<Outcome> outcomes;
  const auto m = evaluate(model, test, &outcomes);
  EXPECT_DOUBLE_EQ(m.accuracy(), 0.5);
  ASSERT_EQ(outcomes.size(), 10u);
  EXPECT_EQ(outcomes[1].actual, "B");
  EXPECT_EQ(outcomes[1].predicted, "A");
}

TEST(Evaluate, UnknownTestLabelsStillCount) {
  const auto data = gen_clusters(2, 2, 8.0, 20, 3);
  const auto model = gmm_fit(data, GmmConfig{});
  LabeledFeatures test = data;
  test.labels[0] = "Z";
  const auto m = evaluate(model, test);
  EXPECT_EQ(m.classes().back(), "Z");
  EXPECT_EQ(m.total(), 40);
  EXPECT_EQ(m.row_total(m.index("Z")), 1);
}

TEST(Evaluate, DimensionMismatch) {
  const auto model = gmm_fit(gen_clusters(2, 2, 8.0, 20, 3), GmmConfig{});
  EXPECT_THROW(evaluate(model, gen_clusters(2, 3, 8.0, 5, 3)), DomainError);
}

}  // namespace
}  // namespace adavu
