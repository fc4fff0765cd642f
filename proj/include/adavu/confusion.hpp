#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "adavu/dataset.hpp"
#include "adavu/gmm.hpp"
#include "adavu/hmm.hpp"
#include "adavu/svm.hpp"

namespace adavu {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

struct ErrorCell {
  std::string predicted;
  std::int64_t count = 0;
  double percent = 0.0;
};

// Counts indexed by (actual, predicted).
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<std::string> classes);
  // Throws DomainError for a non-square matrix, a size mismatch or negative
  // counts.
  static ConfusionMatrix from_counts(std::vector<std::string> classes, CountMatrix counts);

  const std::vector<std::string>& classes() const { return classes_; }
  const CountMatrix& counts() const { return counts_; }
  std::size_t index(std::string_view label) const;

  void add(std::string_view actual, std::string_view predicted);

  std::int64_t row_total(std::size_t actual) const;
  std::int64_t col_total(std::size_t predicted) const;
  std::int64_t total() const;
  std::int64_t correct() const;
  // trace / total; 1.0 for an empty matrix.
  double accuracy() const;

  // Diagonal entry as a percentage of the row, truncated to one decimal.
  double self_percent(std::size_t actual) const;
  // Off-diagonal cells of a row holding at least `threshold_percent` of it
  // (any non-zero cell for a threshold of 0), largest first.
  std::vector<ErrorCell> error_cells(std::size_t actual, double threshold_percent) const;

 private:
  std::vector<std::string> classes_;
  CountMatrix counts_;
};

// Class / Self / Error / Total listing, one row per actual class.
std::string format_confusion_table(const ConfusionMatrix& matrix, double threshold_percent = 5.0);
// Full count grid with row and column totals.
std::string format_confusion_grid(const ConfusionMatrix& matrix);

// Header `actual,<class>,...`, one row of counts per actual class.
void write_confusion_csv(const std::string& path, const ConfusionMatrix& matrix);
ConfusionMatrix read_confusion_csv(const std::string& path);

// Per-sample outcome of an evaluation.
struct Outcome {
  std::string source;
  std::string actual;
  std::string predicted;
};

// Classifies every test sample. Test labels unknown to the model are appended
// to the class list so their rows still count. Throws DomainError on a
// dimension mismatch.
ConfusionMatrix evaluate(const GmmClassifier& model, const LabeledFeatures& test, std::vector<Outcome>* outcomes = nullptr);
ConfusionMatrix evaluate(const SvmOvrClassifier& model, const LabeledFeatures& test,
                         std::vector<Outcome>* outcomes = nullptr);
ConfusionMatrix evaluate(const AdavuBank& bank, std::span<const ObservationSequence> test,
                         std::vector<Outcome>* outcomes = nullptr);

}  // namespace adavu
