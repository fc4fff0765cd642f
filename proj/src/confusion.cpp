#include "adavu/confusion.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "adavu/csv.hpp"
#include "adavu/error.hpp"

namespace adavu {

namespace {

// floor(1000 c / n) / 10 computed exactly.
double truncated_percent(std::int64_t c, std::int64_t n) {
  if (n == 0) return 0.0;
  return static_cast<double>(c * 1000 / n) / 10.0;
}

std::vector<std::string> evaluation_classes(const std::vector<std::string>& model_classes,
                                            const std::vector<std::string>& labels) {
  std::vector<std::string> classes = model_classes;
  std::set<std::string> known(classes.begin(), classes.end());
  std::set<std::string> extra;
  for (const auto& l : labels) {
    if (!known.count(l)) extra.insert(l);
  }
  classes.insert(classes.end(), extra.begin(), extra.end());
  return classes;
}

template <typename Predict>
ConfusionMatrix evaluate_features(const std::vector<std::string>& model_classes, Eigen::Index dim,
                                  const LabeledFeatures& test, std::vector<Outcome>* outcomes, Predict predict) {
  test.validate();
  if (test.size() > 0 && test.dim() != dim) {
    throw DomainError(fmt::format("model expects {} features, test set has {}", dim, test.dim()));
  }
  ConfusionMatrix m(evaluation_classes(model_classes, test.labels));
  for (std::size_t i = 0; i < test.size(); ++i) {
    const Prediction p = predict(test.features.row(static_cast<Eigen::Index>(i)).transpose());
    m.add(test.labels[i], p.label);
    if (outcomes) {
      outcomes->push_back({test.sources.empty() ? std::to_string(i) : test.sources[i], test.labels[i], p.label});
    }
  }
  return m;
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> classes) : classes_(std::move(classes)) {
  std::set<std::string> seen;
  for (const auto& c : classes_) {
    if (!seen.insert(c).second) throw DomainError("confusion matrix repeats class `" + c + "`");
  }
  const auto n = static_cast<Eigen::Index>(classes_.size());
  counts_ = CountMatrix::Zero(n, n);
}

ConfusionMatrix ConfusionMatrix::from_counts(std::vector<std::string> classes, CountMatrix counts) {
  ConfusionMatrix m(std::move(classes));
  if (counts.rows() != counts.cols() || counts.rows() != m.counts_.rows()) {
    throw DomainError(fmt::format("count matrix {}x{} does not fit {} classes", counts.rows(), counts.cols(),
                                  m.classes_.size()));
  }
  if ((counts.array() < 0).any()) throw DomainError("confusion counts must be non-negative");
  m.counts_ = std::move(counts);
  return m;
}

std::size_t ConfusionMatrix::index(std::string_view label) const {
  const auto it = std::find(classes_.begin(), classes_.end(), label);
  if (it == classes_.end()) throw DomainError("class `" + std::string(label) + "` is not in the confusion matrix");
  return static_cast<std::size_t>(it - classes_.begin());
}

void ConfusionMatrix::add(std::string_view actual, std::string_view predicted) {
  counts_(static_cast<Eigen::Index>(index(actual)), static_cast<Eigen::Index>(index(predicted))) += 1;
}

std::int64_t ConfusionMatrix::row_total(std::size_t actual) const {
  return counts_.row(static_cast<Eigen::Index>(actual)).sum();
}

std::int64_t ConfusionMatrix::col_total(std::size_t predicted) const {
  return counts_.col(static_cast<Eigen::Index>(predicted)).sum();
}

std::int64_t ConfusionMatrix::total() const { return counts_.sum(); }

std::int64_t ConfusionMatrix::correct() const { return counts_.diagonal().sum(); }

double ConfusionMatrix::accuracy() const {
  const auto n = total();
  return n == 0 ? 1.0 : static_cast<double>(correct()) / static_cast<double>(n);
}

double ConfusionMatrix::self_percent(std::size_t actual) const {
  const auto i = static_cast<Eigen::Index>(actual);
  return truncated_percent(counts_(i, i), row_total(actual));
}

std::vector<ErrorCell> ConfusionMatrix::error_cells(std::size_t actual, double threshold_percent) const {
  const auto i = static_cast<Eigen::Index>(actual);
  const auto n = row_total(actual);
  std::vector<ErrorCell> cells;
  for (Eigen::Index j = 0; j < counts_.cols(); ++j) {
    const auto c = counts_(i, j);
    if (j == i || c == 0) continue;
    if (100.0 * static_cast<double>(c) < threshold_percent * static_cast<double>(n)) continue;
    cells.push_back({classes_[static_cast<std::size_t>(j)], c, truncated_percent(c, n)});
  }
  std::stable_sort(cells.begin(), cells.end(), [](const ErrorCell& a, const ErrorCell& b) { return a.count > b.count; });
  return cells;
}

std::string format_confusion_table(const ConfusionMatrix& matrix, double threshold_percent) {
  std::vector<std::string> errors;
  std::size_t class_w = 5, error_w = 5;
  for (std::size_t i = 0; i < matrix.classes().size(); ++i) {
    std::string e;
    for (const auto& cell : matrix.error_cells(i, threshold_percent)) {
      if (!e.empty()) e += ", ";
      e += fmt::format("({:.1f}, {})", cell.percent, cell.predicted);
    }
    error_w = std::max(error_w, e.size());
    class_w = std::max(class_w, matrix.classes()[i].size());
    errors.push_back(std::move(e));
  }
  std::string out = fmt::format("{:<{}}  {:>5}  {:<{}}  {:>7}\n", "Class", class_w, "Self", "Error", error_w, "Total");
  for (std::size_t i = 0; i < matrix.classes().size(); ++i) {
    out += fmt::format("{:<{}}  {:>5.1f}  {:<{}}  {:>7}\n", matrix.classes()[i], class_w, matrix.self_percent(i),
                       errors[i], error_w, matrix.row_total(i));
  }
  out += fmt::format("accuracy {}/{} = {:.4f}\n", matrix.correct(), matrix.total(), matrix.accuracy());
  return out;
}

std::string format_confusion_grid(const ConfusionMatrix& matrix) {
  const auto& classes = matrix.classes();
  std::size_t w = 5;
  for (const auto& c : classes) w = std::max(w, c.size());
  for (std::size_t i = 0; i < classes.size(); ++i) w = std::max(w, std::to_string(matrix.row_total(i)).size());
  std::string out = fmt::format("{:<{}}", "", w);
  for (const auto& c : classes) out += fmt::format(" {:>{}}", c, w);
  out += fmt::format(" {:>{}}\n", "Total", w);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    out += fmt::format("{:<{}}", classes[i], w);
    for (std::size_t j = 0; j < classes.size(); ++j) {
      out += fmt::format(" {:>{}}", matrix.counts()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), w);
    }
    out += fmt::format(" {:>{}}\n", matrix.row_total(i), w);
  }
  out += fmt::format("{:<{}}", "Total", w);
  for (std::size_t j = 0; j < classes.size(); ++j) out += fmt::format(" {:>{}}", matrix.col_total(j), w);
  out += fmt::format(" {:>{}}\n", matrix.total(), w);
  return out;
}

void write_confusion_csv(const std::string& path, const ConfusionMatrix& matrix) {
  auto out = csv::open_for_write(path);
  out << "actual";
  for (const auto& c : matrix.classes()) out << ',' << c;
  out << '\n';
  for (std::size_t i = 0; i < matrix.classes().size(); ++i) {
    out << matrix.classes()[i];
    for (Eigen::Index j = 0; j < matrix.counts().cols(); ++j) out << ',' << matrix.counts()(static_cast<Eigen::Index>(i), j);
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

ConfusionMatrix read_confusion_csv(const std::string& path) {
  csv::Reader reader(path);
  const auto header = reader.header();
  if (header.empty() || header[0] != "actual") reader.fail("confusion matrix header must start with `actual`");
  std::vector<std::string> classes(header.begin() + 1, header.end());
  const auto n = static_cast<Eigen::Index>(classes.size());
  CountMatrix counts = CountMatrix::Zero(n, n);
  std::vector<std::string> f;
  Eigen::Index row = 0;
  while (reader.next(f)) {
    if (row >= n) reader.fail("more rows than classes");
    if (static_cast<Eigen::Index>(f.size()) != n + 1) reader.fail(fmt::format("expected {} fields, got {}", n + 1, f.size()));
    if (f[0] != classes[static_cast<std::size_t>(row)]) {
      reader.fail(fmt::format("row `{}` where `{}` was expected", f[0], classes[static_cast<std::size_t>(row)]));
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      counts(row, j) = reader.to_int(f[static_cast<std::size_t>(j) + 1], "count");
      if (counts(row, j) < 0) reader.fail("negative count");
    }
    ++row;
  }
  if (row != n) throw ParseError(path, reader.line(), fmt::format("{} rows for {} classes", row, n));
  return ConfusionMatrix::from_counts(std::move(classes), std::move(counts));
}

ConfusionMatrix evaluate(const GmmClassifier& model, const LabeledFeatures& test, std::vector<Outcome>* outcomes) {
  return evaluate_features(model.classes(), model.dim(), test, outcomes,
                           [&](const Eigen::VectorXd& x) { return gmm_predict(model, x); });
}

ConfusionMatrix evaluate(const SvmOvrClassifier& model, const LabeledFeatures& test, std::vector<Outcome>* outcomes) {
  return evaluate_features(model.classes(), model.dim(), test, outcomes,
                           [&](const Eigen::VectorXd& x) { return svm_predict(model, x); });
}

ConfusionMatrix evaluate(const AdavuBank& bank, std::span<const ObservationSequence> test,
                         std::vector<Outcome>* outcomes) {
  bank.validate();
  std::vector<std::string> labels;
  for (const auto& seq : test) {
    if (seq.label.empty()) throw DomainError("test sequence `" + seq.source + "` has no label");
    if (seq.dim() != bank.dim()) {
      throw DomainError(fmt::format("bank expects {}-dimensional observations, `{}` has {}", bank.dim(), seq.source,
                                    seq.dim()));
    }
    labels.push_back(seq.label);
  }
  ConfusionMatrix m(evaluation_classes(bank.labels(), labels));
  for (const auto& seq : test) {
    const Prediction p = classify(bank, seq.observations);
    m.add(seq.label, p.label);
    if (outcomes) outcomes->push_back({seq.source, seq.label, p.label});
  }
  return m;
}

}  // namespace adavu
