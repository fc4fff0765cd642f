#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace adavu {

// Labelled feature matrix, one sample per row.
struct LabeledFeatures {
  Eigen::MatrixXd features;
  std::vector<std::string> labels;
  // Name of each feature column.
  std::vector<std::string> columns;
  // Provenance of each sample (performance and frame, generator index, ...).
  std::vector<std::string> sources;

  std::size_t size() const { return labels.size(); }
  Eigen::Index dim() const { return features.cols(); }

  // Throws DomainError when row, label, column and source counts disagree.
  void validate() const;
};

// Distinct labels in sorted order.
std::vector<std::string> distinct_labels(std::span<const std::string> labels);

// Rows of one class, in dataset order.
Eigen::MatrixXd rows_of_class(const LabeledFeatures& data, const std::string& label);

LabeledFeatures select_rows(const LabeledFeatures& data, std::span<const std::size_t> rows);

// Per class, the last round(test_fraction * n_c) samples (at least one when
// the class has two or more) go to the test split.
void train_test_split(const LabeledFeatures& data, double test_fraction, LabeledFeatures& train,
                      LabeledFeatures& test);

// Header `source,label,<column names>`; doubles are written in shortest
// round-trip form.
void write_feature_table(const std::string& path, const LabeledFeatures& data);
LabeledFeatures read_feature_table(const std::string& path);

// Ordered observations of one performance, one row per K-frame range.
struct ObservationSequence {
  std::string source;
  // Ground-truth class; empty when unknown.
  std::string label;
  Eigen::MatrixXd observations;
  // Optional Key Posture id of each observation.
  std::vector<std::string> postures;

  Eigen::Index length() const { return observations.rows(); }
  Eigen::Index dim() const { return observations.cols(); }
};

// One observation per comma-separated line, blank line between sequences.
// `#label: <id>` sets the ground truth of the sequence that follows,
// `#source: <id>` its provenance and `#postures: C02,C01,...` its per-row
// posture ids. Other `#` lines are comments.
void write_sequences(const std::string& path, std::span<const ObservationSequence> sequences);
std::vector<ObservationSequence> read_sequences(const std::string& path);

}  // namespace adavu
