#include "adavu/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>

#include <fmt/format.h>

#include "adavu/csv.hpp"
#include "adavu/error.hpp"

namespace adavu {

void LabeledFeatures::validate() const {
  const auto n = static_cast<std::size_t>(features.rows());
  if (labels.size() != n) throw DomainError(fmt::format("{} labels for {} feature rows", labels.size(), n));
  if (!columns.empty() && columns.size() != static_cast<std::size_t>(features.cols())) {
    throw DomainError(fmt::format("{} column names for {} feature columns", columns.size(), features.cols()));
  }
  if (!sources.empty() && sources.size() != n) {
    throw DomainError(fmt::format("{} sources for {} feature rows", sources.size(), n));
  }
  if (!features.allFinite()) throw DomainError("feature matrix contains non-finite values");
}

std::vector<std::string> distinct_labels(std::span<const std::string> labels) {
  std::set<std::string> s(labels.begin(), labels.end());
  return {s.begin(), s.end()};
}

Eigen::MatrixXd rows_of_class(const LabeledFeatures& data, const std::string& label) {
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    if (data.labels[i] == label) rows.push_back(static_cast<Eigen::Index>(i));
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), data.features.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = data.features.row(rows[r]);
  return out;
}

LabeledFeatures select_rows(const LabeledFeatures& data, std::span<const std::size_t> rows) {
  LabeledFeatures out;
  out.columns = data.columns;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), data.features.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.features.row(static_cast<Eigen::Index>(r)) = data.features.row(static_cast<Eigen::Index>(rows[r]));
    out.labels.push_back(data.labels[rows[r]]);
    if (!data.sources.empty()) out.sources.push_back(data.sources[rows[r]]);
  }
  return out;
}

void train_test_split(const LabeledFeatures& data, double test_fraction, LabeledFeatures& train,
                      LabeledFeatures& test) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) throw DomainError("test fraction must lie in [0, 1)");
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < data.labels.size(); ++i) by_class[data.labels[i]].push_back(i);
  std::vector<std::size_t> train_rows, test_rows;
  for (const auto& [label, rows] : by_class) {
    auto n_test = static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(rows.size())));
    if (test_fraction > 0.0 && n_test == 0 && rows.size() >= 2) n_test = 1;
    const auto cut = rows.size() - n_test;
    train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(cut));
    test_rows.insert(test_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(cut), rows.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  train = select_rows(data, train_rows);
  test = select_rows(data, test_rows);
}

void write_feature_table(const std::string& path, const LabeledFeatures& data) {
  data.validate();
  auto out = csv::open_for_write(path);
  out << "source,label";
  for (Eigen::Index c = 0; c < data.features.cols(); ++c) {
    out << ',' << (data.columns.empty() ? fmt::format("f{}", c) : data.columns[static_cast<std::size_t>(c)]);
  }
  out << '\n';
  for (Eigen::Index r = 0; r < data.features.rows(); ++r) {
    const auto i = static_cast<std::size_t>(r);
    out << (data.sources.empty() ? std::to_string(r) : data.sources[i]) << ',' << data.labels[i];
    for (Eigen::Index c = 0; c < data.features.cols(); ++c) out << ',' << csv::format_double(data.features(r, c));
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

LabeledFeatures read_feature_table(const std::string& path) {
  csv::Reader reader(path);
  const auto header = reader.header();
  if (header.size() < 3 || header[0] != "source" || header[1] != "label") {
    reader.fail("feature table header must start with `source,label` and name at least one column");
  }
  LabeledFeatures data;
  data.columns.assign(header.begin() + 2, header.end());
  const auto dim = data.columns.size();
  std::vector<double> values;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != dim + 2) reader.fail(fmt::format("expected {} fields, got {}", dim + 2, f.size()));
    if (f[1].empty()) reader.fail("empty label");
    data.sources.push_back(f[0]);
    data.labels.push_back(f[1]);
    for (std::size_t c = 0; c < dim; ++c) values.push_back(reader.to_double(f[c + 2], data.columns[c]));
  }
  data.features = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), static_cast<Eigen::Index>(data.labels.size()), static_cast<Eigen::Index>(dim));
  return data;
}

void write_sequences(const std::string& path, std::span<const ObservationSequence> sequences) {
  auto out = csv::open_for_write(path);
  bool first = true;
  for (const auto& seq : sequences) {
    if (seq.length() == 0) throw DomainError("cannot write an empty observation sequence");
    if (!first) out << '\n';
    first = false;
    if (!seq.label.empty()) out << "#label: " << seq.label << '\n';
    if (!seq.source.empty()) out << "#source: " << seq.source << '\n';
    if (!seq.postures.empty()) {
      if (static_cast<Eigen::Index>(seq.postures.size()) != seq.length()) {
        throw DomainError("posture ids do not match the observation count of " + seq.source);
      }
      out << "#postures: ";
      for (std::size_t i = 0; i < seq.postures.size(); ++i) out << (i ? "," : "") << seq.postures[i];
      out << '\n';
    }
    for (Eigen::Index t = 0; t < seq.length(); ++t) {
      for (Eigen::Index c = 0; c < seq.dim(); ++c) out << (c ? "," : "") << csv::format_double(seq.observations(t, c));
      out << '\n';
    }
  }
  if (!out) throw IoError("write failed for " + path);
}

std::vector<ObservationSequence> read_sequences(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::vector<ObservationSequence> out;
  ObservationSequence current;
  std::vector<double> values;
  Eigen::Index dim = -1;
  std::size_t rows = 0;
  std::size_t lineno = 0;

  auto flush = [&]() {
    if (rows == 0) {
      if (!current.label.empty() || !current.source.empty() || !current.postures.empty()) {
        throw ParseError(path, lineno, "sequence header without observations");
      }
      return;
    }
    current.observations = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        values.data(), static_cast<Eigen::Index>(rows), dim);
    if (!current.postures.empty() && current.postures.size() != rows) {
      throw ParseError(path, lineno, fmt::format("{} posture ids for {} observations", current.postures.size(), rows));
    }
    out.push_back(std::move(current));
    current = {};
    values.clear();
    rows = 0;
  };

  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = csv::trim(line);
    if (text.empty()) {
      flush();
      continue;
    }
    if (text.front() == '#') {
      auto directive = [&](std::string_view key) -> std::optional<std::string> {
        if (text.substr(1, key.size()) != key) return std::nullopt;
        return std::string(csv::trim(text.substr(1 + key.size())));
      };
      if (rows > 0 && (directive("label:") || directive("source:") || directive("postures:"))) {
        throw ParseError(path, lineno, "sequence directives must precede the observations");
      }
      if (auto v = directive("label:")) current.label = *v;
      else if (auto s = directive("source:")) current.source = *s;
      else if (auto p = directive("postures:")) current.postures = csv::split(*p);
      continue;
    }
    const auto fields = csv::split(text);
    if (dim < 0) dim = static_cast<Eigen::Index>(fields.size());
    if (static_cast<Eigen::Index>(fields.size()) != dim) {
      throw ParseError(path, lineno, fmt::format("expected {} values, got {}", dim, fields.size()));
    }
    for (const auto& field : fields) {
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (field.empty() || end != field.c_str() + field.size() || !std::isfinite(v)) {
        throw ParseError(path, lineno, "invalid number `" + field + "`");
      }
      values.push_back(v);
    }
    ++rows;
  }
  flush();
  return out;
}

}  // namespace adavu
