#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "neckpose/detail/text.hpp"
#include "neckpose/error.hpp"
#include "neckpose/forest.hpp"

namespace neckpose {

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Per-class shuffle, then the first floor(ratio * n_c) rows of each class
/// go to training. Both index lists come back sorted.
inline SplitIndices stratified_split(std::span<const std::size_t> labels, std::size_t n_classes, double ratio,
                                     std::uint64_t seed, std::span<const std::string> class_names = {}) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw DomainError("split ratio must be in (0, 1), got " + detail::format_shortest(ratio));
  std::vector<std::vector<std::size_t>> by_class(n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= n_classes) throw DomainError("label out of range at row " + std::to_string(i));
    by_class[labels[i]].push_back(i);
  }
  std::mt19937_64 rng(seed);
  SplitIndices out;
  for (std::size_t c = 0; c < n_classes; ++c) {
    auto& rows = by_class[c];
    if (rows.empty()) continue;
    if (rows.size() < 2) {
      const std::string name = c < class_names.size() ? class_names[c] : "#" + std::to_string(c);
      throw StratificationError("class " + name + " has fewer than 2 rows and cannot be stratified");
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(rows.size())));
    out.train.insert(out.train.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.insert(out.test.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
  }
  if (out.train.empty()) throw StratificationError("split leaves no training rows");
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

/// Confusion matrix (rows = true class, columns = predicted) and per-class
/// precision, recall and F1.
struct EvaluationReport {
  std::vector<std::string> class_names;
  std::vector<std::vector<std::size_t>> confusion;
  double accuracy = 0.0;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  std::vector<std::size_t> support;

  std::size_t n_classes() const { return class_names.size(); }
  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& row : confusion)
      for (auto v : row) n += v;
    return n;
  }
  bool operator==(const EvaluationReport&) const = default;
};

inline EvaluationReport build_report(std::span<const std::size_t> truth, std::span<const std::size_t> predicted,
                                     std::vector<std::string> class_names) {
  if (truth.size() != predicted.size()) throw ShapeError("truth and prediction counts differ");
  if (truth.empty()) throw DomainError("cannot evaluate an empty test set");
  const std::size_t k = class_names.size();
  EvaluationReport r;
  r.class_names = std::move(class_names);
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= k || predicted[i] >= k) throw DomainError("class index out of range");
    ++r.confusion[truth[i]][predicted[i]];
  }
  std::size_t trace = 0;
  r.precision.assign(k, 0.0);
  r.recall.assign(k, 0.0);
  r.f1.assign(k, 0.0);
  r.support.assign(k, 0);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t column = 0;
    for (std::size_t t = 0; t < k; ++t) {
      column += r.confusion[t][c];
      r.support[c] += r.confusion[c][t];
    }
    const double hit = static_cast<double>(r.confusion[c][c]);
    trace += r.confusion[c][c];
    r.precision[c] = column ? hit / static_cast<double>(column) : 0.0;
    r.recall[c] = r.support[c] ? hit / static_cast<double>(r.support[c]) : 0.0;
    const double sum = r.precision[c] + r.recall[c];
    r.f1[c] = sum > 0.0 ? 2.0 * r.precision[c] * r.recall[c] / sum : 0.0;
  }
  r.accuracy = static_cast<double>(trace) / static_cast<double>(truth.size());
  return r;
}

inline EvaluationReport evaluate(const TrainedForest& forest, std::span<const FeatureRow> x,
                                 std::span<const std::size_t> y, std::vector<std::string> class_names) {
  if (class_names.size() != forest.n_classes) throw ShapeError("class name count differs from the forest");
  const auto predicted = predict_all(forest, x);
  return build_report(y, predicted, std::move(class_names));
}

inline nlohmann::json report_to_json(const EvaluationReport& r) {
  nlohmann::json j;
  j["classes"] = r.class_names;
  j["confusion"] = r.confusion;
  j["accuracy"] = r.accuracy;
  j["total"] = r.total();
  nlohmann::json per_class = nlohmann::json::array();
  for (std::size_t c = 0; c < r.n_classes(); ++c)
    per_class.push_back({{"class", r.class_names[c]},
                         {"precision", r.precision[c]},
                         {"recall", r.recall[c]},
                         {"f1", r.f1[c]},
                         {"support", r.support[c]}});
  j["per_class"] = per_class;
  return j;
}

inline EvaluationReport report_from_json(const nlohmann::json& j) {
  try {
    EvaluationReport r;
    r.class_names = j.at("classes").get<std::vector<std::string>>();
    r.confusion = j.at("confusion").get<std::vector<std::vector<std::size_t>>>();
    r.accuracy = j.at("accuracy").get<double>();
    for (const auto& c : j.at("per_class")) {
      r.precision.push_back(c.at("precision").get<double>());
      r.recall.push_back(c.at("recall").get<double>());
      r.f1.push_back(c.at("f1").get<double>());
      r.support.push_back(c.at("support").get<std::size_t>());
    }
    if (r.confusion.size() != r.class_names.size() || r.precision.size() != r.class_names.size())
      throw FormatError("report JSON class counts are inconsistent");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed report JSON: ") + e.what());
  }
}

inline void write_report_text(std::ostream& out, const EvaluationReport& r) {
  const std::size_t k = r.n_classes();
  out << "Confusion matrix (rows = true, columns = predicted)\n";
  out << std::setw(6) << "";
  for (const auto& name : r.class_names) out << std::setw(6) << name;
  out << '\n';
  for (std::size_t t = 0; t < k; ++t) {
    out << std::setw(6) << r.class_names[t];
    for (std::size_t p = 0; p < k; ++p) out << std::setw(6) << r.confusion[t][p];
    out << '\n';
  }
  out << "\naccuracy " << detail::format_fixed(r.accuracy, 4) << " (" << r.total() << " rows)\n\n";
  out << std::setw(6) << "class" << std::setw(11) << "precision" << std::setw(9) << "recall" << std::setw(9) << "f1"
      << std::setw(9) << "support" << '\n';
  for (std::size_t c = 0; c < k; ++c)
    out << std::setw(6) << r.class_names[c] << std::setw(11) << detail::format_fixed(r.precision[c], 4)
        << std::setw(9) << detail::format_fixed(r.recall[c], 4) << std::setw(9) << detail::format_fixed(r.f1[c], 4)
        << std::setw(9) << r.support[c] << '\n';
}

inline void write_confusion_csv(std::ostream& out, const EvaluationReport& r) {
  out << "true\\predicted";
  for (const auto& name : r.class_names) out << ',' << name;
  out << '\n';
  for (std::size_t t = 0; t < r.n_classes(); ++t) {
    out << r.class_names[t];
    for (auto v : r.confusion[t]) out << ',' << v;
    out << '\n';
  }
}

inline void write_metrics_csv(std::ostream& out, const EvaluationReport& r) {
  out << "class,precision,recall,f1,support\n";
  for (std::size_t c = 0; c < r.n_classes(); ++c)
    out << r.class_names[c] << ',' << detail::format_fixed(r.precision[c], 6) << ','
        << detail::format_fixed(r.recall[c], 6) << ',' << detail::format_fixed(r.f1[c], 6) << ',' << r.support[c]
        << '\n';
}

/// Long-format per-class metric values for bar charts.
inline void write_metric_bars(std::ostream& out, const EvaluationReport& r) {
  out << "class,metric,value\n";
  for (std::size_t c = 0; c < r.n_classes(); ++c) {
    out << r.class_names[c] << ",precision," << detail::format_fixed(r.precision[c], 6) << '\n';
    out << r.class_names[c] << ",recall," << detail::format_fixed(r.recall[c], 6) << '\n';
    out << r.class_names[c] << ",f1," << detail::format_fixed(r.f1[c], 6) << '\n';
  }
}

}  // namespace neckpose
