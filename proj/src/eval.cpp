#include "accentnet/eval.hpp"

#include <cstdio>
#include <sstream>

namespace accentnet::eval {

ConfusionMatrix confusion(const std::vector<int>& preds, const std::vector<int>& labels,
                          int classes) {
  if (preds.size() != labels.size())
    data_error("confusion: " + std::to_string(preds.size()) + " predictions vs " +
               std::to_string(labels.size()) + " labels");
  check_internal(classes >= 1, "confusion: need at least one class");
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= classes)
      data_error("confusion: label " + std::to_string(labels[i]) + " out of range at index " +
                 std::to_string(i));
    if (preds[i] < 0 || preds[i] >= classes)
      data_error("confusion: prediction " + std::to_string(preds[i]) + " out of range at index " +
                 std::to_string(i));
    ++cm.at(labels[i], preds[i]);
  }
  return cm;
}

std::vector<double> normalize(const ConfusionMatrix& cm) {
  std::vector<double> out(cm.counts.size(), 0.0);
  for (int t = 0; t < cm.classes; ++t) {
    std::int64_t row = 0;
    for (int p = 0; p < cm.classes; ++p) row += cm.at(t, p);
    if (row == 0) continue;
    for (int p = 0; p < cm.classes; ++p)
      out[static_cast<std::size_t>(t) * cm.classes + p] =
          static_cast<double>(cm.at(t, p)) / static_cast<double>(row);
  }
  return out;
}

void merge(ConfusionMatrix& into, const ConfusionMatrix& other) {
  check_internal(into.classes == other.classes, "confusion merge: class count mismatch");
  for (std::size_t i = 0; i < into.counts.size(); ++i) into.counts[i] += other.counts[i];
}

double f_beta(double precision, double recall, double beta) {
  if (beta < 0.0) data_error("f_beta: negative beta");
  const double denom = beta * beta * precision + recall;
  if (denom == 0.0) return 0.0;
  return (1.0 + beta * beta) * precision * recall / denom;
}

MetricReport metric_report(const ConfusionMatrix& cm, double beta) {
  if (cm.total() == 0) data_error("metric_report: empty confusion matrix");
  MetricReport report;
  report.beta = beta;
  std::int64_t correct = 0;
  double macro_sum = 0.0;
  for (int k = 0; k < cm.classes; ++k) {
    std::int64_t tp = cm.at(k, k);
    std::int64_t col = 0, row = 0;
    for (int j = 0; j < cm.classes; ++j) {
      col += cm.at(j, k);
      row += cm.at(k, j);
    }
    ClassMetrics m;
    m.precision = col == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(col);
    m.recall = row == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(row);
    m.f = f_beta(m.precision, m.recall, beta);
    report.per_class.push_back(m);
    macro_sum += m.f;
    correct += tp;
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(cm.total());
  // Pooled TP/FP/FN: for single-label data each error is one FP and one FN,
  // so pooled precision = pooled recall = accuracy.
  report.micro_f = f_beta(report.accuracy, report.accuracy, beta);
  report.macro_f = macro_sum / cm.classes;
  return report;
}

std::pair<double, double> micro_macro_f(const ConfusionMatrix& cm, double beta) {
  const MetricReport r = metric_report(cm, beta);
  return {r.micro_f, r.macro_f};
}

std::string format_report(const std::string& task, const MetricReport& report,
                          const std::vector<std::string>& class_names) {
  std::ostringstream out;
  char line[128];
  out << "task: " << task << "\n";
  std::snprintf(line, sizeof(line), "%-14s  %9s  %9s  %9s\n", "class", "precision", "recall",
                ("F" + std::to_string(report.beta).substr(0, 4)).c_str());
  out << line;
  for (std::size_t k = 0; k < report.per_class.size(); ++k) {
    const std::string name =
        k < class_names.size() ? class_names[k] : "class " + std::to_string(k);
    const auto& m = report.per_class[k];
    std::snprintf(line, sizeof(line), "%-14s  %9.4f  %9.4f  %9.4f\n", name.c_str(), m.precision,
                  m.recall, m.f);
    out << line;
  }
  std::snprintf(line, sizeof(line), "accuracy %.4f  micro-F %.4f  macro-F %.4f\n",
                report.accuracy, report.micro_f, report.macro_f);
  out << line;
  return out.str();
}

std::string confusion_csv(const ConfusionMatrix& cm) {
  std::ostringstream out;
  for (int t = 0; t < cm.classes; ++t) {
    for (int p = 0; p < cm.classes; ++p) {
      if (p) out << ",";
      out << cm.at(t, p);
    }
    out << "\n";
  }
  return out.str();
}

std::string normalized_confusion_csv(const ConfusionMatrix& cm) {
  const auto norm = normalize(cm);
  std::ostringstream out;
  char buf[32];
  for (int t = 0; t < cm.classes; ++t) {
    for (int p = 0; p < cm.classes; ++p) {
      if (p) out << ",";
      std::snprintf(buf, sizeof(buf), "%.9f", norm[static_cast<std::size_t>(t) * cm.classes + p]);
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace accentnet::eval
