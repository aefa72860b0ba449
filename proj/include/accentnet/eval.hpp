#ifndef ACCENTNET_EVAL_HPP
#define ACCENTNET_EVAL_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "accentnet/dsp.hpp"
#include "accentnet/models.hpp"

namespace accentnet::eval {

struct ConfusionMatrix {
  int classes = 0;
  std::vector<std::int64_t> counts;  // row = true class, col = predicted

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(int c) : classes(c), counts(static_cast<std::size_t>(c) * c, 0) {}

  std::int64_t at(int t, int p) const { return counts[static_cast<std::size_t>(t) * classes + p]; }
  std::int64_t& at(int t, int p) { return counts[static_cast<std::size_t>(t) * classes + p]; }
  std::int64_t total() const {
    std::int64_t n = 0;
    for (auto v : counts) n += v;
    return n;
  }
};

ConfusionMatrix confusion(const std::vector<int>& preds, const std::vector<int>& labels,
                          int classes);
// Row-stochastic form; zero rows stay zero.
std::vector<double> normalize(const ConfusionMatrix& cm);
void merge(ConfusionMatrix& into, const ConfusionMatrix& other);

// (1 + b^2) P R / (b^2 P + R); 0 when the denominator vanishes.
double f_beta(double precision, double recall, double beta);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

struct MetricReport {
  double beta = 0.5;
  std::vector<ClassMetrics> per_class;
  double micro_f = 0.0;  // pooled counts; equals accuracy for single-label data
  double macro_f = 0.0;  // unweighted mean over all classes
  double accuracy = 0.0;
};

MetricReport metric_report(const ConfusionMatrix& cm, double beta);
std::pair<double, double> micro_macro_f(const ConfusionMatrix& cm, double beta);

std::string format_report(const std::string& task, const MetricReport& report,
                          const std::vector<std::string>& class_names = {});
std::string confusion_csv(const ConfusionMatrix& cm);
std::string normalized_confusion_csv(const ConfusionMatrix& cm);

// One labeled feature map; labels ordered (accent, gender, age) to match the
// task order of multi-head schedules.
struct LabeledExample {
  dsp::FeatureMap features;
  std::array<int, 3> labels = {0, 0, 0};
};

struct TaskEvaluation {
  std::string task;
  MetricReport report;
  ConfusionMatrix matrix;
};

template <typename T>
Tensor<T> make_batch(const std::vector<LabeledExample>& examples,
                     const std::vector<std::size_t>& indices) {
  check_internal(!indices.empty(), "make_batch: empty batch");
  const auto& first = examples[indices[0]].features;
  const std::size_t per = first.size();
  std::vector<T> data(indices.size() * per);
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const auto& fm = examples[indices[b]].features;
    if (fm.channels != first.channels || fm.coeffs != first.coeffs || fm.frames != first.frames)
      data_error("batch assembly: feature map '" + fm.source_id + "' has shape (" +
                 std::to_string(fm.channels) + "," + std::to_string(fm.coeffs) + "," +
                 std::to_string(fm.frames) + "), expected (" + std::to_string(first.channels) +
                 "," + std::to_string(first.coeffs) + "," + std::to_string(first.frames) + ")");
    for (std::size_t i = 0; i < per; ++i) data[b * per + i] = static_cast<T>(fm.data[i]);
  }
  return Tensor<T>(Shape{indices.size(), static_cast<std::size_t>(first.channels),
                         static_cast<std::size_t>(first.coeffs),
                         static_cast<std::size_t>(first.frames)},
                   std::move(data));
}

// Argmax with ties broken by the lowest class id.
template <typename T>
std::vector<int> argmax_rows(const Tensor<T>& logits) {
  const std::size_t n = logits.shape()[0], c = logits.shape()[1];
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const T* row = logits.values().data() + i * c;
    int best = 0;
    for (std::size_t j = 1; j < c; ++j)
      if (row[j] > row[best]) best = static_cast<int>(j);
    out[i] = best;
  }
  return out;
}

// Eval-mode predictions per task over the whole dataset.
template <typename T>
std::vector<std::vector<int>> predict_all(models::Model<T>& model,
                                          const std::vector<LabeledExample>& examples,
                                          int batch_size = 16) {
  check_internal(batch_size >= 1, "predict_all: bad batch size");
  const std::size_t tasks = model.schedule().heads.size();
  std::vector<std::vector<int>> preds(tasks);
  NoGradGuard no_grad;
  for (std::size_t start = 0; start < examples.size();
       start += static_cast<std::size_t>(batch_size)) {
    const std::size_t stop = std::min(examples.size(), start + batch_size);
    std::vector<std::size_t> idx;
    for (std::size_t i = start; i < stop; ++i) idx.push_back(i);
    auto logits = model.forward(make_batch<T>(examples, idx), false);
    for (std::size_t k = 0; k < tasks; ++k) {
      const auto p = argmax_rows(logits[k]);
      preds[k].insert(preds[k].end(), p.begin(), p.end());
    }
  }
  return preds;
}

template <typename T>
std::vector<double> accuracy_per_task(models::Model<T>& model,
                                      const std::vector<LabeledExample>& examples,
                                      int batch_size = 16) {
  const std::size_t tasks = model.schedule().heads.size();
  if (examples.empty()) return std::vector<double>(tasks, 0.0);
  const auto preds = predict_all(model, examples, batch_size);
  std::vector<double> acc(tasks, 0.0);
  for (std::size_t k = 0; k < tasks; ++k) {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < examples.size(); ++i)
      if (preds[k][i] == examples[i].labels[k]) ++hit;
    acc[k] = static_cast<double>(hit) / static_cast<double>(examples.size());
  }
  return acc;
}

template <typename T>
std::vector<TaskEvaluation> evaluate(models::Model<T>& model,
                                     const std::vector<LabeledExample>& examples,
                                     double beta = 0.5, int batch_size = 16) {
  if (examples.empty()) data_error("evaluate: empty dataset");
  const auto names = models::task_names(model.schedule());
  const auto preds = predict_all(model, examples, batch_size);
  std::vector<TaskEvaluation> out;
  for (std::size_t k = 0; k < names.size(); ++k) {
    std::vector<int> labels(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) labels[i] = examples[i].labels[k];
    TaskEvaluation te;
    te.task = names[k];
    te.matrix = confusion(preds[k], labels, model.schedule().heads[k]);
    te.report = metric_report(te.matrix, beta);
    out.push_back(std::move(te));
  }
  return out;
}

}  // namespace accentnet::eval

#endif
