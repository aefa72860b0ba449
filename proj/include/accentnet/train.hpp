#ifndef ACCENTNET_TRAIN_HPP
#define ACCENTNET_TRAIN_HPP

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "accentnet/eval.hpp"
#include "accentnet/io_util.hpp"
#include "accentnet/models.hpp"
#include "accentnet/serialize.hpp"

namespace accentnet::train {

struct TaskWeights {
  std::vector<double> omega;

  void validate(std::size_t tasks) const;
  static TaskWeights defaults_for(std::size_t tasks);  // accent-dominant (0.6, 0.2, 0.2)
};

struct TrainConfig {
  int epochs = 128;
  int batch_size = 16;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  TaskWeights task_weights;      // empty -> defaults_for(task count)
  double early_stop_loss = 0.0;  // >0: stop once train loss < this and accent train acc == 1
  std::string checkpoint_dir;    // empty: keep no checkpoints

  void validate() const;
  std::string canonical_string() const;
};

template <typename T>
struct AdamState {
  std::size_t t = 0;
  std::vector<std::vector<T>> m, v;  // aligned with the parameter list
};

struct EpochRow {
  int epoch = 0;
  double train_loss = 0.0;
  std::vector<double> train_acc;
  std::vector<double> val_acc;
};

struct TrainingLog {
  std::vector<std::string> tasks;
  std::vector<EpochRow> rows;
  int best_epoch = 0;
  double best_val_accent_acc = 0.0;

  std::string csv_header() const;
  std::string to_csv() const;
};

// ---------------------------------------------------------------------------
// Weighted multi-task loss: sum_i omega_i * CE(logits_i, labels_i).
// Zero-weight tasks contribute nothing, so one-hot weights reproduce
// single-task gradients exactly.
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> total_loss(const std::vector<Tensor<T>>& logits_per_task,
                     const std::vector<std::vector<int>>& labels_per_task, const TaskWeights& w) {
  if (logits_per_task.size() != labels_per_task.size())
    internal_error("total_loss: logits/label task counts differ");
  w.validate(logits_per_task.size());
  Tensor<T> total;
  for (std::size_t k = 0; k < logits_per_task.size(); ++k) {
    if (w.omega[k] == 0.0) continue;
    Tensor<T> term = cross_entropy(logits_per_task[k], labels_per_task[k]);
    if (w.omega[k] != 1.0) term = scale(term, static_cast<T>(w.omega[k]));
    total = total.defined() ? add(total, term) : term;
  }
  check_internal(total.defined(), "total_loss: all task weights are zero");
  return total;
}

// ---------------------------------------------------------------------------
// Adam with standard bias correction.
// ---------------------------------------------------------------------------

template <typename T>
void adam_step(const std::vector<nn::ParamRef<T>>& params, AdamState<T>& state,
               const TrainConfig& cfg) {
  if (state.m.empty()) {
    state.m.resize(params.size());
    state.v.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      state.m[i].assign(params[i].tensor->size(), T(0));
      state.v[i].assign(params[i].tensor->size(), T(0));
    }
  }
  check_internal(state.m.size() == params.size(), "adam_step: state/parameter count mismatch");
  ++state.t;
  const T b1 = static_cast<T>(cfg.beta1), b2 = static_cast<T>(cfg.beta2);
  const T corr1 = T(1) - static_cast<T>(std::pow(cfg.beta1, static_cast<double>(state.t)));
  const T corr2 = T(1) - static_cast<T>(std::pow(cfg.beta2, static_cast<double>(state.t)));
  const T lr = static_cast<T>(cfg.learning_rate);
  const T eps = static_cast<T>(cfg.adam_eps);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = *params[i].tensor;
    check_internal(state.m[i].size() == p.size(), "adam_step: moment shape mismatch for " +
                                                      params[i].name);
    const auto& g = p.grad();
    auto& val = p.values();
    for (std::size_t j = 0; j < val.size(); ++j) {
      if (std::isnan(static_cast<double>(g[j])))
        data_error("adam_step: NaN gradient in parameter '" + params[i].name + "'");
      state.m[i][j] = b1 * state.m[i][j] + (T(1) - b1) * g[j];
      state.v[i][j] = b2 * state.v[i][j] + (T(1) - b2) * g[j] * g[j];
      const T mhat = state.m[i][j] / corr1;
      const T vhat = state.v[i][j] / corr2;
      val[j] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

// ---------------------------------------------------------------------------
// Checkpoints: TNS1 tensor table plus a structured-text sidecar carrying the
// schedule, seed, epoch and Adam step.
// ---------------------------------------------------------------------------

struct CheckpointInfo {
  models::ArchSchedule schedule;
  std::uint64_t seed = 0;
  int epoch = 0;
  std::size_t adam_t = 0;
  std::string config_hash;
};

CheckpointInfo read_checkpoint_info(const std::string& path);
void write_checkpoint_sidecar(const std::string& path, const models::ArchSchedule& schedule,
                              std::uint64_t seed, int epoch, std::size_t adam_t,
                              const std::string& config_hash);

template <typename T>
void save_checkpoint(models::Model<T>& model, const AdamState<T>& state, int epoch,
                     const std::string& path, const std::string& config_hash = "") {
  std::vector<NamedTensorEntry> entries;
  auto params = model.named_parameters();
  for (const auto& p : params) {
    NamedTensorEntry e;
    e.name = p.name;
    e.shape = p.tensor->shape();
    e.data.assign(p.tensor->values().begin(), p.tensor->values().end());
    entries.push_back(std::move(e));
  }
  for (const auto& b : model.named_buffers()) {
    NamedTensorEntry e;
    e.name = b.name;
    e.shape = {b.data->size()};
    e.data.assign(b.data->begin(), b.data->end());
    entries.push_back(std::move(e));
  }
  if (!state.m.empty()) {
    check_internal(state.m.size() == params.size(), "save_checkpoint: stale Adam state");
    for (std::size_t i = 0; i < params.size(); ++i) {
      NamedTensorEntry em{"optim.m." + params[i].name, params[i].tensor->shape(),
                          std::vector<float>(state.m[i].begin(), state.m[i].end())};
      NamedTensorEntry ev{"optim.v." + params[i].name, params[i].tensor->shape(),
                          std::vector<float>(state.v[i].begin(), state.v[i].end())};
      entries.push_back(std::move(em));
      entries.push_back(std::move(ev));
    }
  }
  write_tensor_table(path, entries);
  write_checkpoint_sidecar(path, model.schedule(), model.seed(), epoch, state.t, config_hash);
}

// Restores parameters, buffers and Adam state into an already-built model of
// the same schedule id; returns the stored epoch.
template <typename T>
int load_checkpoint(models::Model<T>& model, AdamState<T>& state, const std::string& path) {
  const CheckpointInfo info = read_checkpoint_info(path);
  if (info.schedule.id != model.schedule().id)
    data_error("checkpoint '" + path + "' holds schedule '" + info.schedule.id +
               "', model expects '" + model.schedule().id + "'");
  auto entries = read_tensor_table(path);
  auto find = [&](const std::string& name) -> const NamedTensorEntry* {
    for (const auto& e : entries)
      if (e.name == name) return &e;
    return nullptr;
  };
  auto params = model.named_parameters();
  for (auto& p : params) {
    const auto* e = find(p.name);
    if (!e) data_error("checkpoint '" + path + "' is missing tensor '" + p.name + "'");
    if (e->shape != p.tensor->shape())
      data_error("checkpoint tensor '" + p.name + "' has shape " + shape_str(e->shape) +
                 ", model expects " + shape_str(p.tensor->shape()));
    for (std::size_t i = 0; i < e->data.size(); ++i)
      p.tensor->values()[i] = static_cast<T>(e->data[i]);
  }
  for (auto& b : model.named_buffers()) {
    const auto* e = find(b.name);
    if (!e) data_error("checkpoint '" + path + "' is missing buffer '" + b.name + "'");
    if (e->data.size() != b.data->size())
      data_error("checkpoint buffer '" + b.name + "' length mismatch");
    for (std::size_t i = 0; i < e->data.size(); ++i) (*b.data)[i] = static_cast<T>(e->data[i]);
  }
  state = AdamState<T>{};
  if (info.adam_t > 0) {
    state.t = info.adam_t;
    state.m.resize(params.size());
    state.v.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto* em = find("optim.m." + params[i].name);
      const auto* ev = find("optim.v." + params[i].name);
      if (!em || !ev)
        data_error("checkpoint '" + path + "' is missing Adam state for '" + params[i].name +
                   "'");
      state.m[i].assign(em->data.begin(), em->data.end());
      state.v[i].assign(ev->data.begin(), ev->data.end());
    }
  }
  return info.epoch;
}

// ---------------------------------------------------------------------------
// fit: seeded shuffle, batched forward/total_loss/backward/adam_step, then
// eval-mode accuracies per task on the train and validation sets. Keeps the
// best checkpoint by validation accent accuracy (train accuracy when no
// validation set is given).
// ---------------------------------------------------------------------------

template <typename T>
TrainingLog fit(models::Model<T>& model, const std::vector<eval::LabeledExample>& train_set,
                const std::vector<eval::LabeledExample>& val_set, const TrainConfig& cfg,
                int start_epoch = 0, AdamState<T>* resumed_state = nullptr) {
  cfg.validate();
  if (train_set.empty()) data_error("fit: empty training set");
  const std::size_t tasks = model.schedule().heads.size();
  TaskWeights weights =
      cfg.task_weights.omega.empty() ? TaskWeights::defaults_for(tasks) : cfg.task_weights;
  weights.validate(tasks);

  TrainingLog log;
  log.tasks = models::task_names(model.schedule());
  auto params = model.named_parameters();
  AdamState<T> state;
  if (resumed_state) state = std::move(*resumed_state);

  namespace fs = std::filesystem;
  if (!cfg.checkpoint_dir.empty()) fs::create_directories(cfg.checkpoint_dir);
  const std::string cfg_hash = io::hex64(io::fnv1a(cfg.canonical_string()));

  double best_metric = -1.0;
  for (int epoch = start_epoch + 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<std::size_t> order(train_set.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 epoch_rng(rng::mix(cfg.seed, static_cast<std::uint64_t>(epoch)));
    rng::shuffle(order, epoch_rng);

    double loss_sum = 0.0;
    const std::size_t bsz = static_cast<std::size_t>(cfg.batch_size);
    for (std::size_t start = 0, batch_index = 0; start < order.size();
         start += bsz, ++batch_index) {
      const std::size_t stop = std::min(order.size(), start + bsz);
      std::vector<std::size_t> idx(order.begin() + start, order.begin() + stop);
      Tensor<T> input = eval::make_batch<T>(train_set, idx);
      std::vector<std::vector<int>> labels(tasks);
      for (std::size_t k = 0; k < tasks; ++k)
        for (std::size_t i : idx) labels[k].push_back(train_set[i].labels[k]);

      model.zero_grad();
      auto logits = model.forward(input, true);
      Tensor<T> loss = total_loss(logits, labels, weights);
      const double loss_value = static_cast<double>(loss.item());
      if (std::isnan(loss_value))
        data_error("fit: NaN loss at epoch " + std::to_string(epoch) + ", batch " +
                   std::to_string(batch_index));
      loss.backward();
      adam_step(params, state, cfg);
      loss_sum += loss_value * static_cast<double>(idx.size());
    }

    EpochRow row;
    row.epoch = epoch;
    row.train_loss = loss_sum / static_cast<double>(train_set.size());
    row.train_acc = eval::accuracy_per_task(model, train_set, cfg.batch_size);
    row.val_acc = val_set.empty() ? std::vector<double>(tasks, 0.0)
                                  : eval::accuracy_per_task(model, val_set, cfg.batch_size);
    log.rows.push_back(row);

    const double selector = val_set.empty() ? row.train_acc[0] : row.val_acc[0];
    if (selector > best_metric) {
      best_metric = selector;
      log.best_epoch = epoch;
      log.best_val_accent_acc = selector;
      if (!cfg.checkpoint_dir.empty())
        save_checkpoint(model, state, epoch, (fs::path(cfg.checkpoint_dir) / "best.tns").string(),
                        cfg_hash);
    }
    if (!cfg.checkpoint_dir.empty())
      save_checkpoint(model, state, epoch, (fs::path(cfg.checkpoint_dir) / "last.tns").string(),
                      cfg_hash);

    if (cfg.early_stop_loss > 0.0 && row.train_loss < cfg.early_stop_loss &&
        row.train_acc[0] == 1.0)
      break;
  }
  return log;
}

}  // namespace accentnet::train

#endif
