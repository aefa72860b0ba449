#include "accentnet/train.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "accentnet/io_util.hpp"

namespace accentnet::train {

void TaskWeights::validate(std::size_t tasks) const {
  if (omega.size() != tasks)
    data_error("task weights: " + std::to_string(omega.size()) + " weights for " +
               std::to_string(tasks) + " tasks");
  double sum = 0.0;
  for (double w : omega) {
    if (w < 0.0) data_error("task weights: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    data_error("task weights: sum " + std::to_string(sum) + " must be 1");
}

TaskWeights TaskWeights::defaults_for(std::size_t tasks) {
  TaskWeights w;
  if (tasks == 1) {
    w.omega = {1.0};
  } else if (tasks == 3) {
    w.omega = {0.6, 0.2, 0.2};  // accent is the main task
  } else {
    w.omega.assign(tasks, 1.0 / static_cast<double>(tasks));
  }
  return w;
}

void TrainConfig::validate() const {
  if (epochs < 1) data_error("train config: epochs must be positive");
  if (batch_size < 1) data_error("train config: batch size must be positive");
  if (learning_rate < 0.0 || std::isnan(learning_rate))
    data_error("train config: learning rate must be >= 0");
}

std::string TrainConfig::canonical_string() const {
  std::ostringstream out;
  out << "epochs=" << epochs << ";batch=" << batch_size << ";lr=" << learning_rate
      << ";beta1=" << beta1 << ";beta2=" << beta2 << ";eps=" << adam_eps << ";seed=" << seed
      << ";weights=";
  for (std::size_t i = 0; i < task_weights.omega.size(); ++i) {
    if (i) out << ",";
    out << task_weights.omega[i];
  }
  return out.str();
}

std::string TrainingLog::csv_header() const {
  std::string out = "epoch,train_loss";
  for (const auto& t : tasks) out += ",acc_" + t + "_train";
  for (const auto& t : tasks) out += ",acc_" + t + "_val";
  return out;
}

std::string TrainingLog::to_csv() const {
  std::ostringstream out;
  out << csv_header() << "\n";
  char buf[32];
  for (const auto& row : rows) {
    out << row.epoch;
    std::snprintf(buf, sizeof(buf), ",%.9g", row.train_loss);
    out << buf;
    for (double a : row.train_acc) {
      std::snprintf(buf, sizeof(buf), ",%.9g", a);
      out << buf;
    }
    for (double a : row.val_acc) {
      std::snprintf(buf, sizeof(buf), ",%.9g", a);
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

void write_checkpoint_sidecar(const std::string& path, const models::ArchSchedule& schedule,
                              std::uint64_t seed, int epoch, std::size_t adam_t,
                              const std::string& config_hash) {
  std::ostringstream out;
  out << "format = accentnet-checkpoint-v1\n"
      << "schedule_id = " << schedule.id << "\n"
      << "schedule = " << schedule.to_string() << "\n"
      << "seed = " << seed << "\n"
      << "epoch = " << epoch << "\n"
      << "adam_t = " << adam_t << "\n"
      << "config_hash = " << config_hash << "\n";
  io::write_file_atomic(path + ".meta", out.str());
}

CheckpointInfo read_checkpoint_info(const std::string& path) {
  const std::string text = io::read_file(path + ".meta");
  CheckpointInfo info;
  bool have_schedule = false;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto strip = [](std::string s) {
      const std::size_t a = s.find_first_not_of(" \t");
      if (a == std::string::npos) return std::string();
      const std::size_t b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    const std::string key = strip(line.substr(0, eq));
    const std::string val = strip(line.substr(eq + 1));
    if (key == "format") {
      if (val != "accentnet-checkpoint-v1")
        data_error(path + ".meta: unknown checkpoint format '" + val + "'");
    } else if (key == "schedule") {
      info.schedule = models::ArchSchedule::from_string(val);
      have_schedule = true;
    } else if (key == "seed") {
      info.seed = std::stoull(val);
    } else if (key == "epoch") {
      info.epoch = std::stoi(val);
    } else if (key == "adam_t") {
      info.adam_t = static_cast<std::size_t>(std::stoull(val));
    } else if (key == "config_hash") {
      info.config_hash = val;
    }
  }
  if (!have_schedule) data_error(path + ".meta: missing schedule entry");
  return info;
}

}  // namespace accentnet::train
