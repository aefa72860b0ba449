#ifndef ACCENTNET_MODELS_HPP
#define ACCENTNET_MODELS_HPP

#include <string>
#include <utility>
#include <vector>

#include "accentnet/nn.hpp"

namespace accentnet::models {

struct StageSpec {
  nn::DenseBlockSpec block;
  int transition_out = 0;  // 0 = no transition after this block
};

// Declarative network description: the per-stage channel/repeat/kernel
// schedule that instantiates any of the four networks. expected_channels and
// expected_sizes are optional checkpoints verified by symbolic shape
// propagation before a model is built.
struct ArchSchedule {
  std::string id;
  int in_channels = 2;
  int input_height = 64;
  int input_width = 512;
  int stem_channels = 64;
  bool stem_pool = true;  // 3x3 stride-2 max-pool after the stem conv
  nn::SpcConfig spc;
  int se_reduction = 16;
  std::vector<StageSpec> stages;
  std::vector<int> heads;                            // class counts per task
  std::vector<int> expected_channels;                // per block/transition
  std::vector<std::pair<int, int>> expected_sizes;   // stem, blocks/transitions, global

  std::string to_string() const;
  static ArchSchedule from_string(const std::string& text);
};

struct ShapeCheckpoint {
  std::string stage;
  int channels = 0;
  int h = 0, w = 0;
  bool counts_channels = true;  // stem and global pool carry no channel pin
};

std::vector<ShapeCheckpoint> propagate_shapes(const ArchSchedule& schedule);
void validate_schedule(const ArchSchedule& schedule);

// Trainable parameter count derived from the schedule alone; must agree with
// a built model's parameter_count().
std::size_t count_parameters(const ArchSchedule& schedule);

std::vector<std::string> known_model_ids();
ArchSchedule schedule_for(const std::string& id);
ArchSchedule schedule_for(const std::string& id, const std::vector<int>& heads_override);

std::string report_architecture(const ArchSchedule& schedule);

std::vector<std::string> task_names(const ArchSchedule& schedule);

// ---------------------------------------------------------------------------
// Model: a built network. Forward runs the shared trunk once and returns one
// logits tensor per head.
// ---------------------------------------------------------------------------

template <typename T>
class Model {
 public:
  Model(ArchSchedule schedule, std::uint64_t seed) : schedule_(std::move(schedule)), seed_(seed) {
    validate_schedule(schedule_);
    nn::InitRng init(seed);
    stem_conv_ = nn::Conv2d<T>(schedule_.in_channels, schedule_.stem_channels, 7, 2, 3, 1, false,
                               init);
    stem_bn_ = nn::BatchNorm2d<T>(schedule_.stem_channels);
    int ch = schedule_.stem_channels;
    for (const auto& stage : schedule_.stages) {
      blocks_.emplace_back(ch, stage.block, schedule_.spc, schedule_.se_reduction, init);
      ch += stage.block.layers * stage.block.growth;
      if (stage.transition_out > 0) {
        transitions_.emplace_back(ch, stage.transition_out, init);
        ch = stage.transition_out;
      }
    }
    final_bn_ = nn::BatchNorm2d<T>(ch);
    trunk_channels_ = ch;
    for (int classes : schedule_.heads) heads_.emplace_back(ch, classes, init);
  }

  // x: (N, in_channels, input_height, W) with W >= input_width; the time axis
  // is center-cropped to input_width before the stem.
  std::vector<Tensor<T>> forward(const Tensor<T>& x, bool training) {
    const Shape& s = x.shape();
    if (s.size() != 4 || s[1] != static_cast<std::size_t>(schedule_.in_channels) ||
        s[2] != static_cast<std::size_t>(schedule_.input_height))
      internal_error("model forward: expected input (N," + std::to_string(schedule_.in_channels) +
                     "," + std::to_string(schedule_.input_height) + ",W), got " + shape_str(s));
    if (s[3] < static_cast<std::size_t>(schedule_.input_width))
      internal_error("model forward: input width " + std::to_string(s[3]) +
                     " below schedule width " + std::to_string(schedule_.input_width));
    Tensor<T> h = x;
    if (s[3] > static_cast<std::size_t>(schedule_.input_width)) {
      const std::size_t start = (s[3] - schedule_.input_width) / 2;
      h = narrow(h, 3, start, schedule_.input_width);
    }
    h = relu(stem_bn_.forward(stem_conv_.forward(h), training));
    if (schedule_.stem_pool) h = max_pool2d(h, 3, 2, 1);
    std::size_t t = 0;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      h = blocks_[b].forward(h, training);
      if (schedule_.stages[b].transition_out > 0) h = transitions_[t++].forward(h, training);
    }
    h = relu(final_bn_.forward(h, training));
    Tensor<T> features =
        reshape(global_avg_pool2d(h), Shape{h.shape()[0], h.shape()[1]});
    std::vector<Tensor<T>> logits;
    logits.reserve(heads_.size());
    for (const auto& head : heads_) logits.push_back(head.forward(features));
    return logits;
  }

  std::vector<nn::ParamRef<T>> named_parameters() {
    std::vector<nn::ParamRef<T>> out;
    stem_conv_.collect("stem.conv", out);
    stem_bn_.collect("stem.bn", out);
    std::size_t t = 0;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      blocks_[b].collect("block" + std::to_string(b + 1), out);
      if (schedule_.stages[b].transition_out > 0)
        transitions_[t].collect("transition" + std::to_string(t + 1), out), ++t;
    }
    final_bn_.collect("final_bn", out);
    for (std::size_t i = 0; i < heads_.size(); ++i)
      heads_[i].collect("head" + std::to_string(i), out);
    return out;
  }

  std::vector<nn::BufferRef<T>> named_buffers() {
    std::vector<nn::BufferRef<T>> out;
    stem_bn_.collect_buffers("stem.bn", out);
    std::size_t t = 0;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      blocks_[b].collect_buffers("block" + std::to_string(b + 1), out);
      if (schedule_.stages[b].transition_out > 0)
        transitions_[t].collect_buffers("transition" + std::to_string(t + 1), out), ++t;
    }
    final_bn_.collect_buffers("final_bn", out);
    return out;
  }

  std::size_t parameter_count() {
    std::size_t n = 0;
    for (const auto& p : named_parameters()) n += p.tensor->size();
    return n;
  }

  void zero_grad() {
    for (auto& p : named_parameters()) p.tensor->zero_grad();
  }

  const ArchSchedule& schedule() const { return schedule_; }
  std::uint64_t seed() const { return seed_; }
  int trunk_channels() const { return trunk_channels_; }
  std::vector<nn::Linear<T>>& heads() { return heads_; }

 private:
  ArchSchedule schedule_;
  std::uint64_t seed_ = 0;
  int trunk_channels_ = 0;
  nn::Conv2d<T> stem_conv_;
  nn::BatchNorm2d<T> stem_bn_;
  std::vector<nn::DenseBlock<T>> blocks_;
  std::vector<nn::Transition<T>> transitions_;
  nn::BatchNorm2d<T> final_bn_;
  std::vector<nn::Linear<T>> heads_;
};

}  // namespace accentnet::models

#endif
