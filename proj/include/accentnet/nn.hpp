#ifndef ACCENTNET_NN_HPP
#define ACCENTNET_NN_HPP

#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "accentnet/rng.hpp"
#include "accentnet/tensor.hpp"
#include "accentnet/tensor_nn.hpp"

namespace accentnet::nn {

template <typename T>
struct ParamRef {
  std::string name;
  Tensor<T>* tensor;
};

template <typename T>
struct BufferRef {
  std::string name;
  std::vector<T>* data;
};

// Deterministic initialization stream; parameters are drawn in construction
// order, so a seed fixes every weight bit-exactly.
class InitRng {
 public:
  explicit InitRng(std::uint64_t seed) : rng_(seed) {}

  template <typename T>
  void fill_normal(std::vector<T>& v, double stddev) {
    for (auto& x : v) x = static_cast<T>(stddev * rng::gaussian(rng_));
  }

  template <typename T>
  void fill_uniform(std::vector<T>& v, double lo, double hi) {
    for (auto& x : v) x = static_cast<T>(lo + (hi - lo) * rng::uniform01(rng_));
  }

 private:
  std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// Primitive layers
// ---------------------------------------------------------------------------

template <typename T>
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(int in_ch, int out_ch, int kernel, int stride, int padding, int groups, bool bias,
         InitRng& init)
      : stride_(stride), padding_(padding), groups_(groups), has_bias_(bias) {
    check_internal(in_ch % groups == 0, "Conv2d: in channels not divisible by groups");
    weight_ = Tensor<T>(Shape{static_cast<std::size_t>(out_ch),
                              static_cast<std::size_t>(in_ch / groups),
                              static_cast<std::size_t>(kernel), static_cast<std::size_t>(kernel)},
                        T(0), true);
    const double fan_in = static_cast<double>(in_ch / groups) * kernel * kernel;
    init.fill_normal(weight_.values(), std::sqrt(2.0 / fan_in));  // He
    if (bias) {
      bias_ = Tensor<T>(Shape{static_cast<std::size_t>(out_ch)}, T(0), true);
      const double bound = 1.0 / std::sqrt(fan_in);
      init.fill_uniform(bias_.values(), -bound, bound);
    }
  }

  Tensor<T> forward(const Tensor<T>& x) const {
    return conv2d(x, weight_, has_bias_ ? &bias_ : nullptr, stride_, padding_, groups_);
  }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    out.push_back({prefix + ".weight", &weight_});
    if (has_bias_) out.push_back({prefix + ".bias", &bias_});
  }

  std::size_t parameter_count() const { return weight_.size() + (has_bias_ ? bias_.size() : 0); }
  Tensor<T>& weight() { return weight_; }
  Tensor<T>& bias() { return bias_; }

 private:
  Tensor<T> weight_;
  Tensor<T> bias_;
  int stride_ = 1, padding_ = 0, groups_ = 1;
  bool has_bias_ = false;
};

template <typename T>
class BatchNorm2d {
 public:
  BatchNorm2d() = default;
  explicit BatchNorm2d(int channels, T momentum = T(0.1), T eps = T(1e-5))
      : momentum_(momentum), eps_(eps) {
    gamma_ = Tensor<T>(Shape{static_cast<std::size_t>(channels)}, T(1), true);
    beta_ = Tensor<T>(Shape{static_cast<std::size_t>(channels)}, T(0), true);
    running_mean_.assign(channels, T(0));
    running_var_.assign(channels, T(1));
  }

  Tensor<T> forward(const Tensor<T>& x, bool training) {
    return batch_norm2d(x, gamma_, beta_, running_mean_, running_var_, training, momentum_, eps_);
  }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    out.push_back({prefix + ".gamma", &gamma_});
    out.push_back({prefix + ".beta", &beta_});
  }

  void collect_buffers(const std::string& prefix, std::vector<BufferRef<T>>& out) {
    out.push_back({prefix + ".running_mean", &running_mean_});
    out.push_back({prefix + ".running_var", &running_var_});
  }

  std::size_t parameter_count() const { return gamma_.size() + beta_.size(); }
  Tensor<T>& gamma() { return gamma_; }
  Tensor<T>& beta() { return beta_; }

 private:
  Tensor<T> gamma_, beta_;
  std::vector<T> running_mean_, running_var_;
  T momentum_ = T(0.1), eps_ = T(1e-5);
};

template <typename T>
class Linear {
 public:
  Linear() = default;
  Linear(int in, int out, InitRng& init) {
    weight_ = Tensor<T>(Shape{static_cast<std::size_t>(in), static_cast<std::size_t>(out)}, T(0),
                        true);
    bias_ = Tensor<T>(Shape{static_cast<std::size_t>(out)}, T(0), true);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    init.fill_uniform(weight_.values(), -bound, bound);
    init.fill_uniform(bias_.values(), -bound, bound);
  }

  Tensor<T> forward(const Tensor<T>& x) const { return add(matmul(x, weight_), bias_); }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    out.push_back({prefix + ".weight", &weight_});
    out.push_back({prefix + ".bias", &bias_});
  }

  std::size_t parameter_count() const { return weight_.size() + bias_.size(); }
  Tensor<T>& weight() { return weight_; }
  Tensor<T>& bias() { return bias_; }

 private:
  Tensor<T> weight_, bias_;
};

// ---------------------------------------------------------------------------
// SEWeight: global average pool -> linear C->C/r -> ReLU -> linear C/r->C ->
// sigmoid, producing per-channel attention scalars in (0,1).
// ---------------------------------------------------------------------------

template <typename T>
class SeWeight {
 public:
  SeWeight() = default;
  SeWeight(int channels, int reduction, InitRng& init) : channels_(channels), r_(reduction) {
    if (reduction < 1 || channels % reduction != 0)
      internal_error("se_weight: reduction " + std::to_string(reduction) +
                     " must divide channels " + std::to_string(channels));
    reduce_ = Linear<T>(channels, channels / reduction, init);
    expand_ = Linear<T>(channels / reduction, channels, init);
  }

  Tensor<T> forward(const Tensor<T>& x) const {
    const Shape& s = x.shape();
    check_internal(s.size() == 4 && s[1] == static_cast<std::size_t>(channels_),
                   "se_weight: channel mismatch");
    Tensor<T> pooled = reshape(global_avg_pool2d(x), Shape{s[0], s[1]});
    Tensor<T> w = sigmoid(expand_.forward(relu(reduce_.forward(pooled))));
    return reshape(w, Shape{s[0], s[1], std::size_t(1), std::size_t(1)});
  }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    reduce_.collect(prefix + ".reduce", out);
    expand_.collect(prefix + ".expand", out);
  }

  std::size_t parameter_count() const {
    return reduce_.parameter_count() + expand_.parameter_count();
  }
  Linear<T>& reduce() { return reduce_; }
  Linear<T>& expand() { return expand_; }

 private:
  Linear<T> reduce_, expand_;
  int channels_ = 0, r_ = 0;
};

// ---------------------------------------------------------------------------
// SPC: split the channel axis into s groups and convolve each at its own
// kernel scale (same padding, stride 1, C/s -> C/s), then re-concatenate.
// ---------------------------------------------------------------------------

struct SpcConfig {
  int s = 4;
  std::vector<int> kernel_sizes = {3, 5, 7, 9};
  std::vector<int> group_sizes = {1, 4, 8, 16};

  void validate(int channels) const {
    if (s < 1 || kernel_sizes.size() != static_cast<std::size_t>(s) ||
        group_sizes.size() != static_cast<std::size_t>(s))
      internal_error("spc config: kernel/group lists must have length s");
    if (channels % s != 0)
      internal_error("spc: input channels " + std::to_string(channels) +
                     " not divisible by split count " + std::to_string(s));
    const int per_split = channels / s;
    for (int i = 0; i < s; ++i) {
      if (kernel_sizes[i] < 1 || kernel_sizes[i] % 2 == 0)
        internal_error("spc: kernel sizes must be odd");
      if (group_sizes[i] < 1 || per_split % group_sizes[i] != 0)
        internal_error("spc: split channels " + std::to_string(per_split) +
                       " not divisible by group size " + std::to_string(group_sizes[i]));
    }
  }
};

template <typename T>
class SpcModule {
 public:
  SpcModule() = default;
  SpcModule(int channels, const SpcConfig& cfg, InitRng& init) : cfg_(cfg), channels_(channels) {
    cfg.validate(channels);
    const int per_split = channels / cfg.s;
    for (int i = 0; i < cfg.s; ++i)
      convs_.emplace_back(per_split, per_split, cfg.kernel_sizes[i], 1,
                          (cfg.kernel_sizes[i] - 1) / 2, cfg.group_sizes[i], false, init);
  }

  std::vector<Tensor<T>> forward_splits(const Tensor<T>& x) const {
    check_internal(x.shape().size() == 4 && x.shape()[1] == static_cast<std::size_t>(channels_),
                   "spc: channel mismatch");
    auto parts = split(x, static_cast<std::size_t>(cfg_.s), 1);
    std::vector<Tensor<T>> out;
    out.reserve(parts.size());
    for (int i = 0; i < cfg_.s; ++i) out.push_back(convs_[i].forward(parts[i]));
    return out;
  }

  Tensor<T> forward(const Tensor<T>& x) const { return concat(forward_splits(x), 1); }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    for (std::size_t i = 0; i < convs_.size(); ++i)
      convs_[i].collect(prefix + ".conv" + std::to_string(i), out);
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& c : convs_) n += c.parameter_count();
    return n;
  }
  const SpcConfig& config() const { return cfg_; }
  std::vector<Conv2d<T>>& convs() { return convs_; }

 private:
  std::vector<Conv2d<T>> convs_;
  SpcConfig cfg_;
  int channels_ = 0;
};

// ---------------------------------------------------------------------------
// PSA: SPC multi-scale features re-weighted by a shared SEWeight per split,
// with the attention renormalized across splits by a softmax.
// ---------------------------------------------------------------------------

template <typename T>
class PsaModule {
 public:
  PsaModule() = default;
  PsaModule(int channels, const SpcConfig& cfg, int se_reduction, InitRng& init)
      : spc_(channels, cfg, init),
        se_(channels / cfg.s, se_reduction, init),
        channels_(channels),
        splits_(cfg.s) {}

  Tensor<T> forward(const Tensor<T>& x) const {
    const auto feats = spc_.forward_splits(x);
    std::vector<Tensor<T>> se_outs;
    se_outs.reserve(feats.size());
    for (const auto& f : feats) se_outs.push_back(se_.forward(f));
    Tensor<T> z = concat(se_outs, 1);  // (N, C, 1, 1)
    const std::size_t n = z.shape()[0];
    const std::size_t s = static_cast<std::size_t>(splits_);
    const std::size_t per = static_cast<std::size_t>(channels_) / s;
    Tensor<T> att = softmax(reshape(z, Shape{n, s, per}), 1);
    att = reshape(att, Shape{n, static_cast<std::size_t>(channels_), 1, 1});
    return scale_channels(concat(feats, 1), att);
  }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    spc_.collect(prefix + ".spc", out);
    se_.collect(prefix + ".se", out);
  }

  std::size_t parameter_count() const { return spc_.parameter_count() + se_.parameter_count(); }
  SpcModule<T>& spc() { return spc_; }
  SeWeight<T>& se() { return se_; }

 private:
  SpcModule<T> spc_;
  SeWeight<T> se_;
  int channels_ = 0, splits_ = 0;
};

// ---------------------------------------------------------------------------
// Dense layers / blocks / transitions
// ---------------------------------------------------------------------------

enum class DenseVariant { plain3x3, psa };

struct DenseBlockSpec {
  int layers = 0;
  int growth = 0;
  int bottleneck = 0;  // 0 selects the 4*growth default
  DenseVariant variant = DenseVariant::plain3x3;

  int bottleneck_width() const { return bottleneck > 0 ? bottleneck : 4 * growth; }
};

template <typename T>
class DenseLayer {
 public:
  DenseLayer() = default;
  DenseLayer(int in_ch, const DenseBlockSpec& spec, const SpcConfig& spc_cfg, int se_reduction,
             InitRng& init)
      : variant_(spec.variant) {
    const int b = spec.bottleneck_width();
    bn1_ = BatchNorm2d<T>(in_ch);
    conv1_ = Conv2d<T>(in_ch, b, 1, 1, 0, 1, false, init);
    bn2_ = BatchNorm2d<T>(b);
    if (variant_ == DenseVariant::plain3x3) {
      conv2_ = Conv2d<T>(b, spec.growth, 3, 1, 1, 1, false, init);
    } else {
      psa_ = std::make_unique<PsaModule<T>>(b, spc_cfg, se_reduction, init);
      proj_ = Conv2d<T>(b, spec.growth, 1, 1, 0, 1, false, init);
    }
  }

  // Returns concat(x, new features): output channels = input + growth.
  Tensor<T> forward(const Tensor<T>& x, bool training) {
    Tensor<T> h = conv1_.forward(relu(bn1_.forward(x, training)));
    h = relu(bn2_.forward(h, training));
    if (variant_ == DenseVariant::plain3x3)
      h = conv2_.forward(h);
    else
      h = proj_.forward(psa_->forward(h));
    return concat(std::vector<Tensor<T>>{x, h}, 1);
  }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    bn1_.collect(prefix + ".bn1", out);
    conv1_.collect(prefix + ".conv1", out);
    bn2_.collect(prefix + ".bn2", out);
    if (variant_ == DenseVariant::plain3x3) {
      conv2_.collect(prefix + ".conv2", out);
    } else {
      psa_->collect(prefix + ".psa", out);
      proj_.collect(prefix + ".proj", out);
    }
  }

  void collect_buffers(const std::string& prefix, std::vector<BufferRef<T>>& out) {
    bn1_.collect_buffers(prefix + ".bn1", out);
    bn2_.collect_buffers(prefix + ".bn2", out);
  }

 private:
  DenseVariant variant_ = DenseVariant::plain3x3;
  BatchNorm2d<T> bn1_, bn2_;
  Conv2d<T> conv1_, conv2_, proj_;
  std::unique_ptr<PsaModule<T>> psa_;
};

template <typename T>
class DenseBlock {
 public:
  DenseBlock() = default;
  DenseBlock(int in_ch, const DenseBlockSpec& spec, const SpcConfig& spc_cfg, int se_reduction,
             InitRng& init) {
    int ch = in_ch;
    for (int i = 0; i < spec.layers; ++i) {
      layers_.emplace_back(ch, spec, spc_cfg, se_reduction, init);
      ch += spec.growth;
    }
  }

  Tensor<T> forward(Tensor<T> x, bool training) {
    for (auto& layer : layers_) x = layer.forward(x, training);
    return x;
  }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    for (std::size_t i = 0; i < layers_.size(); ++i)
      layers_[i].collect(prefix + ".layer" + std::to_string(i), out);
  }

  void collect_buffers(const std::string& prefix, std::vector<BufferRef<T>>& out) {
    for (std::size_t i = 0; i < layers_.size(); ++i)
      layers_[i].collect_buffers(prefix + ".layer" + std::to_string(i), out);
  }

 private:
  std::vector<DenseLayer<T>> layers_;
};

template <typename T>
class Transition {
 public:
  Transition() = default;
  Transition(int in_ch, int out_ch, InitRng& init) {
    check_internal(out_ch >= 1, "transition: out_channels must be >= 1");
    bn_ = BatchNorm2d<T>(in_ch);
    conv_ = Conv2d<T>(in_ch, out_ch, 1, 1, 0, 1, false, init);
  }

  Tensor<T> forward(const Tensor<T>& x, bool training) {
    return avg_pool2d(conv_.forward(relu(bn_.forward(x, training))), 2, 2);
  }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    bn_.collect(prefix + ".bn", out);
    conv_.collect(prefix + ".conv", out);
  }

  void collect_buffers(const std::string& prefix, std::vector<BufferRef<T>>& out) {
    bn_.collect_buffers(prefix + ".bn", out);
  }

 private:
  BatchNorm2d<T> bn_;
  Conv2d<T> conv_;
};

}  // namespace accentnet::nn

#endif
