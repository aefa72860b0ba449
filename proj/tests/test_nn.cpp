#include <cmath>

#include "accentnet/nn.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace accentnet;
using namespace accentnet::nn;

namespace {

Tensor<double> random_input(Shape shape, std::uint64_t seed) {
  return Tensor<double>(shape, oracle::random_values(shape_numel(shape), seed));
}

// Collects parameters and gradchecks each against a projected scalar loss.
template <typename Forward>
void gradcheck_module(std::vector<ParamRef<double>> params, Tensor<double>& input,
                      Forward&& forward, std::uint64_t seed, double tol,
                      std::size_t max_elems = 48) {
  const Tensor<double> probe = forward();
  const auto r = oracle::random_projection(probe.size(), seed);
  input.set_requires_grad(true);
  for (auto& p : params) p.tensor->zero_grad();
  input.zero_grad();
  auto loss = oracle::project_loss(forward(), r);
  loss.backward();
  auto loss_fn = [&] { return oracle::project(forward().values(), r); };
  for (auto& p : params) {
    CAPTURE(p.name);
    CHECK(oracle::finite_diff_max_rel_err(*p.tensor, loss_fn, p.tensor->grad(),
                                          {1e-5, 1e-7, max_elems}) < tol);
  }
  CHECK(oracle::finite_diff_max_rel_err(input, loss_fn, input.grad(), {1e-5, 1e-7, max_elems}) <
        tol);
}

}  // namespace

TEST_CASE("se_weight with identity-equivalent maps reduces to sigmoid(relu(means))") {
  InitRng init(1);
  SeWeight<double> se(4, 1, init);  // r=1: both linear maps are 4x4
  // overwrite with identity weights and zero bias
  auto set_identity = [](Linear<double>& lin) {
    auto& w = lin.weight().values();
    std::fill(w.begin(), w.end(), 0.0);
    for (int i = 0; i < 4; ++i) w[i * 4 + i] = 1.0;
    std::fill(lin.bias().values().begin(), lin.bias().values().end(), 0.0);
  };
  set_identity(se.reduce());
  set_identity(se.expand());

  auto x = random_input(Shape{2, 4, 3, 3}, 11);
  const auto out = se.forward(x);
  CHECK(out.shape() == Shape{2, 4, 1, 1});
  for (std::size_t n = 0; n < 2; ++n)
    for (std::size_t c = 0; c < 4; ++c) {
      double mean = 0.0;
      for (std::size_t i = 0; i < 9; ++i) mean += x.values()[(n * 4 + c) * 9 + i];
      mean /= 9.0;
      const double expected = 1.0 / (1.0 + std::exp(-std::max(0.0, mean)));
      CHECK(out.values()[n * 4 + c] == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("se_weight outputs lie strictly in (0,1)") {
  InitRng init(2);
  SeWeight<double> se(8, 2, init);
  auto x = random_input(Shape{3, 8, 5, 5}, 21);
  const auto out = se.forward(x);
  for (double v : out.values()) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("se_weight rejects a reduction that does not divide the channels") {
  InitRng init(3);
  CHECK_THROWS_AS((void)SeWeight<double>(6, 4, init), Error);
}

TEST_CASE("se_weight gradcheck") {
  InitRng init(4);
  SeWeight<double> se(4, 2, init);
  auto x = random_input(Shape{2, 4, 3, 3}, 31);
  std::vector<ParamRef<double>> params;
  se.collect("se", params);
  gradcheck_module(params, x, [&] { return se.forward(x); }, 32, 1e-3);
}

TEST_CASE("spc with s=1 and an identity 1x1 kernel is the identity") {
  SpcConfig cfg;
  cfg.s = 1;
  cfg.kernel_sizes = {1};
  cfg.group_sizes = {1};
  InitRng init(5);
  SpcModule<double> spc(3, cfg, init);
  auto& w = spc.convs()[0].weight().values();  // (3,3,1,1)
  std::fill(w.begin(), w.end(), 0.0);
  for (int i = 0; i < 3; ++i) w[i * 3 + i] = 1.0;
  auto x = random_input(Shape{2, 3, 4, 4}, 41);
  CHECK(spc.forward(x).values() == x.values());
}

TEST_CASE("spc splits channels evenly and preserves shape at every kernel scale") {
  SpcConfig cfg;  // defaults: s=4, kernels 3/5/7/9, groups 1/4/8/16
  InitRng init(6);
  SpcModule<double> spc(64, cfg, init);
  auto x = random_input(Shape{1, 64, 6, 6}, 51);
  const auto splits = spc.forward_splits(x);
  REQUIRE(splits.size() == 4);
  for (const auto& s : splits) CHECK(s.shape() == Shape{1, 16, 6, 6});
  CHECK(spc.forward(x).shape() == x.shape());
}

TEST_CASE("spc shape preservation across C and s") {
  for (int c : {8, 16, 32, 64}) {
    for (int s : {1, 2, 4}) {
      if (c % s != 0) continue;
      SpcConfig cfg;
      cfg.s = s;
      cfg.kernel_sizes.assign(s, 3);
      cfg.group_sizes.assign(s, 1);
      InitRng init(7);
      SpcModule<double> spc(c, cfg, init);
      auto x = random_input(Shape{2, static_cast<std::size_t>(c), 4, 4},
                            static_cast<std::uint64_t>(c * 10 + s));
      CHECK(spc.forward(x).shape() == x.shape());
    }
  }
}

TEST_CASE("spc rejects divisibility violations") {
  SpcConfig cfg;
  InitRng init(8);
  CHECK_THROWS_AS((void)SpcModule<double>(6, cfg, init), Error);  // 6 % 4 != 0
  SpcConfig bad;
  bad.s = 2;
  bad.kernel_sizes = {3, 5};
  bad.group_sizes = {1, 4};
  CHECK_THROWS_AS((void)SpcModule<double>(4, bad, init), Error);  // split width 2 % 4 != 0
}

TEST_CASE("spc gradcheck") {
  SpcConfig cfg;
  cfg.s = 2;
  cfg.kernel_sizes = {3, 5};
  cfg.group_sizes = {1, 2};
  InitRng init(9);
  SpcModule<double> spc(4, cfg, init);
  auto x = random_input(Shape{1, 4, 4, 4}, 61);
  std::vector<ParamRef<double>> params;
  spc.collect("spc", params);
  gradcheck_module(params, x, [&] { return spc.forward(x); }, 62, 1e-3);
}

TEST_CASE("psa attention sums to one across splits") {
  SpcConfig cfg;
  cfg.s = 2;
  cfg.kernel_sizes = {3, 5};
  cfg.group_sizes = {1, 2};
  InitRng init(10);
  const int channels = 8;
  PsaModule<double> psa(channels, cfg, 2, init);
  auto x = random_input(Shape{2, channels, 4, 4}, 71);

  // reproduce the attention tensor through the module's own submodules
  const auto feats = psa.spc().forward_splits(x);
  std::vector<Tensor<double>> se_outs;
  for (const auto& f : feats) se_outs.push_back(psa.se().forward(f));
  auto z = concat(se_outs, 1);
  auto att = softmax(reshape(z, Shape{2, 2, 4}), 1);
  for (std::size_t n = 0; n < 2; ++n)
    for (std::size_t c = 0; c < 4; ++c) {
      const double total = att.values()[n * 8 + 0 * 4 + c] + att.values()[n * 8 + 1 * 4 + c];
      CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("psa with s=1 equals the spc output") {
  SpcConfig cfg;
  cfg.s = 1;
  cfg.kernel_sizes = {3};
  cfg.group_sizes = {1};
  InitRng init(11);
  PsaModule<double> psa(4, cfg, 2, init);
  auto x = random_input(Shape{2, 4, 5, 5}, 81);
  const auto out = psa.forward(x);
  const auto spc_out = psa.spc().forward(x);
  REQUIRE(out.size() == spc_out.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    CHECK(out.values()[i] == doctest::Approx(spc_out.values()[i]).epsilon(1e-12));
}

TEST_CASE("psa end-to-end gradcheck") {
  SpcConfig cfg;
  cfg.s = 2;
  cfg.kernel_sizes = {3, 5};
  cfg.group_sizes = {1, 2};
  InitRng init(12);
  PsaModule<double> psa(8, cfg, 2, init);
  auto x = random_input(Shape{1, 8, 4, 4}, 91);
  std::vector<ParamRef<double>> params;
  psa.collect("psa", params);
  gradcheck_module(params, x, [&] { return psa.forward(x); }, 92, 1e-3);
}

TEST_CASE("dense layer adds growth channels (both variants)") {
  DenseBlockSpec plain{1, 8, 0, DenseVariant::plain3x3};
  SpcConfig spc;
  spc.s = 2;
  spc.kernel_sizes = {3, 5};
  spc.group_sizes = {1, 2};
  InitRng init(13);
  DenseLayer<double> layer(12, plain, spc, 2, init);
  auto x = random_input(Shape{2, 12, 4, 4}, 101);
  CHECK(layer.forward(x, true).shape() == Shape{2, 20, 4, 4});

  DenseBlockSpec psa_spec{1, 8, 0, DenseVariant::psa};
  DenseLayer<double> psa_layer(12, psa_spec, spc, 2, init);
  CHECK(psa_layer.forward(x, true).shape() == Shape{2, 20, 4, 4});
}

TEST_CASE("a six-layer growth-64 block on a 64-channel stem reaches 448 channels") {
  DenseBlockSpec spec{6, 64, 0, DenseVariant::plain3x3};
  SpcConfig spc;
  InitRng init(14);
  DenseBlock<double> block(64, spec, spc, 16, init);
  auto x = random_input(Shape{1, 64, 2, 2}, 111);
  CHECK(block.forward(x, true).shape() == Shape{1, 448, 2, 2});
}

TEST_CASE("a K-layer block wires K(K+1)/2 feature reuses") {
  // layer i consumes the stem plus all i previous outputs: i+1 sources
  const int K = 5, growth = 3, in0 = 7;
  int reuses = 0;
  for (int i = 0; i < K; ++i) {
    const int cin = in0 + i * growth;
    CHECK(cin == in0 + i * growth);
    reuses += i + 1;
  }
  CHECK(reuses == K * (K + 1) / 2);
}

TEST_CASE("dense layer gradcheck (plain and psa variants)") {
  SpcConfig spc;
  spc.s = 2;
  spc.kernel_sizes = {3, 5};
  spc.group_sizes = {1, 2};
  InitRng init(15);

  DenseBlockSpec plain{1, 4, 8, DenseVariant::plain3x3};
  DenseLayer<double> layer(6, plain, spc, 2, init);
  auto x = random_input(Shape{2, 6, 4, 4}, 121);
  std::vector<ParamRef<double>> params;
  layer.collect("dense", params);
  gradcheck_module(params, x, [&] { return layer.forward(x, true); }, 122, 1e-3);

  DenseBlockSpec psa_spec{1, 4, 8, DenseVariant::psa};
  DenseLayer<double> psa_layer(6, psa_spec, spc, 2, init);
  std::vector<ParamRef<double>> psa_params;
  psa_layer.collect("dense_psa", psa_params);
  auto x2 = random_input(Shape{2, 6, 4, 4}, 123);
  gradcheck_module(psa_params, x2, [&] { return psa_layer.forward(x2, true); }, 124, 1e-3);
}

TEST_CASE("transition compresses channels and halves spatial dims") {
  InitRng init(16);
  Transition<double> tr(448, 208, init);
  auto x = random_input(Shape{1, 448, 4, 4}, 131);
  CHECK(tr.forward(x, true).shape() == Shape{1, 208, 2, 2});

  Transition<double> same(4, 4, init);
  auto c = Tensor<double>(Shape{1, 4, 4, 4}, 1.0);
  CHECK(same.forward(c, true).shape() == Shape{1, 4, 2, 2});

  // odd spatial dims floor
  Transition<double> odd(4, 2, init);
  auto xo = random_input(Shape{1, 4, 5, 7}, 132);
  CHECK(odd.forward(xo, true).shape() == Shape{1, 2, 2, 3});
}

TEST_CASE("transition gradcheck") {
  InitRng init(17);
  Transition<double> tr(6, 4, init);
  auto x = random_input(Shape{2, 6, 4, 4}, 141);
  std::vector<ParamRef<double>> params;
  tr.collect("transition", params);
  gradcheck_module(params, x, [&] { return tr.forward(x, true); }, 142, 1e-3);
}

TEST_CASE("parameter count formulas against hand counts") {
  InitRng init(18);
  Conv2d<double> conv_nb(3, 5, 3, 1, 1, 1, false, init);
  CHECK(conv_nb.parameter_count() == 5 * 3 * 3 * 3);
  Conv2d<double> conv_b(3, 5, 3, 1, 1, 1, true, init);
  CHECK(conv_b.parameter_count() == 5 * 3 * 3 * 3 + 5);
  Conv2d<double> conv_g(8, 4, 3, 1, 1, 2, false, init);
  CHECK(conv_g.parameter_count() == 4 * (8 / 2) * 3 * 3);
  Linear<double> lin(10, 5, init);
  CHECK(lin.parameter_count() == 10 * 5 + 5);
  BatchNorm2d<double> bn(7);
  CHECK(bn.parameter_count() == 14);
  SeWeight<double> se(16, 4, init);
  CHECK(se.parameter_count() == (16 * 4 + 4) + (4 * 16 + 16));
}

TEST_CASE("initialization is deterministic per seed") {
  InitRng a(123), b(123), c(124);
  Conv2d<double> ca(3, 8, 3, 1, 1, 1, false, a);
  Conv2d<double> cb(3, 8, 3, 1, 1, 1, false, b);
  Conv2d<double> cc(3, 8, 3, 1, 1, 1, false, c);
  CHECK(ca.weight().values() == cb.weight().values());
  CHECK(ca.weight().values() != cc.weight().values());
}

TEST_CASE("modules preserve batch size and spatial dims") {
  SpcConfig spc;
  spc.s = 2;
  spc.kernel_sizes = {3, 5};
  spc.group_sizes = {1, 2};
  InitRng init(19);
  PsaModule<double> psa(8, spc, 2, init);
  for (std::size_t n : {1, 2, 3}) {
    auto x = random_input(Shape{n, 8, 5, 6}, 150 + n);
    CHECK(psa.forward(x).shape() == x.shape());
  }
}
