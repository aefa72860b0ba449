#include <cmath>
#include <random>

#include "accentnet/serialize.hpp"
#include "accentnet/tensor.hpp"
#include "accentnet/tensor_nn.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace accentnet;

namespace {

Tensor<double> make_param(Shape shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  auto v = oracle::random_values(shape_numel(shape), seed, lo, hi);
  return Tensor<double>(std::move(shape), std::move(v), true);
}

}  // namespace

TEST_CASE("elementwise forward values") {
  Tensor<double> x(Shape{3}, {-1.0, 0.0, 2.0});
  auto r = relu(x);
  CHECK(r.values() == std::vector<double>{0.0, 0.0, 2.0});

  Tensor<double> z(Shape{1}, {0.0});
  CHECK(sigmoid(z).item() == doctest::Approx(0.5));

  Tensor<double> a(Shape{2}, {1.0, 2.0});
  Tensor<double> b(Shape{2}, {3.0, 5.0});
  CHECK(add(a, b).values() == std::vector<double>{4.0, 7.0});
  CHECK(sub(a, b).values() == std::vector<double>{-2.0, -3.0});
  CHECK(mul(a, b).values() == std::vector<double>{3.0, 10.0});
  CHECK(scale(a, 2.0).values() == std::vector<double>{2.0, 4.0});
}

TEST_CASE("elementwise shape mismatch is rejected") {
  Tensor<double> a(Shape{2, 3}, 1.0);
  Tensor<double> b(Shape{2, 2}, 1.0);
  CHECK_THROWS_AS((void)add(a, b), Error);
  Tensor<double> c(Shape{3, 2}, 1.0);
  CHECK_THROWS_AS((void)mul(a, c), Error);
}

TEST_CASE("elementwise gradients match finite differences") {
  auto x = make_param(Shape{3, 4}, 11);
  auto y = make_param(Shape{3, 4}, 12);
  const auto r = oracle::random_projection(12, 13);

  struct Case {
    const char* name;
    std::function<Tensor<double>()> make;
  };
  std::vector<Case> cases = {
      {"mul", [&] { return mul(x, y); }},
      {"add", [&] { return add(x, y); }},
      {"sub", [&] { return sub(x, y); }},
      {"scale", [&] { return scale(x, 1.7); }},
      {"sigmoid", [&] { return sigmoid(x); }},
      {"exp", [&] { return exp(x); }},
  };
  for (auto& c : cases) {
    CAPTURE(c.name);
    x.zero_grad();
    y.zero_grad();
    auto loss = oracle::project_loss(c.make(), r);
    loss.backward();
    auto loss_fn = [&] { return oracle::project(c.make().values(), r); };
    CHECK(oracle::finite_diff_max_rel_err(x, loss_fn, x.grad()) < 1e-6);
  }

  // relu checked away from the kink, log on positive inputs
  auto xp = make_param(Shape{3, 4}, 14, 0.5, 2.0);
  xp.zero_grad();
  auto loss = oracle::project_loss(log(xp), r);
  loss.backward();
  auto log_fn = [&] { return oracle::project(log(xp).values(), r); };
  CHECK(oracle::finite_diff_max_rel_err(xp, log_fn, xp.grad()) < 1e-6);

  auto xr = make_param(Shape{3, 4}, 15);
  for (auto& v : xr.values())
    if (std::abs(v) < 0.05) v = 0.1;  // keep clear of the subgradient point
  xr.zero_grad();
  auto rl = oracle::project_loss(relu(xr), r);
  rl.backward();
  auto relu_fn = [&] { return oracle::project(relu(xr).values(), r); };
  CHECK(oracle::finite_diff_max_rel_err(xr, relu_fn, xr.grad()) < 1e-6);
}

TEST_CASE("broadcast add over leading dims") {
  Tensor<double> x(Shape{2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor<double> b(Shape{3}, {10, 20, 30});
  auto y = add(x, b);
  CHECK(y.values() == std::vector<double>{11, 22, 33, 14, 25, 36});

  auto xb = make_param(Shape{2, 3}, 21);
  auto bb = make_param(Shape{3}, 22);
  const auto r = oracle::random_projection(6, 23);
  auto loss = oracle::project_loss(add(xb, bb), r);
  loss.backward();
  auto fn = [&] { return oracle::project(add(xb, bb).values(), r); };
  CHECK(oracle::finite_diff_max_rel_err(bb, fn, bb.grad()) < 1e-6);
}

TEST_CASE("matmul identity and scalar cases") {
  Tensor<double> eye(Shape{2, 2}, {1, 0, 0, 1});
  Tensor<double> a(Shape{2, 3}, {1, 2, 3, 4, 5, 6});
  CHECK(matmul(eye, a).values() == a.values());

  Tensor<double> s(Shape{1, 1}, {3.0});
  Tensor<double> t(Shape{1, 1}, {4.0});
  CHECK(matmul(s, t).item() == doctest::Approx(12.0));

  Tensor<double> bad(Shape{3, 3}, 1.0);
  CHECK_THROWS_AS((void)matmul(eye, bad), Error);
}

TEST_CASE("matmul matches the naive oracle and finite differences") {
  auto a = make_param(Shape{5, 7}, 31);
  auto b = make_param(Shape{7, 3}, 32);
  auto c = matmul(a, b);
  const auto ref = oracle::naive_matmul(a.values(), b.values(), 5, 7, 3);
  for (std::size_t i = 0; i < ref.size(); ++i)
    CHECK(c.values()[i] == doctest::Approx(ref[i]).epsilon(1e-12));

  const auto r = oracle::random_projection(15, 33);
  auto loss = oracle::project_loss(c, r);
  loss.backward();
  auto fn = [&] { return oracle::project(matmul(a, b).values(), r); };
  CHECK(oracle::finite_diff_max_rel_err(a, fn, a.grad()) < 1e-6);
  CHECK(oracle::finite_diff_max_rel_err(b, fn, b.grad()) < 1e-6);
}

TEST_CASE("matmul random-shape sweep against the oracle") {
  std::mt19937_64 g(77);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t m = 1 + g() % 6, k = 1 + g() % 6, n = 1 + g() % 6;
    Tensor<double> a(Shape{m, k}, oracle::random_values(m * k, g()));
    Tensor<double> b(Shape{k, n}, oracle::random_values(k * n, g()));
    const auto ref = oracle::naive_matmul(a.values(), b.values(), m, k, n);
    const auto got = matmul(a, b).values();
    for (std::size_t i = 0; i < ref.size(); ++i)
      CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-10));
  }
}

TEST_CASE("conv2d trivial kernels") {
  // 1x1 kernel of value 1 is the per-channel identity
  Tensor<double> x(Shape{1, 1, 2, 2}, {1, 2, 3, 4});
  Tensor<double> w(Shape{1, 1, 1, 1}, {1.0});
  CHECK(conv2d(x, w, 1, 0, 1).values() == x.values());

  // 3x3 all-ones kernel on 3x3 all-ones input, no padding -> 9
  Tensor<double> x9(Shape{1, 1, 3, 3}, 1.0);
  Tensor<double> w9(Shape{1, 1, 3, 3}, 1.0);
  auto y9 = conv2d(x9, w9, 1, 0, 1);
  CHECK(y9.shape() == Shape{1, 1, 1, 1});
  CHECK(y9.item() == doctest::Approx(9.0));
}

TEST_CASE("conv2d group mismatch is rejected") {
  Tensor<double> x(Shape{1, 4, 4, 4}, 1.0);
  Tensor<double> w(Shape{2, 4, 3, 3}, 1.0);  // expects groups dividing C with C/g == 4
  CHECK_THROWS_AS((void)conv2d(x, w, 1, 1, 3), Error);
  CHECK_THROWS_AS((void)conv2d(x, w, 1, 1, 2), Error);  // w wants cg=4, input gives 2
}

TEST_CASE("conv2d grouped random case matches oracle and finite differences") {
  auto x = make_param(Shape{2, 4, 8, 8}, 41);
  auto w = make_param(Shape{4, 2, 3, 3}, 42);  // groups=2
  auto b = make_param(Shape{4}, 43);
  auto y = conv2d(x, w, &b, 1, 1, 2);
  const auto ref =
      oracle::naive_conv2d(x.values(), 2, 4, 8, 8, w.values(), 4, 3, 3, &b.values(), 1, 1, 2);
  REQUIRE(y.size() == ref.size());
  double max_diff = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i)
    max_diff = std::max(max_diff, std::abs(ref[i] - y.values()[i]));
  CHECK(max_diff < 1e-12);

  const auto r = oracle::random_projection(y.size(), 44);
  auto loss = oracle::project_loss(y, r);
  loss.backward();
  auto fn = [&] { return oracle::project(conv2d(x, w, &b, 1, 1, 2).values(), r); };
  CHECK(oracle::finite_diff_max_rel_err(x, fn, x.grad(), {1e-5, 1e-7, 64}) < 1e-3);
  CHECK(oracle::finite_diff_max_rel_err(w, fn, w.grad()) < 1e-3);
  CHECK(oracle::finite_diff_max_rel_err(b, fn, b.grad()) < 1e-3);
}

TEST_CASE("conv2d random-shape sweep against the oracle") {
  std::mt19937_64 g(99);
  for (int trial = 0; trial < 110; ++trial) {
    const std::size_t groups = 1 + g() % 2;
    const std::size_t cg = 1 + g() % 3;
    const std::size_t fg = 1 + g() % 3;
    const std::size_t C = cg * groups, F = fg * groups;
    const std::size_t N = 1 + g() % 2;
    const std::size_t k = 1 + 2 * (g() % 2);  // 1 or 3
    const int stride = 1 + static_cast<int>(g() % 2);
    const int pad = static_cast<int>(g() % 2);
    const std::size_t H = k + g() % 5, W = k + g() % 5;
    Tensor<double> x(Shape{N, C, H, W}, oracle::random_values(N * C * H * W, g()));
    Tensor<double> w(Shape{F, cg, k, k}, oracle::random_values(F * cg * k * k, g()));
    auto y = conv2d(x, w, stride, pad, static_cast<int>(groups));
    const auto ref = oracle::naive_conv2d(x.values(), N, C, H, W, w.values(), F, k, k,
                                          static_cast<const std::vector<double>*>(nullptr),
                                          stride, pad, static_cast<int>(groups));
    REQUIRE(y.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i)
      CHECK(std::abs(y.values()[i] - ref[i]) < 1e-10);
  }
}

TEST_CASE("batch_norm2d constant input gives zeros, affine stage applies") {
  Tensor<double> x(Shape{2, 3, 2, 2}, 5.0);
  Tensor<double> gamma(Shape{3}, 1.0, false);
  Tensor<double> beta(Shape{3}, 0.0, false);
  std::vector<double> rm(3, 0.0), rv(3, 1.0);
  auto y = batch_norm2d(x, gamma, beta, rm, rv, true);
  for (double v : y.values()) CHECK(v == doctest::Approx(0.0).epsilon(1e-9));

  // batch-normalized data, gamma=2, beta=3 -> 2x + 3 (eps makes it approximate)
  Tensor<double> xn(Shape{1, 1, 1, 2}, {-1.0, 1.0});
  Tensor<double> g2(Shape{1}, 2.0, false);
  Tensor<double> b3(Shape{1}, 3.0, false);
  std::vector<double> rm1(1, 0.0), rv1(1, 1.0);
  auto y2 = batch_norm2d(xn, g2, b3, rm1, rv1, true);
  CHECK(y2.values()[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(y2.values()[1] == doctest::Approx(5.0).epsilon(1e-4));
}

TEST_CASE("batch_norm2d rejects degenerate train batches") {
  Tensor<double> x(Shape{1, 2, 1, 1}, 1.0);
  Tensor<double> gamma(Shape{2}, 1.0);
  Tensor<double> beta(Shape{2}, 0.0);
  std::vector<double> rm(2, 0.0), rv(2, 1.0);
  CHECK_THROWS_AS((void)batch_norm2d(x, gamma, beta, rm, rv, true), Error);
  CHECK_NOTHROW((void)batch_norm2d(x, gamma, beta, rm, rv, false));
}

TEST_CASE("batch_norm2d eval mode uses running stats") {
  Tensor<double> x(Shape{1, 1, 1, 2}, {3.0, 5.0});
  Tensor<double> gamma(Shape{1}, 1.0);
  Tensor<double> beta(Shape{1}, 0.0);
  std::vector<double> rm(1, 4.0), rv(1, 4.0);
  auto y = batch_norm2d(x, gamma, beta, rm, rv, false);
  CHECK(y.values()[0] == doctest::Approx(-0.5).epsilon(1e-5));
  CHECK(y.values()[1] == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(rm[0] == 4.0);  // eval must not advance the stats
  CHECK(rv[0] == 4.0);
}

TEST_CASE("batch_norm2d gradients match finite differences") {
  auto x = make_param(Shape{3, 2, 4, 4}, 51);
  auto gamma = make_param(Shape{2}, 52, 0.5, 1.5);
  auto beta = make_param(Shape{2}, 53, -0.5, 0.5);
  const auto r = oracle::random_projection(x.size(), 54);
  std::vector<double> rm(2, 0.0), rv(2, 1.0);
  auto run = [&] {
    std::vector<double> m(rm), v(rv);  // keep running stats untouched between evals
    return batch_norm2d(x, gamma, beta, m, v, true);
  };
  auto loss = oracle::project_loss(run(), r);
  loss.backward();
  auto fn = [&] { return oracle::project(run().values(), r); };
  CHECK(oracle::finite_diff_max_rel_err(x, fn, x.grad(), {1e-5, 1e-6, 48}) < 1e-3);
  CHECK(oracle::finite_diff_max_rel_err(gamma, fn, gamma.grad()) < 1e-3);
  CHECK(oracle::finite_diff_max_rel_err(beta, fn, beta.grad()) < 1e-3);
}

TEST_CASE("pooling forward values") {
  Tensor<double> x(Shape{1, 1, 2, 2}, {1, 2, 3, 4});
  auto g = global_avg_pool2d(x);
  CHECK(g.shape() == Shape{1, 1, 1, 1});
  CHECK(g.item() == doctest::Approx(2.5));

  Tensor<double> x4(Shape{1, 1, 4, 4}, oracle::random_values(16, 61));
  auto a = avg_pool2d(x4, 2, 2);
  CHECK(a.shape() == Shape{1, 1, 2, 2});
  const auto ref = oracle::naive_avg_pool(x4.values(), 1, 1, 4, 4, 2, 2);
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(a.values()[i] == doctest::Approx(ref[i]));

  CHECK_THROWS_AS((void)avg_pool2d(x, 3, 1), Error);  // window larger than input
}

TEST_CASE("max-pool routes gradient to the argmax only") {
  Tensor<double> x(Shape{1, 1, 2, 2}, {1.0, 4.0, 3.0, 2.0}, true);
  auto y = max_pool2d(x, 2, 2);
  CHECK(y.item() == doctest::Approx(4.0));
  sum(y).backward();
  CHECK(x.grad() == std::vector<double>{0.0, 1.0, 0.0, 0.0});

  // ties break to the first (row-major) index
  Tensor<double> t(Shape{1, 1, 2, 2}, {7.0, 7.0, 7.0, 7.0}, true);
  sum(max_pool2d(t, 2, 2)).backward();
  CHECK(t.grad() == std::vector<double>{1.0, 0.0, 0.0, 0.0});
}

TEST_CASE("pooling gradients match finite differences") {
  auto x = make_param(Shape{2, 2, 4, 4}, 62);
  const auto r = oracle::random_projection(2 * 2 * 2 * 2, 63);
  auto loss = oracle::project_loss(max_pool2d(x, 2, 2), r);
  loss.backward();
  auto fn = [&] { return oracle::project(max_pool2d(x, 2, 2).values(), r); };
  CHECK(oracle::finite_diff_max_rel_err(x, fn, x.grad()) < 1e-3);

  x.zero_grad();
  auto loss2 = oracle::project_loss(avg_pool2d(x, 2, 2), r);
  loss2.backward();
  auto fn2 = [&] { return oracle::project(avg_pool2d(x, 2, 2).values(), r); };
  CHECK(oracle::finite_diff_max_rel_err(x, fn2, x.grad()) < 1e-3);

  x.zero_grad();
  const auto rg = oracle::random_projection(4, 64);
  auto loss3 = oracle::project_loss(global_avg_pool2d(x), rg);
  loss3.backward();
  auto fn3 = [&] { return oracle::project(global_avg_pool2d(x).values(), rg); };
  CHECK(oracle::finite_diff_max_rel_err(x, fn3, x.grad()) < 1e-3);
}

TEST_CASE("pooling random sweep against naive oracles") {
  std::mt19937_64 g(404);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t N = 1 + g() % 2, C = 1 + g() % 3;
    const int k = 1 + static_cast<int>(g() % 3);
    const int stride = 1 + static_cast<int>(g() % 2);
    const std::size_t H = k + g() % 4, W = k + g() % 4;
    Tensor<double> x(Shape{N, C, H, W}, oracle::random_values(N * C * H * W, g()));
    const auto a = avg_pool2d(x, k, stride).values();
    const auto ar = oracle::naive_avg_pool(x.values(), N, C, H, W, k, stride);
    REQUIRE(a.size() == ar.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(ar[i]));
    const auto m = max_pool2d(x, k, stride).values();
    const auto mr = oracle::naive_max_pool(x.values(), N, C, H, W, k, stride);
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(m[i] == doctest::Approx(mr[i]));
  }
}

TEST_CASE("concat and split are exact inverses") {
  auto a = make_param(Shape{2, 3, 2, 2}, 71);
  auto b = make_param(Shape{2, 3, 2, 2}, 72);
  auto joined = concat(std::vector<Tensor<double>>{a, b}, 1);
  CHECK(joined.shape() == Shape{2, 6, 2, 2});
  auto parts = split(joined, 2, 1);
  CHECK(parts[0].values() == a.values());
  CHECK(parts[1].values() == b.values());

  // 64-channel stem plus six growth-64 maps -> 448 channels
  std::vector<Tensor<double>> maps;
  maps.emplace_back(Shape{1, 64, 2, 2}, 0.0);
  for (int i = 0; i < 6; ++i) maps.emplace_back(Shape{1, 64, 2, 2}, 0.0);
  CHECK(concat(maps, 1).shape()[1] == 448);

  Tensor<double> ragged(Shape{2, 3, 2, 3}, 0.0);
  CHECK_THROWS_AS((void)concat(std::vector<Tensor<double>>{a, ragged}, 1), Error);
  CHECK_THROWS_AS((void)split(joined, 4, 1), Error);
}

TEST_CASE("concat gradient is the concatenation of input gradients") {
  auto a = make_param(Shape{2, 2}, 73);
  auto b = make_param(Shape{2, 3}, 74);
  const auto r = oracle::random_projection(10, 75);
  auto out = concat(std::vector<Tensor<double>>{a, b}, 1);
  auto loss = oracle::project_loss(out, r);
  loss.backward();
  auto fn = [&] {
    return oracle::project(concat(std::vector<Tensor<double>>{a, b}, 1).values(), r);
  };
  CHECK(oracle::finite_diff_max_rel_err(a, fn, a.grad()) < 1e-6);
  CHECK(oracle::finite_diff_max_rel_err(b, fn, b.grad()) < 1e-6);
}

TEST_CASE("softmax values and stability") {
  Tensor<double> x(Shape{1, 2}, {0.0, 0.0});
  auto y = softmax(x, 1);
  CHECK(y.values()[0] == doctest::Approx(0.5));
  CHECK(y.values()[1] == doctest::Approx(0.5));

  Tensor<double> z(Shape{1, 3}, {1.0, 2.0, 3.0});
  auto s = softmax(z, 1).values();
  CHECK(s[0] == doctest::Approx(0.09003057).epsilon(1e-6));
  CHECK(s[1] == doctest::Approx(0.24472847).epsilon(1e-6));
  CHECK(s[2] == doctest::Approx(0.66524096).epsilon(1e-6));

  Tensor<double> big(Shape{2, 3}, {1e4, -1e4, 0.0, -1e4, 1e4, 1e4});
  const auto big_soft = softmax(big, 1);
  for (double v : big_soft.values()) {
    CHECK(!std::isnan(v));
  }
  for (std::size_t row = 0; row < 2; ++row) {
    const auto sv = softmax(big, 1).values();
    CHECK(sv[row * 3] + sv[row * 3 + 1] + sv[row * 3 + 2] == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("softmax over an interior axis") {
  // (1, 2, 2): softmax across axis 1 couples (a, c) and (b, d)
  Tensor<double> x(Shape{1, 2, 2}, {1.0, 5.0, 3.0, 5.0});
  auto y = softmax(x, 1).values();
  CHECK(y[0] + y[2] == doctest::Approx(1.0));
  CHECK(y[1] + y[3] == doctest::Approx(1.0));
  CHECK(y[1] == doctest::Approx(0.5));
  CHECK(y[3] == doctest::Approx(0.5));
}

TEST_CASE("cross entropy values") {
  // uniform logits over C classes -> ln C
  for (std::size_t c : {2, 5, 6}) {
    Tensor<double> logits(Shape{3, c}, 0.7);
    std::vector<int> labels(3, static_cast<int>(c - 1));
    CHECK(cross_entropy(logits, labels).item() ==
          doctest::Approx(std::log(static_cast<double>(c))).epsilon(1e-9));
  }
  Tensor<double> logits(Shape{1, 2}, {100.0, -100.0});
  CHECK(cross_entropy(logits, {0}).item() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK_THROWS_AS((void)cross_entropy(logits, {2}), Error);
  CHECK_THROWS_AS((void)cross_entropy(logits, {-1}), Error);
}

TEST_CASE("cross entropy and softmax gradients match finite differences") {
  auto logits = make_param(Shape{4, 5}, 81);
  std::vector<int> labels = {0, 3, 2, 4};
  auto loss = cross_entropy(logits, labels);
  loss.backward();
  auto fn = [&] { return cross_entropy(logits, labels).item(); };
  CHECK(oracle::finite_diff_max_rel_err(logits, fn, logits.grad()) < 1e-6);

  auto x = make_param(Shape{3, 4}, 82);
  const auto r = oracle::random_projection(12, 83);
  auto sl = oracle::project_loss(softmax(x, 1), r);
  sl.backward();
  auto sfn = [&] { return oracle::project(softmax(x, 1).values(), r); };
  CHECK(oracle::finite_diff_max_rel_err(x, sfn, x.grad()) < 1e-6);
}

TEST_CASE("backward populates leaf gradients and accumulates") {
  Tensor<double> x(Shape{4}, {1.0, 2.0, 3.0, 4.0}, true);
  sum(x).backward();
  CHECK(x.grad() == std::vector<double>(4, 1.0));

  Tensor<double> y(Shape{1}, {3.0}, true);
  auto twice = add(y, y);
  twice.backward();
  CHECK(y.grad()[0] == doctest::Approx(2.0));
}

TEST_CASE("backward visits each node exactly once") {
  Tensor<double> x(Shape{2}, {1.0, 2.0}, true);
  auto a = add(x, x);       // node 1
  auto b = mul(a, a);       // node 2
  auto c = sum(b);          // node 3
  const auto stats = c.backward();
  CHECK(stats.reachable_nodes == 4);  // leaf + 3 ops
  CHECK(stats.ops_executed == 3);

  // diamond: d = sum(mul(a, a2)) where both share x
  x.zero_grad();
  auto a1 = scale(x, 2.0);
  auto a2 = scale(x, 3.0);
  auto d = sum(mul(a1, a2));
  const auto stats2 = d.backward();
  CHECK(stats2.reachable_nodes == 5);
  CHECK(stats2.ops_executed == 4);
  CHECK(x.grad()[0] == doctest::Approx(12.0 * 1.0));  // d/dx of 6x^2
}

TEST_CASE("backward rejects non-scalar roots and detached graphs") {
  Tensor<double> x(Shape{2}, {1.0, 2.0}, true);
  CHECK_THROWS_AS((void)add(x, x).backward(), Error);

  Tensor<double> plain(Shape{1}, {1.0});
  CHECK_THROWS_AS((void)plain.backward(), Error);

  NoGradGuard ng;
  auto detached = sum(mul(x, x));
  CHECK_THROWS_AS((void)detached.backward(), Error);
}

TEST_CASE("no-grad mode skips graph construction") {
  Tensor<double> x(Shape{3}, {1.0, 2.0, 3.0}, true);
  NoGradGuard ng;
  auto y = sum(mul(x, x));
  CHECK_FALSE(y.requires_grad());
  CHECK(y.node()->parents.empty());
}

TEST_CASE("reshape and narrow propagate gradients") {
  auto x = make_param(Shape{2, 6}, 91);
  const auto r = oracle::random_projection(6, 92);
  auto out = narrow(reshape(x, Shape{3, 4}), 1, 1, 2);
  CHECK(out.shape() == Shape{3, 2});
  auto loss = oracle::project_loss(out, r);
  loss.backward();
  auto fn = [&] {
    return oracle::project(narrow(reshape(x, Shape{3, 4}), 1, 1, 2).values(), r);
  };
  CHECK(oracle::finite_diff_max_rel_err(x, fn, x.grad()) < 1e-6);
}

TEST_CASE("scale_channels applies per-channel weights") {
  Tensor<double> x(Shape{1, 2, 1, 2}, {1.0, 2.0, 3.0, 4.0});
  Tensor<double> w(Shape{1, 2, 1, 1}, {10.0, 100.0});
  CHECK(scale_channels(x, w).values() == std::vector<double>{10.0, 20.0, 300.0, 400.0});

  auto xb = make_param(Shape{2, 3, 2, 2}, 93);
  auto wb = make_param(Shape{2, 3, 1, 1}, 94);
  const auto r = oracle::random_projection(xb.size(), 95);
  auto loss = oracle::project_loss(scale_channels(xb, wb), r);
  loss.backward();
  auto fn = [&] { return oracle::project(scale_channels(xb, wb).values(), r); };
  CHECK(oracle::finite_diff_max_rel_err(xb, fn, xb.grad()) < 1e-6);
  CHECK(oracle::finite_diff_max_rel_err(wb, fn, wb.grad()) < 1e-6);
}

TEST_CASE("tensor table round trip and corruption errors") {
  std::vector<NamedTensorEntry> entries = {
      {"alpha", Shape{2, 2}, {1.0f, -2.5f, 3.25f, 0.0f}},
      {"beta", Shape{3}, {9.0f, 8.0f, 7.0f}},
  };
  const std::string bytes = encode_tensor_table(entries);
  const auto back = decode_tensor_table(bytes, "test");
  REQUIRE(back.size() == 2);
  CHECK(back[0].name == "alpha");
  CHECK(back[0].shape == Shape{2, 2});
  CHECK(back[0].data == entries[0].data);
  CHECK(back[1].data == entries[1].data);

  std::string corrupt = bytes;
  corrupt[0] = 'X';
  CHECK_THROWS_AS((void)decode_tensor_table(corrupt, "test"), Error);

  const std::string truncated = bytes.substr(0, bytes.size() - 3);
  CHECK_THROWS_AS((void)decode_tensor_table(truncated, "test"), Error);
}
