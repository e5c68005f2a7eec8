#include <gtest/gtest.h>

#include <random>

#include "dwarfs/common/error.hpp"
#include "dwarfs/datagen/tensor.hpp"
#include "dwarfs/kernels/tensor_ops.hpp"
#include "support/compare.hpp"
#include "support/oracles.hpp"

namespace dwarfs::kernels {
namespace {

using datagen::gen_tensor_batch;
using dwarfs::testing::max_relative_error;

TEST(Conv2d, UnitFilterIsIdentity) {
  const auto x = gen_tensor_batch(2, 5, 4, 1, 1);
  const Tensor f({1, 1, 1, 1}, 1.0f);
  EXPECT_EQ(conv2d(x, f, 2), x);
}

TEST(Conv2d, ConstantInputAllOnesFilter) {
  const Tensor x({1, 5, 5, 1}, 0.5f);
  const Tensor f({3, 3, 1, 1}, 1.0f);
  const auto out = conv2d(x, f, 1);
  EXPECT_EQ(out.shape, (std::array<std::size_t, 4>{1, 3, 3, 1}));
  for (float v : out.values) EXPECT_FLOAT_EQ(v, 9 * 0.5f);
}

TEST(Conv2d, MatchesDirectLoop) {
  const auto x = gen_tensor_batch(2, 6, 6, 3, 10);
  const auto f = gen_tensor_batch(3, 3, 3, 2, 11);
  const auto ref = oracle::direct_conv(x.values, 2, 6, 6, 3, f.values, 3, 3, 2);
  for (std::size_t t : {1, 3}) EXPECT_LE(max_relative_error(conv2d(x, f, t).values, ref), 1e-6);
}

TEST(Conv2d, Linearity) {
  const auto x = gen_tensor_batch(1, 8, 8, 4, 1);
  const auto y = gen_tensor_batch(1, 8, 8, 4, 2);
  const auto f = gen_tensor_batch(3, 3, 4, 5, 3);
  const float alpha = 0.75f, beta = -1.5f;
  Tensor mix(x.shape);
  for (std::size_t i = 0; i < mix.size(); ++i) mix.values[i] = alpha * x.values[i] + beta * y.values[i];
  const auto cx = conv2d(x, f, 2), cy = conv2d(y, f, 2);
  std::vector<float> combined(cx.size());
  for (std::size_t i = 0; i < combined.size(); ++i) combined[i] = alpha * cx.values[i] + beta * cy.values[i];
  EXPECT_LE(max_relative_error(conv2d(mix, f, 2).values, combined), 1e-6);
}

TEST(Conv2d, Errors) {
  const auto x = gen_tensor_batch(1, 2, 2, 3, 0);
  EXPECT_THROW(conv2d(x, Tensor({3, 3, 3, 1}), 1), InvalidArgument);
  EXPECT_THROW(conv2d(x, Tensor({1, 1, 2, 1}), 1), InvalidArgument);
}

TEST(Pool, TwoByTwo) {
  Tensor x({1, 2, 2, 1});
  x.values = {1, 2, 3, 4};
  EXPECT_EQ(pool(x, 2, 2, PoolMode::max, 1).values, std::vector<float>{4});
  EXPECT_EQ(pool(x, 2, 2, PoolMode::avg, 1).values, std::vector<float>{2.5f});
}

TEST(Pool, MatchesDirectLoopAndMaxDominatesAvg) {
  const auto x = gen_tensor_batch(2, 8, 8, 4, 3);
  const auto mx = pool(x, 2, 2, PoolMode::max, 3);
  const auto av = pool(x, 2, 2, PoolMode::avg, 2);
  EXPECT_EQ(mx.values, oracle::direct_pool(x.values, 2, 8, 8, 4, 2, 2, true));
  EXPECT_LE(max_relative_error(av.values, oracle::direct_pool(x.values, 2, 8, 8, 4, 2, 2, false)), 1e-12);
  for (std::size_t i = 0; i < mx.size(); ++i) EXPECT_GE(mx.values[i], av.values[i]);
}

TEST(Pool, NonDivisibleDims) {
  EXPECT_THROW(pool(gen_tensor_batch(1, 5, 4, 1, 0), 2, 2, PoolMode::max, 1), InvalidArgument);
}

TEST(Activation, ScalarValues) {
  EXPECT_EQ(activate(-3.0, Activation::relu), 0.0);
  EXPECT_EQ(activate(5.0, Activation::relu), 5.0);
  EXPECT_EQ(activate(0.0, Activation::sigmoid), 0.5);
  EXPECT_EQ(activate(0.0, Activation::tanh), 0.0);
}

TEST(Activation, Identities) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-20, 20);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    EXPECT_NEAR(activate(v, Activation::sigmoid) + activate(-v, Activation::sigmoid), 1.0, 1e-12);
    EXPECT_NEAR(activate(-v, Activation::tanh), -activate(v, Activation::tanh), 1e-12);
  }
  double prev = activate(-10.0, Activation::sigmoid);
  for (double v = -9.9; v <= 10.0; v += 0.1) {
    const double s = activate(v, Activation::sigmoid);
    EXPECT_GT(s, prev);
    prev = s;
  }
}

TEST(Activation, TensorReluIdempotent) {
  auto x = gen_tensor_batch(2, 4, 4, 3, 7);
  for (auto& v : x.values) v -= 0.5f;
  const auto once = activation(x, Activation::relu, 2);
  EXPECT_EQ(activation(once, Activation::relu, 3), once);
  const auto sig = activation(x, Activation::sigmoid, 4);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(sig.values[i], activate(x.values[i], Activation::sigmoid));
}

TEST(Multiply, OnesZerosAndScalarLoop) {
  const auto x = gen_tensor_batch(2, 3, 3, 2, 1);
  const auto y = gen_tensor_batch(2, 3, 3, 2, 2);
  EXPECT_EQ(multiply(x, Tensor(x.shape, 1.0f), 2), x);
  EXPECT_EQ(multiply(x, Tensor(x.shape, 0.0f), 2), Tensor(x.shape, 0.0f));
  const auto out = multiply(x, y, 3);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(out.values[i], x.values[i] * y.values[i]);
  EXPECT_THROW(multiply(x, gen_tensor_batch(1, 3, 3, 2, 1), 1), InvalidArgument);
}

TEST(TensorKernels, ThreadInvariantDigests) {
  const auto x = gen_tensor_batch(2, 12, 12, 6, 9);
  const auto f = gen_tensor_batch(3, 3, 6, 4, 8);
  for (std::size_t t : {2, 4, 8}) {
    EXPECT_EQ(digest(conv2d(x, f, t)), digest(conv2d(x, f, 1)));
    EXPECT_EQ(digest(pool(x, 3, 3, PoolMode::avg, t)), digest(pool(x, 3, 3, PoolMode::avg, 1)));
    EXPECT_EQ(digest(activation(x, Activation::tanh, t)), digest(activation(x, Activation::tanh, 1)));
  }
}

}  // namespace
}  // namespace dwarfs::kernels
