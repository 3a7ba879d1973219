#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "seedgnn/nn.hpp"
#include "seedgnn/rng.hpp"

using namespace seedgnn;

namespace {

Matrix random_matrix(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

double weighted_sum(const Matrix& weights, const Matrix& values) {
  double acc = 0.0;
  for (std::size_t t = 0; t < values.size(); ++t) acc += weights.data()[t] * values.data()[t];
  return acc;
}

}  // namespace

TEST(Mlp, ConstructionShapesAndValidation) {
  const Mlp mlp({3, 16, 5});
  ASSERT_EQ(mlp.layers.size(), 2u);
  EXPECT_EQ(mlp.in_dim(), 3);
  EXPECT_EQ(mlp.out_dim(), 5);
  EXPECT_EQ(mlp.layers[0].w.rows(), 3);
  EXPECT_EQ(mlp.layers[0].w.cols(), 16);
  EXPECT_EQ(mlp.layers[0].b.rows(), 1);
  EXPECT_EQ(mlp.layers[1].w.rows(), 16);
  EXPECT_THROW(Mlp({4}), std::invalid_argument);
}

TEST(Mlp, GaussianInitMatchesTargetMoments) {
  Mlp mlp({100, 200});
  Rng rng(11);
  init_gaussian(mlp, rng);
  const double sigma = std::sqrt(2.0 / 100.0);
  for (const Matrix* t : {&mlp.layers[0].w, &mlp.layers[0].b}) {
    double mean = 0.0, sq = 0.0;
    for (std::size_t k = 0; k < t->size(); ++k) {
      mean += t->data()[k];
      sq += t->data()[k] * t->data()[k];
    }
    const double n = static_cast<double>(t->size());
    mean /= n;
    const double sd = std::sqrt(sq / n - mean * mean);
    EXPECT_NEAR(mean, 0.0, 3.5 * sigma / std::sqrt(n));
    EXPECT_NEAR(sd, sigma, 3.5 * sigma / std::sqrt(2.0 * n));
  }
}

TEST(Mlp, HandComputedForwardWithRectifiedOutput) {
  Mlp mlp({1, 2, 1});
  mlp.layers[0].w(0, 0) = 1.0;
  mlp.layers[0].w(0, 1) = -1.0;
  mlp.layers[0].b(0, 0) = 0.5;
  mlp.layers[0].b(0, 1) = 0.5;
  mlp.layers[1].w(0, 0) = 2.0;
  mlp.layers[1].w(1, 0) = 3.0;
  mlp.layers[1].b(0, 0) = -1.0;

  Matrix x(3, 1);
  x(0, 0) = 2.0;    // hidden (2.5, 0), output 2.5*2 - 1 = 4
  x(1, 0) = -4.0;   // hidden (0, 4.5), output 4.5*3 - 1 = 12.5
  x(2, 0) = 0.25;   // hidden (0.75, 0.25), output 1.5 + 0.75 - 1 = 1.25
  MlpCache cache;
  const Matrix out = mlp_apply(mlp, x, &cache);
  EXPECT_EQ(out(0, 0), 4.0);
  EXPECT_EQ(out(1, 0), 12.5);
  EXPECT_EQ(out(2, 0), 1.25);
  ASSERT_EQ(cache.post.size(), 2u);
  EXPECT_EQ(cache.post[0](0, 0), 2.5);
  EXPECT_EQ(cache.post[0](0, 1), 0.0);
  EXPECT_EQ(cache.post[0](1, 0), 0.0);
  EXPECT_EQ(cache.post[0](1, 1), 4.5);

  // A strongly negative output bias exercises the rectifier on the last layer.
  mlp.layers[1].b(0, 0) = -100.0;
  const Matrix clipped = mlp_apply(mlp, x);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(clipped(i, 0), 0.0);

  Matrix bad(2, 3);
  EXPECT_THROW(mlp_apply(mlp, bad), std::invalid_argument);
}

TEST(Mlp, OutputsAreNonnegativeForRandomNetworks) {
  Rng rng(12);
  Mlp mlp({4, 8, 3});
  init_gaussian(mlp, rng);
  const Matrix out = mlp_apply(mlp, random_matrix(20, 4, rng));
  for (std::size_t t = 0; t < out.size(); ++t) EXPECT_GE(out.data()[t], 0.0);
}

TEST(Mlp, BackwardMatchesFiniteDifferences) {
  Rng rng(13);
  Mlp mlp({3, 4, 2});
  init_gaussian(mlp, rng);
  Matrix input = random_matrix(5, 3, rng);
  const Matrix probe_weights = random_matrix(5, 2, rng);

  MlpCache cache;
  mlp_apply(mlp, input, &cache);
  Mlp grads = zeros_like(mlp);
  const Matrix d_input = mlp_backward(mlp, input, cache, probe_weights, grads);

  const auto loss_fn = [&]() { return weighted_sum(probe_weights, mlp_apply(mlp, input)); };
  std::vector<FdProbeSet> probes;
  for (std::size_t k = 0; k < mlp.layers.size(); ++k) {
    probes.push_back({&mlp.layers[k].w, &grads.layers[k].w});
    probes.push_back({&mlp.layers[k].b, &grads.layers[k].b});
  }
  probes.push_back({&input, &d_input});
  Rng probe_rng(14);
  EXPECT_LT(finite_difference_check(probes, loss_fn, probe_rng, 10), 1e-6);
}

TEST(SoftmaxRows, RowsSumToOneAndOrderingIsPreserved) {
  Rng rng(15);
  const Matrix x = random_matrix(9, 7, rng);
  const Matrix s = softmax_rows(x);
  for (int i = 0; i < 9; ++i) {
    double total = 0.0;
    int argmax_in = 0, argmax_out = 0;
    for (int j = 0; j < 7; ++j) {
      EXPECT_GT(s(i, j), 0.0);
      total += s(i, j);
      if (x(i, j) > x(i, argmax_in)) argmax_in = j;
      if (s(i, j) > s(i, argmax_out)) argmax_out = j;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_EQ(argmax_in, argmax_out);
  }
}

TEST(SoftmaxRows, ConstantRowIsExactlyUniform) {
  Matrix x(1, 4);
  x.fill(3.75);
  const Matrix s = softmax_rows(x);
  for (int j = 0; j < 4; ++j) EXPECT_EQ(s(0, j), 0.25);
}

TEST(SoftmaxRows, ShiftInvariantToTheBitOnExactInputs) {
  Rng rng(16);
  Matrix x(3, 6), shifted(3, 6);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 6; ++j) {
      x(i, j) = (rng.below_int(2048) - 1024) / 256.0;
      shifted(i, j) = x(i, j) + 256.0;
    }
  EXPECT_EQ(softmax_rows(x), softmax_rows(shifted));
}

TEST(SoftmaxRows, PermutingARowPermutesTheOutputBits) {
  const Rng root(17);
  for (int trial = 0; trial < 200; ++trial) {
    Rng rng = root.split(trial);
    const int n = 2 + rng.below_int(11);
    Matrix x(1, n);
    for (int j = 0; j < n; ++j) x(0, j) = 4.0 * rng.normal();
    const std::vector<int> perm = rng.permutation(n);
    Matrix px(1, n);
    for (int j = 0; j < n; ++j) px(0, perm[j]) = x(0, j);
    const Matrix s = softmax_rows(x);
    const Matrix ps = softmax_rows(px);
    for (int j = 0; j < n; ++j) ASSERT_EQ(s(0, j), ps(0, perm[j])) << "trial " << trial;
  }
}

TEST(SoftmaxRows, BackwardMatchesFiniteDifferences) {
  Rng rng(18);
  Matrix x = random_matrix(4, 5, rng);
  const Matrix probe_weights = random_matrix(4, 5, rng);
  const Matrix s = softmax_rows(x);
  const Matrix dx = softmax_rows_backward(s, probe_weights);
  const auto loss_fn = [&]() { return weighted_sum(probe_weights, softmax_rows(x)); };
  std::vector<FdProbeSet> probes{{&x, &dx}};
  Rng probe_rng(19);
  EXPECT_LT(finite_difference_check(probes, loss_fn, probe_rng, 20), 1e-8);
}

TEST(SymmetricNormalize, TotalMassIsHalfTheSumOfDimensions) {
  Rng rng(20);
  const Matrix x = random_matrix(6, 9, rng);
  const Matrix y = symmetric_normalize(x);
  double total = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    EXPECT_GT(y.data()[t], 0.0);
    EXPECT_LT(y.data()[t], 1.0);
    total += y.data()[t];
  }
  EXPECT_NEAR(total, (6.0 + 9.0) / 2.0, 1e-9);
}

TEST(SymmetricNormalize, SymmetricInputGivesBitwiseSymmetricOutput) {
  Rng rng(21);
  Matrix x(7, 7);
  for (int i = 0; i < 7; ++i)
    for (int j = i; j < 7; ++j) x(i, j) = x(j, i) = rng.normal();
  const Matrix y = symmetric_normalize(x);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) EXPECT_EQ(y(i, j), y(j, i));
}

TEST(SymmetricNormalize, BackwardMatchesFiniteDifferences) {
  Rng rng(22);
  Matrix x = random_matrix(5, 7, rng);
  const Matrix probe_weights = random_matrix(5, 7, rng);
  RowSoftmaxPair cache;
  symmetric_normalize_cached(x, cache);
  const Matrix dx = symmetric_normalize_backward(cache, probe_weights);
  const auto loss_fn = [&]() { return weighted_sum(probe_weights, symmetric_normalize(x)); };
  std::vector<FdProbeSet> probes{{&x, &dx}};
  Rng probe_rng(23);
  EXPECT_LT(finite_difference_check(probes, loss_fn, probe_rng, 20), 1e-8);
}

TEST(MatchingCrossEntropy, HandComputedValueAndGradient) {
  Matrix y(2, 2);
  y(0, 0) = 0.7;
  y(0, 1) = 0.3;
  y(1, 0) = 0.4;
  y(1, 1) = 0.6;
  Matrix dy;
  const double loss = matching_cross_entropy(y, {0, 1}, &dy);
  const double expected = -std::log(0.7 + kMatchEpsilon) - std::log(1.0 - 0.3 + kMatchEpsilon) -
                          std::log(1.0 - 0.4 + kMatchEpsilon) - std::log(0.6 + kMatchEpsilon);
  EXPECT_DOUBLE_EQ(loss, expected);
  EXPECT_DOUBLE_EQ(dy(0, 0), -1.0 / (0.7 + kMatchEpsilon));
  EXPECT_DOUBLE_EQ(dy(0, 1), 1.0 / (0.7 + kMatchEpsilon));
  EXPECT_DOUBLE_EQ(dy(1, 0), 1.0 / (0.6 + kMatchEpsilon));
  EXPECT_DOUBLE_EQ(dy(1, 1), -1.0 / (0.6 + kMatchEpsilon));
}

TEST(MatchingCrossEntropy, RowsWithUnknownTruthAreSkipped) {
  Matrix y(2, 3);
  y.fill(0.2);
  y(1, 2) = 0.9;
  Matrix dy;
  const double loss = matching_cross_entropy(y, {-1, 2}, &dy);
  const double expected = -std::log(1.0 - 0.2 + kMatchEpsilon) * 2 - std::log(0.9 + kMatchEpsilon);
  EXPECT_DOUBLE_EQ(loss, expected);
  for (int j = 0; j < 3; ++j) EXPECT_EQ(dy(0, j), 0.0);
}

TEST(MatchingCrossEntropy, RejectsMalformedTruth) {
  Matrix y(2, 2);
  y.fill(0.5);
  EXPECT_THROW(matching_cross_entropy(y, {0}), std::invalid_argument);
  EXPECT_THROW(matching_cross_entropy(y, {0, 2}), std::invalid_argument);
}

TEST(MatchingCrossEntropy, GradientMatchesFiniteDifferences) {
  Rng rng(24);
  Matrix y(4, 5);
  for (std::size_t t = 0; t < y.size(); ++t) y.data()[t] = 0.1 + 0.8 * rng.uniform();
  const std::vector<int> truth{2, -1, 0, 4};
  Matrix dy;
  matching_cross_entropy(y, truth, &dy);
  const auto loss_fn = [&]() { return matching_cross_entropy(y, truth); };
  std::vector<FdProbeSet> probes{{&y, &dy}};
  Rng probe_rng(25);
  EXPECT_LT(finite_difference_check(probes, loss_fn, probe_rng, 20), 1e-6);
}

TEST(Adam, ZeroGradientLeavesParametersUntouched) {
  Matrix w(2, 2);
  w.fill(1.5);
  const Matrix before = w;
  Matrix g(2, 2);
  Adam opt;
  opt.step({&w}, {&g});
  EXPECT_EQ(w, before);
  EXPECT_EQ(opt.steps_taken(), 1);
}

TEST(Adam, FirstStepMovesByLearningRateTimesSign) {
  Matrix w(1, 2);
  w(0, 0) = 5.0;
  w(0, 1) = -5.0;
  Matrix g(1, 2);
  g(0, 0) = 2.0;
  g(0, 1) = -0.001;
  Adam opt;
  opt.step({&w}, {&g});
  EXPECT_NEAR(w(0, 0), 5.0 - 0.01, 1e-9);
  EXPECT_NEAR(w(0, 1), -5.0 + 0.01, 1e-6);
}

TEST(Adam, DrivesAQuadraticToItsMinimum) {
  Matrix w(1, 1);
  Adam opt;
  for (int step = 0; step < 5000; ++step) {
    Matrix g(1, 1);
    g(0, 0) = 2.0 * (w(0, 0) - 3.0);
    opt.step({&w}, {&g});
  }
  EXPECT_NEAR(w(0, 0), 3.0, 1e-3);
}

TEST(Adam, RejectsShapeAndCountChanges) {
  Matrix w(2, 2), g(2, 2);
  Adam opt;
  opt.step({&w}, {&g});
  Matrix w2(3, 2), g2(3, 2);
  EXPECT_THROW(opt.step({&w2}, {&g2}), std::invalid_argument);
  EXPECT_THROW(opt.step({&w, &w}, {&g, &g}), std::invalid_argument);
  EXPECT_THROW(opt.step({&w}, {}), std::invalid_argument);
}

TEST(FiniteDifferenceCheck, LinearLossIsExactToRounding) {
  Rng rng(26);
  Matrix w = random_matrix(3, 4, rng);
  const Matrix c = random_matrix(3, 4, rng);
  const auto loss_fn = [&]() { return weighted_sum(c, w); };
  std::vector<FdProbeSet> probes{{&w, &c}};
  Rng probe_rng(27);
  EXPECT_LT(finite_difference_check(probes, loss_fn, probe_rng, 24), 1e-10);
}

TEST(FiniteDifferenceCheck, QuadraticLossStaysWellUnderTolerance) {
  Rng rng(28);
  Matrix w = random_matrix(3, 4, rng);
  Matrix grad(3, 4);
  const auto refresh = [&]() {
    for (std::size_t t = 0; t < w.size(); ++t) grad.data()[t] = 2.0 * w.data()[t];
  };
  refresh();
  const auto loss_fn = [&]() {
    double acc = 0.0;
    for (std::size_t t = 0; t < w.size(); ++t) acc += w.data()[t] * w.data()[t];
    return acc;
  };
  std::vector<FdProbeSet> probes{{&w, &grad}};
  Rng probe_rng(29);
  EXPECT_LT(finite_difference_check(probes, loss_fn, probe_rng, 24), 1e-8);
}

TEST(FiniteDifferenceCheck, FlagsAWrongGradient) {
  Matrix w(1, 1);
  w(0, 0) = 2.0;
  Matrix wrong(1, 1);
  wrong(0, 0) = 2.0 * w(0, 0) + 0.5;
  const auto loss_fn = [&]() { return w(0, 0) * w(0, 0); };
  std::vector<FdProbeSet> probes{{&w, &wrong}};
  Rng probe_rng(30);
  EXPECT_GT(finite_difference_check(probes, loss_fn, probe_rng, 4), 0.1);
}
