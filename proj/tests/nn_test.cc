// Copyright 2026 The TDP Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "tdp/errors.h"
#include "tdp/nn/graph.h"
#include "tdp/nn/layers.h"

namespace tdp::nn {
namespace {

using Builder = std::function<Expr(Graph&, std::vector<Expr>&)>;

// Builds a scalar loss from the given parameters, compares every analytic
// partial derivative with a central difference and returns the largest
// relative error.
double MaxGradientError(std::vector<Parameter*> params, const Builder& build) {
  auto loss_value = [&] {
    Graph g;
    std::vector<Expr> leaves;
    for (Parameter* p : params) leaves.push_back(g.Param(*p));
    return build(g, leaves).scalar();
  };
  for (Parameter* p : params) p->grad.setZero();
  {
    Graph g;
    std::vector<Expr> leaves;
    for (Parameter* p : params) leaves.push_back(g.Param(*p));
    g.Backward(build(g, leaves));
  }
  double worst = 0.0;
  const double h = 1e-6;
  for (Parameter* p : params) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      double& x = p->value.data()[i];
      const double saved = x;
      x = saved + h;
      const double up = loss_value();
      x = saved - h;
      const double down = loss_value();
      x = saved;
      const double numeric = (up - down) / (2 * h);
      const double analytic = p->grad.data()[i];
      const double err =
          std::abs(numeric - analytic) / std::max(1e-6, std::abs(numeric) + std::abs(analytic));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

class OpGradientTest : public ::testing::Test {
 protected:
  Parameter& P(int rows, int cols) {
    return pc_.Add("p" + std::to_string(counter_++), rows, cols, Init::kNormal, rng_, 1.0);
  }
  // A fixed random projection so that every output entry matters.
  Expr Project(Graph& g, Expr y) {
    std::mt19937_64 r(y.rows() * 131 + y.cols());
    std::normal_distribution<double> n;
    Matrix w(y.rows(), y.cols());
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = n(r);
    return SumAll(CwiseProduct(y, g.Input(w)));
  }

  ParameterCollection pc_;
  std::mt19937_64 rng_{7};
  int counter_ = 0;
};

constexpr double kTol = 1e-6;

TEST_F(OpGradientTest, ArithmeticOps) {
  Parameter& a = P(3, 4);
  Parameter& b = P(4, 2);
  Parameter& c = P(3, 4);
  Parameter& col = P(3, 1);
  EXPECT_LT(MaxGradientError({&a, &b}, [&](Graph& g, auto& x) {
              return Project(g, MatMul(x[0], x[1]));
            }), kTol);
  EXPECT_LT(MaxGradientError({&a, &c, &col}, [&](Graph& g, auto& x) {
              const Expr terms[] = {Add(x[0], x[2]), Sub(x[1], x[0]), CwiseProduct(x[0], x[1]),
                                    Scale(x[1], -2.5)};
              return Project(g, Sum(terms));
            }), kTol);
}

TEST_F(OpGradientTest, Nonlinearities) {
  Parameter& a = P(4, 3);
  EXPECT_LT(MaxGradientError({&a}, [&](Graph& g, auto& x) {
              const Expr terms[] = {Tanh(x[0]), Sigmoid(x[0]), Gelu(x[0])};
              return Project(g, Sum(terms));
            }), kTol);
  // Keep away from the kink at zero.
  a.value = a.value.unaryExpr([](double v) { return v + (v >= 0 ? 0.1 : -0.1); });
  EXPECT_LT(MaxGradientError({&a}, [&](Graph& g, auto& x) { return Project(g, Relu(x[0])); }),
            kTol);
}

TEST_F(OpGradientTest, ShapeOps) {
  Parameter& a = P(3, 5);
  Parameter& b = P(2, 5);
  Parameter& c = P(3, 2);
  EXPECT_LT(MaxGradientError({&a, &b, &c}, [&](Graph& g, auto& x) {
              const Expr rows[] = {x[0], x[1]};
              const Expr cols[] = {x[0], x[2]};
              const std::vector<int> pick = {4, 0, 4, 2};
              const Expr terms[] = {
                  SumAll(Scale(ConcatRows(rows), 0.5)), Project(g, ConcatCols(cols)),
                  Project(g, Rows(x[0], 1, 2)), Project(g, Cols(x[0], 2, 3)),
                  Project(g, SelectCols(x[0], pick)), Project(g, MeanCols(x[1])),
                  Project(g, Transpose(x[2]))};
              return Sum(terms);
            }), kTol);
}

TEST_F(OpGradientTest, NormalizationOps) {
  Parameter& a = P(5, 3);
  Parameter& gamma = P(5, 1);
  Parameter& beta = P(5, 1);
  EXPECT_LT(MaxGradientError({&a}, [&](Graph& g, auto& x) {
              return Project(g, SoftmaxCols(x[0]));
            }), kTol);
  EXPECT_LT(MaxGradientError({&a, &gamma, &beta}, [&](Graph& g, auto& x) {
              return Project(g, LayerNormCols(x[0], x[1], x[2]));
            }), 1e-5);
}

TEST_F(OpGradientTest, ScoringOps) {
  Parameter& a = P(4, 3);
  const std::vector<std::pair<int, int>> entries = {{0, 0}, {3, 2}, {1, 1}, {0, 0}};
  EXPECT_LT(MaxGradientError({&a}, [&](Graph&, auto& x) {
              return PickNegLogSoftmax(GatherEntries(x[0], entries), 2);
            }), kTol);
}

TEST_F(OpGradientTest, LstmBothDirections) {
  std::mt19937_64 rng(3);
  ParameterCollection pc;
  BiLstm lstm = BiLstm::Create(pc, "lstm", 3, 4, rng);
  Parameter& x = P(3, 5);
  std::vector<Parameter*> params = {&x};
  for (const auto& p : pc.all()) params.push_back(p.get());
  EXPECT_LT(MaxGradientError(params, [&](Graph& g, auto& leaves) {
              return Project(g, lstm(g, leaves[0]));
            }), 1e-5);
}

TEST(GraphTest, LstmMatchesStepwiseComposition) {
  std::mt19937_64 rng(11);
  ParameterCollection pc;
  Parameter& wx = pc.Add("wx", 8, 3, Init::kNormal, rng, 0.5);
  Parameter& wh = pc.Add("wh", 8, 2, Init::kNormal, rng, 0.5);
  Parameter& b = pc.Add("b", 8, 1, Init::kNormal, rng, 0.5);
  Parameter& x = pc.Add("x", 3, 4, Init::kNormal, rng, 1.0);
  Graph g;
  const Expr fused = Lstm(g.Param(x), g.Param(wx), g.Param(wh), g.Param(b), false);
  Expr h = g.Input(Matrix::Zero(2, 1));
  Expr c = g.Input(Matrix::Zero(2, 1));
  for (int t = 0; t < 4; ++t) {
    const Expr z = Add(Add(MatMul(g.Param(wx), Cols(g.Param(x), t, 1)),
                           MatMul(g.Param(wh), h)),
                       g.Param(b));
    const Expr i = Sigmoid(Rows(z, 0, 2));
    const Expr f = Sigmoid(Rows(z, 2, 2));
    const Expr gg = Tanh(Rows(z, 4, 2));
    const Expr o = Sigmoid(Rows(z, 6, 2));
    c = Add(CwiseProduct(f, c), CwiseProduct(i, gg));
    h = CwiseProduct(o, Tanh(c));
    EXPECT_TRUE(fused.value().col(t).isApprox(h.value(), 1e-12));
  }
}

TEST(GraphTest, FrozenParametersGetNoGradient) {
  std::mt19937_64 rng(1);
  ParameterCollection pc;
  Parameter& frozen = pc.Add("frozen/w", 2, 2, Init::kNormal, rng, 1.0);
  Parameter& live = pc.Add("live/w", 2, 2, Init::kNormal, rng, 1.0);
  pc.SetTrainable("frozen/", false);
  Graph g;
  g.Backward(SumAll(MatMul(g.Param(frozen), g.Param(live))));
  EXPECT_TRUE(frozen.grad.isZero());
  EXPECT_FALSE(live.grad.isZero());
  const Matrix before = frozen.value;
  Adam adam({.learning_rate = 0.1});
  adam.Step(pc);
  EXPECT_EQ(frozen.value, before);
  EXPECT_TRUE(live.grad.isZero());
}

TEST(GraphTest, ParamNodeIsSharedAndGradientsAccumulate) {
  std::mt19937_64 rng(1);
  ParameterCollection pc;
  Parameter& w = pc.Add("w", 1, 1, Init::kOne, rng);
  Graph g;
  const Expr a = g.Param(w);
  EXPECT_EQ(a.id, g.Param(w).id);
  g.Backward(SumAll(CwiseProduct(a, a)));  // d(w^2) = 2w
  EXPECT_DOUBLE_EQ(w.grad(0, 0), 2.0);
  Graph g2;
  g2.Backward(SumAll(Scale(g2.Param(w), 3.0)));
  EXPECT_DOUBLE_EQ(w.grad(0, 0), 5.0);
}

TEST(GraphTest, RejectsBadShapes) {
  Graph g;
  const Expr a = g.Input(Matrix::Zero(2, 3));
  const Expr b = g.Input(Matrix::Zero(2, 3));
  EXPECT_THROW(MatMul(a, b), PreconditionError);
  EXPECT_THROW(Rows(a, 1, 2), PreconditionError);
  EXPECT_THROW(g.Backward(a), PreconditionError);
  Graph other;
  EXPECT_THROW(Add(a, other.Input(Matrix::Zero(2, 3))), PreconditionError);
}

TEST(AdamTest, MinimizesQuadratic) {
  std::mt19937_64 rng(1);
  ParameterCollection pc;
  Parameter& w = pc.Add("w", 3, 1, Init::kNormal, rng, 1.0);
  Matrix target(3, 1);
  target << 1.0, -2.0, 0.5;
  Adam adam({.learning_rate = 0.05});
  for (int step = 0; step < 2000; ++step) {
    Graph g;
    const Expr d = Sub(g.Param(w), g.Input(target));
    g.Backward(SumAll(CwiseProduct(d, d)));
    adam.Step(pc);
  }
  EXPECT_TRUE(w.value.isApprox(target, 1e-3)) << w.value.transpose();
}

TEST(AdamTest, FirstStepMovesByLearningRate) {
  std::mt19937_64 rng(1);
  ParameterCollection pc;
  Parameter& w = pc.Add("w", 1, 1, Init::kOne, rng);
  Adam adam({.learning_rate = 0.01});
  Graph g;
  g.Backward(SumAll(Scale(g.Param(w), 4.0)));
  adam.Step(pc);
  EXPECT_NEAR(w.value(0, 0), 1.0 - 0.01, 1e-9);
}

TEST(ParameterCollectionTest, SnapshotRestoreAndLookup) {
  std::mt19937_64 rng(1);
  ParameterCollection pc;
  pc.Add("a", 2, 2, Init::kNormal, rng);
  EXPECT_THROW(pc.Add("a", 1, 1, Init::kZero, rng), PreconditionError);
  const auto snap = pc.Snapshot();
  pc.Get("a").value.setConstant(3.0);
  pc.Restore(snap);
  EXPECT_EQ(pc.Get("a").value, snap[0]);
  EXPECT_EQ(pc.Find("b"), nullptr);
  EXPECT_EQ(pc.num_values(), 4);
}

}  // namespace
}  // namespace tdp::nn
