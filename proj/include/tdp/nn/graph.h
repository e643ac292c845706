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

// A small reverse-mode autodiff tape over dense double matrices.
//
// A Graph is built fresh for every forward pass. Values are computed
// eagerly when a node is added; Backward() then walks the tape in reverse.
// Vectors are column matrices and sequences are stored one column per
// position. Parameters live outside the graph and accumulate gradients
// across Backward() calls until cleared.

#ifndef TDP_NN_GRAPH_H_
#define TDP_NN_GRAPH_H_

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tdp::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  // Frozen parameters never receive gradients or optimizer updates.
  bool trainable = true;
  // Adam moments, sized lazily by the optimizer.
  Matrix m;
  Matrix v;
};

enum class Init { kZero, kGlorot, kNormal, kOne };

// Owns parameters by name. Pointers stay valid for the collection's
// lifetime.
class ParameterCollection {
 public:
  Parameter& Add(const std::string& name, int rows, int cols, Init init,
                 std::mt19937_64& rng, double scale = 0.1);
  Parameter* Find(const std::string& name);
  const Parameter* Find(const std::string& name) const;
  Parameter& Get(const std::string& name);

  std::span<const std::unique_ptr<Parameter>> all() const { return params_; }
  void ZeroGrad();
  // Marks every parameter whose name starts with `prefix`.
  void SetTrainable(const std::string& prefix, bool trainable);
  long num_values() const;

  // Copies of all values, for snapshot / restore.
  std::vector<Matrix> Snapshot() const;
  void Restore(const std::vector<Matrix>& values);

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::unordered_map<std::string, Parameter*> by_name_;
};

class Graph;

// Handle to a node of a Graph.
struct Expr {
  Graph* graph = nullptr;
  int id = -1;

  const Matrix& value() const;
  long rows() const { return value().rows(); }
  long cols() const { return value().cols(); }
  double scalar() const { return value()(0, 0); }
};

class Graph {
 public:
  // Called with the node's own index during Backward(). Only invoked when
  // the node needs a gradient.
  using BackwardFn = std::function<void(Graph& g, int self)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Expr Input(Matrix value);
  // A parameter leaf; adding the same parameter twice returns one node.
  Expr Param(Parameter& p);

  Expr AddNode(Matrix value, std::vector<int> inputs, BackwardFn backward);

  const Matrix& value(int id) const { return nodes_[id].value; }
  bool needs_grad(int id) const { return nodes_[id].needs_grad; }
  // Gradient accumulator of node `id`; only valid during/after Backward()
  // and only for nodes that need gradients.
  Matrix& grad(int id) { return nodes_[id].grad; }
  int size() const { return static_cast<int>(nodes_.size()); }

  // Back-propagates from a 1x1 node and adds parameter gradients to
  // Parameter::grad.
  void Backward(Expr loss);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::vector<int> inputs;
    BackwardFn backward;
    Parameter* param = nullptr;
    bool needs_grad = false;
  };
  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, int> param_nodes_;
};

// --- Operations. All operands must belong to the same graph. ---

Expr MatMul(Expr a, Expr b);
// Elementwise sum; `b` may also be a column broadcast across a's columns.
Expr Add(Expr a, Expr b);
Expr Sub(Expr a, Expr b);
Expr CwiseProduct(Expr a, Expr b);
Expr Scale(Expr a, double s);
Expr Sum(std::span<const Expr> terms);

Expr Tanh(Expr a);
Expr Sigmoid(Expr a);
Expr Relu(Expr a);
// Exact (erf-based) GELU.
Expr Gelu(Expr a);

Expr ConcatRows(std::span<const Expr> parts);
Expr ConcatCols(std::span<const Expr> parts);
Expr Rows(Expr a, int start, int count);
Expr Cols(Expr a, int start, int count);
// Gathers columns by index; indices may repeat.
Expr SelectCols(Expr a, std::span<const int> indices);
// Mean of a's columns as one column.
Expr MeanCols(Expr a);
Expr Transpose(Expr a);

// Softmax down each column.
Expr SoftmaxCols(Expr a);
// Normalizes each column over its rows, then scales and shifts by the
// gamma / beta columns.
Expr LayerNormCols(Expr x, Expr gamma, Expr beta, double eps = 1e-12);

// Column vector of a(r, c) for each (r, c) entry, in order.
Expr GatherEntries(Expr a, std::span<const std::pair<int, int>> entries);
// -log softmax(v)[index] for a column vector v, as a 1x1 node.
Expr PickNegLogSoftmax(Expr v, int index);
// Sum of all entries as 1x1.
Expr SumAll(Expr a);

// Single-direction LSTM over the columns of x (d x T) with fused gate
// weights wx (4h x d), wh (4h x h) and bias b (4h x 1) in i, f, g, o
// order. Returns h x T hidden states; with `reverse`, runs from the last
// column to the first but still stores state t in column t.
Expr Lstm(Expr x, Expr wx, Expr wh, Expr b, bool reverse);

}  // namespace tdp::nn

#endif  // TDP_NN_GRAPH_H_
