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

#include "tdp/nn/graph.h"

#include <cmath>

#include "tdp/errors.h"

namespace tdp::nn {

// --- ParameterCollection ---

Parameter& ParameterCollection::Add(const std::string& name, int rows, int cols,
                                    Init init, std::mt19937_64& rng, double scale) {
  if (by_name_.count(name)) throw PreconditionError("duplicate parameter " + name);
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->value = Matrix::Zero(rows, cols);
  switch (init) {
    case Init::kZero:
      break;
    case Init::kOne:
      p->value.setOnes();
      break;
    case Init::kGlorot: {
      const double bound = std::sqrt(6.0 / (rows + cols));
      std::uniform_real_distribution<double> u(-bound, bound);
      for (Eigen::Index i = 0; i < p->value.size(); ++i) p->value.data()[i] = u(rng);
      break;
    }
    case Init::kNormal: {
      std::normal_distribution<double> n(0.0, scale);
      for (Eigen::Index i = 0; i < p->value.size(); ++i) p->value.data()[i] = n(rng);
      break;
    }
  }
  p->grad = Matrix::Zero(rows, cols);
  Parameter& ref = *p;
  by_name_[name] = p.get();
  params_.push_back(std::move(p));
  return ref;
}

Parameter* ParameterCollection::Find(const std::string& name) {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : it->second;
}

const Parameter* ParameterCollection::Find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : it->second;
}

Parameter& ParameterCollection::Get(const std::string& name) {
  Parameter* p = Find(name);
  if (p == nullptr) throw PreconditionError("unknown parameter " + name);
  return *p;
}

void ParameterCollection::ZeroGrad() {
  for (auto& p : params_) p->grad.setZero();
}

void ParameterCollection::SetTrainable(const std::string& prefix, bool trainable) {
  for (auto& p : params_) {
    if (p->name.rfind(prefix, 0) == 0) p->trainable = trainable;
  }
}

long ParameterCollection::num_values() const {
  long n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

std::vector<Matrix> ParameterCollection::Snapshot() const {
  std::vector<Matrix> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p->value);
  return out;
}

void ParameterCollection::Restore(const std::vector<Matrix>& values) {
  if (values.size() != params_.size()) throw PreconditionError("snapshot size mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) params_[i]->value = values[i];
}

// --- Graph ---

const Matrix& Expr::value() const { return graph->value(id); }

Expr Graph::Input(Matrix value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return {this, size() - 1};
}

Expr Graph::Param(Parameter& p) {
  auto it = param_nodes_.find(&p);
  if (it != param_nodes_.end()) return {this, it->second};
  Node n;
  n.value = p.value;
  n.param = &p;
  n.needs_grad = p.trainable;
  nodes_.push_back(std::move(n));
  param_nodes_[&p] = size() - 1;
  return {this, size() - 1};
}

Expr Graph::AddNode(Matrix value, std::vector<int> inputs, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  for (int i : inputs) n.needs_grad = n.needs_grad || nodes_[i].needs_grad;
  n.inputs = std::move(inputs);
  n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return {this, size() - 1};
}

void Graph::Backward(Expr loss) {
  if (loss.graph != this) throw PreconditionError("loss belongs to another graph");
  if (value(loss.id).size() != 1) throw PreconditionError("loss must be a scalar");
  if (!nodes_[loss.id].needs_grad) return;
  for (int i = 0; i <= loss.id; ++i) {
    Node& n = nodes_[i];
    if (n.needs_grad) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  }
  nodes_[loss.id].grad(0, 0) = 1.0;
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.needs_grad) continue;
    if (n.backward) n.backward(*this, i);
    if (n.param != nullptr) n.param->grad += n.grad;
  }
}

namespace {

Graph& G(Expr a) { return *a.graph; }

void CheckSameGraph(Expr a, Expr b) {
  if (a.graph != b.graph) throw PreconditionError("operands from different graphs");
}

void CheckShape(bool ok, const char* op, Expr a, Expr b) {
  if (!ok) {
    throw PreconditionError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) +
                            "x" + std::to_string(a.cols()) + " vs " +
                            std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

// Applies an elementwise function whose derivative is expressed through the
// output (y) and input (x).
template <typename F, typename D>
Expr Elementwise(Expr a, F f, D dfdx) {
  Matrix y = a.value().unaryExpr(f);
  const int ia = a.id;
  return G(a).AddNode(std::move(y), {ia}, [ia, dfdx](Graph& g, int self) {
    if (!g.needs_grad(ia)) return;
    const Matrix& x = g.value(ia);
    const Matrix& y = g.value(self);
    g.grad(ia).array() += g.grad(self).array() * x.binaryExpr(y, dfdx).array();
  });
}

}  // namespace

Expr MatMul(Expr a, Expr b) {
  CheckSameGraph(a, b);
  CheckShape(a.cols() == b.rows(), "MatMul", a, b);
  const int ia = a.id, ib = b.id;
  return G(a).AddNode(a.value() * b.value(), {ia, ib}, [ia, ib](Graph& g, int self) {
    const Matrix& d = g.grad(self);
    if (g.needs_grad(ia)) g.grad(ia).noalias() += d * g.value(ib).transpose();
    if (g.needs_grad(ib)) g.grad(ib).noalias() += g.value(ia).transpose() * d;
  });
}

Expr Add(Expr a, Expr b) {
  CheckSameGraph(a, b);
  const int ia = a.id, ib = b.id;
  if (a.rows() == b.rows() && a.cols() == b.cols()) {
    return G(a).AddNode(a.value() + b.value(), {ia, ib}, [ia, ib](Graph& g, int self) {
      if (g.needs_grad(ia)) g.grad(ia) += g.grad(self);
      if (g.needs_grad(ib)) g.grad(ib) += g.grad(self);
    });
  }
  CheckShape(a.rows() == b.rows() && b.cols() == 1, "Add", a, b);
  Matrix y = a.value().colwise() + b.value().col(0);
  return G(a).AddNode(std::move(y), {ia, ib}, [ia, ib](Graph& g, int self) {
    if (g.needs_grad(ia)) g.grad(ia) += g.grad(self);
    if (g.needs_grad(ib)) g.grad(ib) += g.grad(self).rowwise().sum();
  });
}

Expr Sub(Expr a, Expr b) {
  CheckSameGraph(a, b);
  CheckShape(a.rows() == b.rows() && a.cols() == b.cols(), "Sub", a, b);
  const int ia = a.id, ib = b.id;
  return G(a).AddNode(a.value() - b.value(), {ia, ib}, [ia, ib](Graph& g, int self) {
    if (g.needs_grad(ia)) g.grad(ia) += g.grad(self);
    if (g.needs_grad(ib)) g.grad(ib) -= g.grad(self);
  });
}

Expr CwiseProduct(Expr a, Expr b) {
  CheckSameGraph(a, b);
  CheckShape(a.rows() == b.rows() && a.cols() == b.cols(), "CwiseProduct", a, b);
  const int ia = a.id, ib = b.id;
  return G(a).AddNode(a.value().cwiseProduct(b.value()), {ia, ib},
                      [ia, ib](Graph& g, int self) {
                        const Matrix& d = g.grad(self);
                        if (g.needs_grad(ia)) g.grad(ia) += d.cwiseProduct(g.value(ib));
                        if (g.needs_grad(ib)) g.grad(ib) += d.cwiseProduct(g.value(ia));
                      });
}

Expr Scale(Expr a, double s) {
  const int ia = a.id;
  return G(a).AddNode(a.value() * s, {ia}, [ia, s](Graph& g, int self) {
    if (g.needs_grad(ia)) g.grad(ia) += s * g.grad(self);
  });
}

Expr Sum(std::span<const Expr> terms) {
  if (terms.empty()) throw PreconditionError("Sum of no terms");
  Matrix y = terms[0].value();
  std::vector<int> ids = {terms[0].id};
  for (std::size_t i = 1; i < terms.size(); ++i) {
    CheckSameGraph(terms[0], terms[i]);
    CheckShape(terms[i].rows() == y.rows() && terms[i].cols() == y.cols(), "Sum", terms[0],
               terms[i]);
    y += terms[i].value();
    ids.push_back(terms[i].id);
  }
  return G(terms[0]).AddNode(std::move(y), ids, [ids](Graph& g, int self) {
    for (int i : ids) {
      if (g.needs_grad(i)) g.grad(i) += g.grad(self);
    }
  });
}

Expr Tanh(Expr a) {
  return Elementwise(
      a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Expr Sigmoid(Expr a) {
  return Elementwise(
      a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](double, double y) { return y * (1.0 - y); });
}

Expr Relu(Expr a) {
  return Elementwise(
      a, [](double x) { return x > 0 ? x : 0.0; },
      [](double x, double) { return x > 0 ? 1.0 : 0.0; });
}

Expr Gelu(Expr a) {
  return Elementwise(
      a, [](double x) { return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2)); },
      [](double x, double) {
        const double cdf = 0.5 * (1.0 + std::erf(x * M_SQRT1_2));
        const double pdf = std::exp(-0.5 * x * x) * 0.5 * M_2_SQRTPI * M_SQRT1_2;
        return cdf + x * pdf;
      });
}

Expr ConcatRows(std::span<const Expr> parts) {
  if (parts.empty()) throw PreconditionError("ConcatRows of nothing");
  long rows = 0;
  const long cols = parts[0].cols();
  std::vector<int> ids;
  for (Expr p : parts) {
    CheckSameGraph(parts[0], p);
    CheckShape(p.cols() == cols, "ConcatRows", parts[0], p);
    rows += p.rows();
    ids.push_back(p.id);
  }
  Matrix y(rows, cols);
  long r = 0;
  for (Expr p : parts) {
    y.middleRows(r, p.rows()) = p.value();
    r += p.rows();
  }
  return G(parts[0]).AddNode(std::move(y), ids, [ids](Graph& g, int self) {
    long r = 0;
    for (int i : ids) {
      const long n = g.value(i).rows();
      if (g.needs_grad(i)) g.grad(i) += g.grad(self).middleRows(r, n);
      r += n;
    }
  });
}

Expr ConcatCols(std::span<const Expr> parts) {
  if (parts.empty()) throw PreconditionError("ConcatCols of nothing");
  long cols = 0;
  const long rows = parts[0].rows();
  std::vector<int> ids;
  for (Expr p : parts) {
    CheckSameGraph(parts[0], p);
    CheckShape(p.rows() == rows, "ConcatCols", parts[0], p);
    cols += p.cols();
    ids.push_back(p.id);
  }
  Matrix y(rows, cols);
  long c = 0;
  for (Expr p : parts) {
    y.middleCols(c, p.cols()) = p.value();
    c += p.cols();
  }
  return G(parts[0]).AddNode(std::move(y), ids, [ids](Graph& g, int self) {
    long c = 0;
    for (int i : ids) {
      const long n = g.value(i).cols();
      if (g.needs_grad(i)) g.grad(i) += g.grad(self).middleCols(c, n);
      c += n;
    }
  });
}

Expr Rows(Expr a, int start, int count) {
  if (start < 0 || count < 0 || start + count > a.rows()) {
    throw PreconditionError("Rows: range out of bounds");
  }
  const int ia = a.id;
  return G(a).AddNode(a.value().middleRows(start, count), {ia},
                      [ia, start, count](Graph& g, int self) {
                        if (g.needs_grad(ia)) g.grad(ia).middleRows(start, count) += g.grad(self);
                      });
}

Expr Cols(Expr a, int start, int count) {
  if (start < 0 || count < 0 || start + count > a.cols()) {
    throw PreconditionError("Cols: range out of bounds");
  }
  const int ia = a.id;
  return G(a).AddNode(a.value().middleCols(start, count), {ia},
                      [ia, start, count](Graph& g, int self) {
                        if (g.needs_grad(ia)) g.grad(ia).middleCols(start, count) += g.grad(self);
                      });
}

Expr SelectCols(Expr a, std::span<const int> indices) {
  std::vector<int> idx(indices.begin(), indices.end());
  Matrix y(a.rows(), static_cast<long>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    if (idx[j] < 0 || idx[j] >= a.cols()) throw PreconditionError("SelectCols: bad index");
    y.col(j) = a.value().col(idx[j]);
  }
  const int ia = a.id;
  return G(a).AddNode(std::move(y), {ia}, [ia, idx](Graph& g, int self) {
    if (!g.needs_grad(ia)) return;
    Matrix& ga = g.grad(ia);
    const Matrix& d = g.grad(self);
    for (std::size_t j = 0; j < idx.size(); ++j) ga.col(idx[j]) += d.col(j);
  });
}

Expr MeanCols(Expr a) {
  if (a.cols() == 0) throw PreconditionError("MeanCols of an empty matrix");
  const int ia = a.id;
  const double inv = 1.0 / static_cast<double>(a.cols());
  return G(a).AddNode(a.value().rowwise().mean(), {ia}, [ia, inv](Graph& g, int self) {
    if (g.needs_grad(ia)) g.grad(ia).colwise() += g.grad(self).col(0) * inv;
  });
}

Expr Transpose(Expr a) {
  const int ia = a.id;
  return G(a).AddNode(a.value().transpose(), {ia}, [ia](Graph& g, int self) {
    if (g.needs_grad(ia)) g.grad(ia) += g.grad(self).transpose();
  });
}

Expr SoftmaxCols(Expr a) {
  Matrix y = a.value();
  for (long c = 0; c < y.cols(); ++c) {
    auto col = y.col(c);
    col.array() = (col.array() - col.maxCoeff()).exp();
    col /= col.sum();
  }
  const int ia = a.id;
  return G(a).AddNode(std::move(y), {ia}, [ia](Graph& g, int self) {
    if (!g.needs_grad(ia)) return;
    const Matrix& y = g.value(self);
    const Matrix& d = g.grad(self);
    const Eigen::RowVectorXd dots = (d.cwiseProduct(y)).colwise().sum();
    g.grad(ia).array() += y.array() * (d.rowwise() - dots).array();
  });
}

Expr LayerNormCols(Expr x, Expr gamma, Expr beta, double eps) {
  CheckSameGraph(x, gamma);
  CheckSameGraph(x, beta);
  CheckShape(gamma.rows() == x.rows() && gamma.cols() == 1, "LayerNormCols", x, gamma);
  CheckShape(beta.rows() == x.rows() && beta.cols() == 1, "LayerNormCols", x, beta);
  const long n = x.rows();
  auto xhat = std::make_shared<Matrix>(x.rows(), x.cols());
  auto inv_std = std::make_shared<Eigen::RowVectorXd>(x.cols());
  for (long c = 0; c < x.cols(); ++c) {
    const auto col = x.value().col(c);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().mean();
    (*inv_std)(c) = 1.0 / std::sqrt(var + eps);
    xhat->col(c) = (col.array() - mean) * (*inv_std)(c);
  }
  Matrix y = (xhat->array().colwise() * gamma.value().col(0).array()).matrix();
  y.colwise() += beta.value().col(0);
  const int ix = x.id, ig = gamma.id, ib = beta.id;
  return G(x).AddNode(std::move(y), {ix, ig, ib},
                      [ix, ig, ib, n, xhat, inv_std](Graph& g, int self) {
                        const Matrix& d = g.grad(self);
                        if (g.needs_grad(ig)) {
                          g.grad(ig) += d.cwiseProduct(*xhat).rowwise().sum();
                        }
                        if (g.needs_grad(ib)) g.grad(ib) += d.rowwise().sum();
                        if (!g.needs_grad(ix)) return;
                        const Matrix dxhat =
                            (d.array().colwise() * g.value(ig).col(0).array()).matrix();
                        const Eigen::RowVectorXd s1 = dxhat.colwise().sum();
                        const Eigen::RowVectorXd s2 = dxhat.cwiseProduct(*xhat).colwise().sum();
                        Matrix dx = n * dxhat;
                        dx.rowwise() -= s1;
                        dx -= (xhat->array().rowwise() * s2.array()).matrix();
                        dx = (dx.array().rowwise() * (inv_std->array() / n)).matrix();
                        g.grad(ix) += dx;
                      });
}

Expr GatherEntries(Expr a, std::span<const std::pair<int, int>> entries) {
  std::vector<std::pair<int, int>> e(entries.begin(), entries.end());
  Matrix y(static_cast<long>(e.size()), 1);
  for (std::size_t i = 0; i < e.size(); ++i) {
    const auto [r, c] = e[i];
    if (r < 0 || r >= a.rows() || c < 0 || c >= a.cols()) {
      throw PreconditionError("GatherEntries: bad entry");
    }
    y(static_cast<long>(i), 0) = a.value()(r, c);
  }
  const int ia = a.id;
  return G(a).AddNode(std::move(y), {ia}, [ia, e](Graph& g, int self) {
    if (!g.needs_grad(ia)) return;
    for (std::size_t i = 0; i < e.size(); ++i) {
      g.grad(ia)(e[i].first, e[i].second) += g.grad(self)(static_cast<long>(i), 0);
    }
  });
}

Expr PickNegLogSoftmax(Expr v, int index) {
  if (v.cols() != 1 || index < 0 || index >= v.rows()) {
    throw PreconditionError("PickNegLogSoftmax: bad operand or index");
  }
  const auto col = v.value().col(0);
  const double max = col.maxCoeff();
  auto probs = std::make_shared<Vector>((col.array() - max).exp());
  const double z = probs->sum();
  *probs /= z;
  Matrix y(1, 1);
  y(0, 0) = max + std::log(z) - col(index);
  const int iv = v.id;
  return G(v).AddNode(std::move(y), {iv}, [iv, index, probs](Graph& g, int self) {
    if (!g.needs_grad(iv)) return;
    const double d = g.grad(self)(0, 0);
    g.grad(iv).col(0) += d * *probs;
    g.grad(iv)(index, 0) -= d;
  });
}

Expr SumAll(Expr a) {
  Matrix y(1, 1);
  y(0, 0) = a.value().sum();
  const int ia = a.id;
  return G(a).AddNode(std::move(y), {ia}, [ia](Graph& g, int self) {
    if (g.needs_grad(ia)) g.grad(ia).array() += g.grad(self)(0, 0);
  });
}

namespace {

struct LstmState {
  Matrix gates;  // 4h x T activated i, f, g, o
  Matrix cells;  // h x T
  std::vector<long> steps;  // columns in processing order
};

double Sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Expr Lstm(Expr x, Expr wx, Expr wh, Expr b, bool reverse) {
  CheckSameGraph(x, wx);
  CheckSameGraph(x, wh);
  CheckSameGraph(x, b);
  const long h = wh.cols();
  const long t_len = x.cols();
  if (wh.rows() != 4 * h || wx.rows() != 4 * h || wx.cols() != x.rows() ||
      b.rows() != 4 * h || b.cols() != 1) {
    throw PreconditionError("Lstm: inconsistent weight shapes");
  }
  auto st = std::make_shared<LstmState>();
  st->gates.resize(4 * h, t_len);
  st->cells.resize(h, t_len);
  for (long t = 0; t < t_len; ++t) st->steps.push_back(reverse ? t_len - 1 - t : t);

  Matrix z_all = wx.value() * x.value();
  z_all.colwise() += b.value().col(0);
  Matrix hidden(h, t_len);
  Vector h_prev = Vector::Zero(h);
  Vector c_prev = Vector::Zero(h);
  for (long t : st->steps) {
    Vector z = z_all.col(t) + wh.value() * h_prev;
    auto gates = st->gates.col(t);
    for (long k = 0; k < h; ++k) {
      gates(k) = Sig(z(k));
      gates(h + k) = Sig(z(h + k));
      gates(2 * h + k) = std::tanh(z(2 * h + k));
      gates(3 * h + k) = Sig(z(3 * h + k));
    }
    c_prev = gates.segment(h, h).cwiseProduct(c_prev) +
             gates.segment(0, h).cwiseProduct(gates.segment(2 * h, h));
    st->cells.col(t) = c_prev;
    h_prev = gates.segment(3 * h, h).cwiseProduct(c_prev.array().tanh().matrix());
    hidden.col(t) = h_prev;
  }

  const int ix = x.id, iwx = wx.id, iwh = wh.id, ib = b.id;
  return G(x).AddNode(std::move(hidden), {ix, iwx, iwh, ib},
                      [ix, iwx, iwh, ib, h, st](Graph& g, int self) {
    const Matrix& dh_out = g.grad(self);
    const Matrix& hs = g.value(self);
    const Matrix& whv = g.value(iwh);
    Matrix dz(4 * h, hs.cols());
    Vector dh_next = Vector::Zero(h);
    Vector dc_next = Vector::Zero(h);
    Matrix dwh = Matrix::Zero(4 * h, h);
    for (long s = static_cast<long>(st->steps.size()) - 1; s >= 0; --s) {
      const long t = st->steps[s];
      const auto gates = st->gates.col(t);
      const auto i = gates.segment(0, h).array();
      const auto f = gates.segment(h, h).array();
      const auto gg = gates.segment(2 * h, h).array();
      const auto o = gates.segment(3 * h, h).array();
      const Eigen::ArrayXd tc = st->cells.col(t).array().tanh();
      const Eigen::ArrayXd dh = dh_out.col(t).array() + dh_next.array();
      const Eigen::ArrayXd dc = dh * o * (1.0 - tc.square()) + dc_next.array();
      Eigen::ArrayXd c_prev = Eigen::ArrayXd::Zero(h);
      Vector h_prev = Vector::Zero(h);
      if (s > 0) {
        c_prev = st->cells.col(st->steps[s - 1]).array();
        h_prev = hs.col(st->steps[s - 1]);
      }
      auto dzt = dz.col(t);
      dzt.segment(0, h) = (dc * gg * i * (1.0 - i)).matrix();
      dzt.segment(h, h) = (dc * c_prev * f * (1.0 - f)).matrix();
      dzt.segment(2 * h, h) = (dc * i * (1.0 - gg.square())).matrix();
      dzt.segment(3 * h, h) = (dh * tc * o * (1.0 - o)).matrix();
      dc_next = (dc * f).matrix();
      dh_next.noalias() = whv.transpose() * dzt;
      if (s > 0) dwh.noalias() += dzt * h_prev.transpose();
    }
    if (g.needs_grad(iwh)) g.grad(iwh) += dwh;
    if (g.needs_grad(iwx)) g.grad(iwx).noalias() += dz * g.value(ix).transpose();
    if (g.needs_grad(ix)) g.grad(ix).noalias() += g.value(iwx).transpose() * dz;
    if (g.needs_grad(ib)) g.grad(ib) += dz.rowwise().sum();
  });
}

}  // namespace tdp::nn
