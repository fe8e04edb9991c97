#include "ganlab/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <utility>

namespace ganlab {

namespace {

using DataPtr = std::shared_ptr<const TensorData>;

DataPtr make_data(int rows, int cols, std::vector<double> v) {
  auto d = std::make_shared<TensorData>();
  d->rows = rows;
  d->cols = cols;
  d->v = std::move(v);
  return d;
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(std::string(op) + ": incompatible shapes " + a.shape_str() +
                              " and " + b.shape_str());
}

void require_defined(const char* op, const Tensor& t) {
  if (!t.defined()) throw std::invalid_argument(std::string(op) + ": undefined tensor");
}

// Records the op if any input is attached (constants become leaves on the
// same graph) and wraps the result; detached in, detached out.
Tensor finish(OpKind kind, std::initializer_list<const Tensor*> inputs, OpAttrs attrs,
              DataPtr out) {
  std::shared_ptr<Graph> g;
  for (const Tensor* t : inputs) {
    if (!t->attached()) continue;
    if (g && g != t->graph())
      throw std::invalid_argument(std::string(op_name(kind)) + ": inputs on different graphs");
    g = t->graph();
  }
  if (!g) return Tensor::wrap(std::move(out));
  std::array<int, 2> ids = {-1, -1};
  std::size_t i = 0;
  for (const Tensor* t : inputs) {
    ids[i++] = t->attached() ? t->node() : g->leaf(*t).node();
  }
  const int id = g->record(kind, ids[0], ids[1], std::move(attrs), std::move(out));
  return g->handle(id);
}

// Flat index of (i, j) in an operand broadcast to an output of width c.
inline std::size_t bidx(const TensorData& t, int i, int j, int c) {
  if (t.rows == 1 && t.cols == 1) return 0;
  if (t.rows == 1) return static_cast<std::size_t>(j);
  return static_cast<std::size_t>(i) * c + j;
}

template <class F>
Tensor ewise_binary(const char* name, OpKind kind, const Tensor& a, const Tensor& b, F f) {
  require_defined(name, a);
  require_defined(name, b);
  const int r = std::max(a.rows(), b.rows());
  const int c = std::max(a.cols(), b.cols());
  auto compatible = [&](const Tensor& t) {
    return (t.rows() == r && t.cols() == c) || (t.rows() == 1 && t.cols() == 1) ||
           (t.rows() == 1 && t.cols() == c);
  };
  if (!compatible(a) || !compatible(b)) shape_error(name, a, b);
  const TensorData& da = *a.data();
  const TensorData& db = *b.data();
  std::vector<double> v(static_cast<std::size_t>(r) * c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j)
      v[static_cast<std::size_t>(i) * c + j] = f(da.v[bidx(da, i, j, c)], db.v[bidx(db, i, j, c)]);
  return finish(kind, {&a, &b}, {}, make_data(r, c, std::move(v)));
}

template <class F>
Tensor ewise_unary(const char* name, OpKind kind, const Tensor& a, OpAttrs attrs, F f) {
  require_defined(name, a);
  const std::vector<double>& in = a.values();
  std::vector<double> v(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) v[i] = f(in[i]);
  return finish(kind, {&a}, std::move(attrs), make_data(a.rows(), a.cols(), std::move(v)));
}

Tensor ones(int rows, int cols) { return Tensor::filled(rows, cols, 1.0); }

}  // namespace

const char* op_name(OpKind k) {
  switch (k) {
    case OpKind::leaf: return "leaf";
    case OpKind::add: return "add";
    case OpKind::sub: return "sub";
    case OpKind::mul: return "mul";
    case OpKind::neg: return "neg";
    case OpKind::scale: return "scale";
    case OpKind::matmul: return "matmul";
    case OpKind::transpose: return "transpose";
    case OpKind::sum: return "sum";
    case OpKind::mean: return "mean";
    case OpKind::log: return "log";
    case OpKind::exp: return "exp";
    case OpKind::square: return "square";
    case OpKind::sqrt: return "sqrt";
    case OpKind::abs: return "abs";
    case OpKind::max_with: return "max_with";
    case OpKind::relu: return "relu";
    case OpKind::leaky_relu: return "leaky_relu";
    case OpKind::tanh: return "tanh";
    case OpKind::sigmoid: return "sigmoid";
    case OpKind::log_softmax: return "log_softmax";
    case OpKind::concat: return "concat";
    case OpKind::select_rows: return "select_rows";
    case OpKind::row_l2_norm: return "row_l2_norm";
  }
  return "unknown";
}

std::vector<OpKind> all_op_kinds() {
  return {OpKind::add,     OpKind::sub,        OpKind::mul,         OpKind::neg,
          OpKind::scale,   OpKind::matmul,     OpKind::transpose,   OpKind::sum,
          OpKind::mean,    OpKind::log,        OpKind::exp,         OpKind::square,
          OpKind::sqrt,    OpKind::abs,        OpKind::max_with,    OpKind::relu,
          OpKind::leaky_relu, OpKind::tanh,    OpKind::sigmoid,     OpKind::log_softmax,
          OpKind::concat,  OpKind::select_rows, OpKind::row_l2_norm};
}

// ---- graph ---------------------------------------------------------------

std::shared_ptr<Graph> Graph::create() { return std::make_shared<Graph>(); }

Tensor Graph::leaf(const Tensor& t) {
  if (!t.defined()) throw std::invalid_argument("Graph::leaf: undefined tensor");
  const int id = record(OpKind::leaf, -1, -1, {}, t.data());
  return handle(id);
}

Tensor Graph::handle(int node_id) {
  if (node_id < 0 || node_id >= static_cast<int>(nodes_.size()))
    throw std::invalid_argument("Graph::handle: no node " + std::to_string(node_id));
  return Tensor(nodes_[static_cast<std::size_t>(node_id)].value, shared_from_this(), node_id);
}

int Graph::record(OpKind kind, int a, int b, OpAttrs attrs, DataPtr value) {
  Node n;
  n.kind = kind;
  n.in = {a, b};
  n.attrs = std::move(attrs);
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  ++generation_;
  return static_cast<int>(nodes_.size()) - 1;
}

bool Graph::replay_matches() {
  const std::size_t count = nodes_.size();
  for (std::size_t id = 0; id < count; ++id) {
    const Node& n = nodes_[id];
    if (n.kind == OpKind::leaf) continue;
    std::vector<Tensor> ins;
    for (int in : n.in)
      if (in >= 0) ins.push_back(Tensor::wrap(nodes_[static_cast<std::size_t>(in)].value));
    const Tensor redo = apply(n.kind, ins, n.attrs);
    if (redo.values() != n.value->v) return false;
  }
  return true;
}

// ---- forward ops -----------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b) {
  return ewise_binary("add", OpKind::add, a, b, [](double x, double y) { return x + y; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return ewise_binary("sub", OpKind::sub, a, b, [](double x, double y) { return x - y; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return ewise_binary("mul", OpKind::mul, a, b, [](double x, double y) { return x * y; });
}

Tensor neg(const Tensor& a) {
  return ewise_unary("neg", OpKind::neg, a, {}, [](double x) { return -x; });
}

Tensor scale(const Tensor& a, double c) {
  OpAttrs at;
  at.c = c;
  return ewise_unary("scale", OpKind::scale, a, at, [c](double x) { return c * x; });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_defined("matmul", a);
  require_defined("matmul", b);
  if (a.cols() != b.rows()) shape_error("matmul", a, b);
  const int m = a.rows(), k = a.cols(), n = b.cols();
  const double* pa = a.values().data();
  const double* pb = b.values().data();
  std::vector<double> v(static_cast<std::size_t>(m) * n, 0.0);
  for (int i = 0; i < m; ++i) {
    double* out_row = v.data() + static_cast<std::size_t>(i) * n;
    const double* a_row = pa + static_cast<std::size_t>(i) * k;
    for (int kk = 0; kk < k; ++kk) {
      const double av = a_row[kk];
      if (av == 0.0) continue;
      const double* b_row = pb + static_cast<std::size_t>(kk) * n;
      for (int j = 0; j < n; ++j) out_row[j] += av * b_row[j];
    }
  }
  return finish(OpKind::matmul, {&a, &b}, {}, make_data(m, n, std::move(v)));
}

Tensor transpose(const Tensor& a) {
  require_defined("transpose", a);
  const int r = a.rows(), c = a.cols();
  std::vector<double> v(static_cast<std::size_t>(r) * c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j)
      v[static_cast<std::size_t>(j) * r + i] = a.values()[static_cast<std::size_t>(i) * c + j];
  return finish(OpKind::transpose, {&a}, {}, make_data(c, r, std::move(v)));
}

Tensor sum(const Tensor& a) {
  require_defined("sum", a);
  double s = 0.0;
  for (double x : a.values()) s += x;
  return finish(OpKind::sum, {&a}, {}, make_data(1, 1, {s}));
}

Tensor mean(const Tensor& a) {
  require_defined("mean", a);
  double s = 0.0;
  for (double x : a.values()) s += x;
  return finish(OpKind::mean, {&a}, {}, make_data(1, 1, {s / static_cast<double>(a.size())}));
}

Tensor log(const Tensor& a) {
  return ewise_unary("log", OpKind::log, a, {}, [](double x) {
    if (x <= 0.0)
      throw NumericDomainError("log: input must be strictly positive, got " + std::to_string(x));
    return std::log(x);
  });
}

Tensor exp(const Tensor& a) {
  return ewise_unary("exp", OpKind::exp, a, {}, [](double x) { return std::exp(x); });
}

Tensor square(const Tensor& a) {
  return ewise_unary("square", OpKind::square, a, {}, [](double x) { return x * x; });
}

Tensor sqrt(const Tensor& a) {
  return ewise_unary("sqrt", OpKind::sqrt, a, {}, [](double x) {
    if (x < 0.0)
      throw NumericDomainError("sqrt: input must be non-negative, got " + std::to_string(x));
    return std::sqrt(x);
  });
}

Tensor abs(const Tensor& a) {
  return ewise_unary("abs", OpKind::abs, a, {}, [](double x) { return std::abs(x); });
}

Tensor max_with(const Tensor& a, double c) {
  OpAttrs at;
  at.c = c;
  return ewise_unary("max_with", OpKind::max_with, a, at,
                     [c](double x) { return std::max(x, c); });
}

Tensor relu(const Tensor& a) {
  return ewise_unary("relu", OpKind::relu, a, {}, [](double x) { return x > 0.0 ? x : 0.0; });
}

Tensor leaky_relu(const Tensor& a, double slope) {
  OpAttrs at;
  at.c = slope;
  return ewise_unary("leaky_relu", OpKind::leaky_relu, a, at,
                     [slope](double x) { return x > 0.0 ? x : slope * x; });
}

Tensor tanh(const Tensor& a) {
  return ewise_unary("tanh", OpKind::tanh, a, {}, [](double x) { return std::tanh(x); });
}

Tensor sigmoid(const Tensor& a) {
  return ewise_unary("sigmoid", OpKind::sigmoid, a, {},
                     [](double x) { return 1.0 / (1.0 + std::exp(-x)); });
}

Tensor log_softmax(const Tensor& a, int axis) {
  require_defined("log_softmax", a);
  if (axis != 0 && axis != 1)
    throw std::invalid_argument("log_softmax: axis must be 0 or 1, got " + std::to_string(axis));
  const int r = a.rows(), c = a.cols();
  std::vector<double> v(static_cast<std::size_t>(r) * c);
  const auto& in = a.values();
  auto slice = [&](int fixed, int len, auto idx) {
    (void)fixed;
    double mx = in[idx(0)];
    for (int t = 1; t < len; ++t) mx = std::max(mx, in[idx(t)]);
    double se = 0.0;
    for (int t = 0; t < len; ++t) se += std::exp(in[idx(t)] - mx);
    const double lse = mx + std::log(se);
    for (int t = 0; t < len; ++t) v[idx(t)] = in[idx(t)] - lse;
  };
  if (axis == 1) {
    for (int i = 0; i < r; ++i)
      slice(i, c, [&, i](int t) { return static_cast<std::size_t>(i) * c + t; });
  } else {
    for (int j = 0; j < c; ++j)
      slice(j, r, [&, j](int t) { return static_cast<std::size_t>(t) * c + j; });
  }
  OpAttrs at;
  at.axis = axis;
  return finish(OpKind::log_softmax, {&a}, at, make_data(r, c, std::move(v)));
}

Tensor concat(const Tensor& a, const Tensor& b, int axis) {
  require_defined("concat", a);
  require_defined("concat", b);
  if (axis != 0 && axis != 1)
    throw std::invalid_argument("concat: axis must be 0 or 1, got " + std::to_string(axis));
  OpAttrs at;
  at.axis = axis;
  if (axis == 1) {
    if (a.rows() != b.rows()) shape_error("concat", a, b);
    const int r = a.rows(), ca = a.cols(), cb = b.cols();
    std::vector<double> v(static_cast<std::size_t>(r) * (ca + cb));
    for (int i = 0; i < r; ++i) {
      std::memcpy(v.data() + static_cast<std::size_t>(i) * (ca + cb),
                  a.values().data() + static_cast<std::size_t>(i) * ca, sizeof(double) * ca);
      std::memcpy(v.data() + static_cast<std::size_t>(i) * (ca + cb) + ca,
                  b.values().data() + static_cast<std::size_t>(i) * cb, sizeof(double) * cb);
    }
    return finish(OpKind::concat, {&a, &b}, at, make_data(r, ca + cb, std::move(v)));
  }
  if (a.cols() != b.cols()) shape_error("concat", a, b);
  std::vector<double> v;
  v.reserve(a.size() + b.size());
  v.insert(v.end(), a.values().begin(), a.values().end());
  v.insert(v.end(), b.values().begin(), b.values().end());
  return finish(OpKind::concat, {&a, &b}, at, make_data(a.rows() + b.rows(), a.cols(), std::move(v)));
}

Tensor select_rows(const Tensor& a, const std::vector<int>& rows) {
  require_defined("select_rows", a);
  if (rows.empty()) throw std::invalid_argument("select_rows: empty index list");
  const int c = a.cols();
  std::vector<double> v(rows.size() * static_cast<std::size_t>(c));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int ri = rows[i];
    if (ri < 0 || ri >= a.rows())
      throw std::invalid_argument("select_rows: index " + std::to_string(ri) +
                                  " out of range for " + a.shape_str());
    std::memcpy(v.data() + i * c, a.values().data() + static_cast<std::size_t>(ri) * c,
                sizeof(double) * c);
  }
  OpAttrs at;
  at.rows = rows;
  return finish(OpKind::select_rows, {&a}, at,
                make_data(static_cast<int>(rows.size()), c, std::move(v)));
}

Tensor row_l2_norm(const Tensor& a) {
  require_defined("row_l2_norm", a);
  const int r = a.rows(), c = a.cols();
  std::vector<double> v(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) {
    double s = 0.0;
    for (int j = 0; j < c; ++j) {
      const double x = a.values()[static_cast<std::size_t>(i) * c + j];
      s += x * x;
    }
    v[static_cast<std::size_t>(i)] = std::sqrt(s);
  }
  return finish(OpKind::row_l2_norm, {&a}, {}, make_data(r, 1, std::move(v)));
}

Tensor apply(OpKind kind, const std::vector<Tensor>& inputs, const OpAttrs& attrs) {
  auto want = [&](std::size_t n) {
    if (inputs.size() != n)
      throw std::invalid_argument(std::string(op_name(kind)) + ": expected " + std::to_string(n) +
                                  " inputs, got " + std::to_string(inputs.size()));
  };
  switch (kind) {
    case OpKind::leaf: throw std::invalid_argument("apply: leaf is not an op");
    case OpKind::add: want(2); return add(inputs[0], inputs[1]);
    case OpKind::sub: want(2); return sub(inputs[0], inputs[1]);
    case OpKind::mul: want(2); return mul(inputs[0], inputs[1]);
    case OpKind::neg: want(1); return neg(inputs[0]);
    case OpKind::scale: want(1); return scale(inputs[0], attrs.c);
    case OpKind::matmul: want(2); return matmul(inputs[0], inputs[1]);
    case OpKind::transpose: want(1); return transpose(inputs[0]);
    case OpKind::sum: want(1); return sum(inputs[0]);
    case OpKind::mean: want(1); return mean(inputs[0]);
    case OpKind::log: want(1); return log(inputs[0]);
    case OpKind::exp: want(1); return exp(inputs[0]);
    case OpKind::square: want(1); return square(inputs[0]);
    case OpKind::sqrt: want(1); return sqrt(inputs[0]);
    case OpKind::abs: want(1); return abs(inputs[0]);
    case OpKind::max_with: want(1); return max_with(inputs[0], attrs.c);
    case OpKind::relu: want(1); return relu(inputs[0]);
    case OpKind::leaky_relu: want(1); return leaky_relu(inputs[0], attrs.c);
    case OpKind::tanh: want(1); return tanh(inputs[0]);
    case OpKind::sigmoid: want(1); return sigmoid(inputs[0]);
    case OpKind::log_softmax: want(1); return log_softmax(inputs[0], attrs.axis);
    case OpKind::concat: want(2); return concat(inputs[0], inputs[1], attrs.axis);
    case OpKind::select_rows: want(1); return select_rows(inputs[0], attrs.rows);
    case OpKind::row_l2_norm: want(1); return row_l2_norm(inputs[0]);
  }
  throw std::invalid_argument("apply: unknown op");
}

// ---- backward --------------------------------------------------------------

namespace {

// Sum g down to the shape an operand had before broadcasting. Reductions are
// expressed with ops (sum, matmul with a ones row) so they stay differentiable.
Tensor reduce_like(const Tensor& g, int rows, int cols) {
  if (g.rows() == rows && g.cols() == cols) return g;
  if (rows == 1 && cols == 1) return sum(g);
  if (rows == 1 && cols == g.cols()) return matmul(ones(1, g.rows()), g);
  throw std::invalid_argument("reduce_like: cannot reduce " + g.shape_str() + " to " +
                              std::to_string(rows) + "x" + std::to_string(cols));
}

Tensor mask_tensor(const TensorData& a, const std::function<double(double)>& f) {
  std::vector<double> v(a.v.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(a.v[i]);
  return Tensor(a.rows, a.cols, std::move(v));
}

// Column selector that extracts cols [ofs, ofs+width) from a tensor with
// total columns, as a constant for matmul.
Tensor col_selector(int total, int ofs, int width) {
  std::vector<double> v(static_cast<std::size_t>(total) * width, 0.0);
  for (int j = 0; j < width; ++j) v[static_cast<std::size_t>(ofs + j) * width + j] = 1.0;
  return Tensor(total, width, std::move(v));
}

Tensor one_hot_rows(const std::vector<int>& rows, int num_rows) {
  std::vector<double> v(rows.size() * static_cast<std::size_t>(num_rows), 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i)
    v[i * num_rows + static_cast<std::size_t>(rows[i])] = 1.0;
  return Tensor(static_cast<int>(rows.size()), num_rows, std::move(v));
}

}  // namespace

std::vector<Tensor> grad(const Tensor& output, const std::vector<Tensor>& wrt,
                         bool create_graph) {
  if (!output.attached()) throw std::invalid_argument("grad: output is not attached to a graph");
  if (!output.is_scalar())
    throw std::invalid_argument("grad: output must be scalar, got " + output.shape_str());
  const std::shared_ptr<Graph> graph = output.graph();
  for (const Tensor& w : wrt)
    if (!w.attached() || w.graph() != graph)
      throw std::invalid_argument("grad: wrt tensor is not on the output's graph");

  const int out_id = output.node();
  std::vector<char> needed(static_cast<std::size_t>(out_id) + 1, 0);
  needed[static_cast<std::size_t>(out_id)] = 1;
  for (int id = out_id; id >= 0; --id) {
    if (!needed[static_cast<std::size_t>(id)]) continue;
    for (int in : graph->node(id).in)
      if (in >= 0) needed[static_cast<std::size_t>(in)] = 1;
  }

  std::vector<Tensor> adjoint(static_cast<std::size_t>(out_id) + 1);
  adjoint[static_cast<std::size_t>(out_id)] = Tensor::scalar(1.0);

  auto val = [&](int id) {
    Tensor h = graph->handle(id);
    return create_graph ? h : h.detached();
  };
  auto accumulate = [&](int id, const Tensor& contrib) {
    Tensor& slot = adjoint[static_cast<std::size_t>(id)];
    slot = slot.defined() ? add(slot, contrib) : contrib;
  };
  auto shape_of = [&](int id) { return graph->node(id).value; };

  for (int id = out_id; id >= 0; --id) {
    if (!needed[static_cast<std::size_t>(id)]) continue;
    const Tensor gy = adjoint[static_cast<std::size_t>(id)];
    if (!gy.defined()) continue;
    // Copy the node record: create_graph appends nodes during this loop and
    // may reallocate the graph's storage.
    const Node n = graph->node(id);
    if (n.kind == OpKind::leaf) continue;
    const int a = n.in[0], b = n.in[1];
    const Tensor vy = val(id);

    switch (n.kind) {
      case OpKind::add: {
        const auto& sa = *shape_of(a);
        const auto& sb = *shape_of(b);
        accumulate(a, reduce_like(gy, sa.rows, sa.cols));
        accumulate(b, reduce_like(gy, sb.rows, sb.cols));
        break;
      }
      case OpKind::sub: {
        const auto& sa = *shape_of(a);
        const auto& sb = *shape_of(b);
        accumulate(a, reduce_like(gy, sa.rows, sa.cols));
        accumulate(b, reduce_like(neg(gy), sb.rows, sb.cols));
        break;
      }
      case OpKind::mul: {
        const auto& sa = *shape_of(a);
        const auto& sb = *shape_of(b);
        accumulate(a, reduce_like(mul(gy, val(b)), sa.rows, sa.cols));
        accumulate(b, reduce_like(mul(gy, val(a)), sb.rows, sb.cols));
        break;
      }
      case OpKind::neg: accumulate(a, neg(gy)); break;
      case OpKind::scale: accumulate(a, scale(gy, n.attrs.c)); break;
      case OpKind::matmul: {
        accumulate(a, matmul(gy, transpose(val(b))));
        accumulate(b, matmul(transpose(val(a)), gy));
        break;
      }
      case OpKind::transpose: accumulate(a, transpose(gy)); break;
      case OpKind::sum: {
        const auto& sa = *shape_of(a);
        accumulate(a, mul(gy, ones(sa.rows, sa.cols)));
        break;
      }
      case OpKind::mean: {
        const auto& sa = *shape_of(a);
        const double inv = 1.0 / static_cast<double>(sa.v.size());
        accumulate(a, mul(scale(gy, inv), ones(sa.rows, sa.cols)));
        break;
      }
      // d log(a) = 1/a = exp(-log(a)), reusing the node's own output.
      case OpKind::log: accumulate(a, mul(gy, exp(neg(vy)))); break;
      case OpKind::exp: accumulate(a, mul(gy, vy)); break;
      case OpKind::square: accumulate(a, scale(mul(gy, val(a)), 2.0)); break;
      case OpKind::sqrt: accumulate(a, scale(mul(gy, exp(neg(log(vy)))), 0.5)); break;
      // Piecewise-linear ops: the local slope is constant in the input, so it
      // enters the tape as a plain constant mask (second derivative zero).
      case OpKind::abs: {
        accumulate(a, mul(gy, mask_tensor(*shape_of(a), [](double x) {
                      return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
                    })));
        break;
      }
      case OpKind::max_with: {
        const double c = n.attrs.c;
        accumulate(a, mul(gy, mask_tensor(*shape_of(a),
                                          [c](double x) { return x > c ? 1.0 : 0.0; })));
        break;
      }
      case OpKind::relu: {
        accumulate(a, mul(gy, mask_tensor(*shape_of(a),
                                          [](double x) { return x > 0.0 ? 1.0 : 0.0; })));
        break;
      }
      case OpKind::leaky_relu: {
        const double s = n.attrs.c;
        accumulate(a, mul(gy, mask_tensor(*shape_of(a),
                                          [s](double x) { return x > 0.0 ? 1.0 : s; })));
        break;
      }
      case OpKind::tanh: accumulate(a, mul(gy, sub(Tensor::scalar(1.0), square(vy)))); break;
      case OpKind::sigmoid:
        accumulate(a, mul(gy, mul(vy, sub(Tensor::scalar(1.0), vy))));
        break;
      case OpKind::log_softmax: {
        // d = g - softmax * (sum of g along the axis), softmax = exp(output).
        const auto& sa = *shape_of(a);
        Tensor axis_sum_full =
            n.attrs.axis == 1
                ? matmul(matmul(gy, ones(sa.cols, 1)), ones(1, sa.cols))
                : matmul(ones(sa.rows, 1), matmul(ones(1, sa.rows), gy));
        accumulate(a, sub(gy, mul(exp(vy), axis_sum_full)));
        break;
      }
      case OpKind::concat: {
        const auto& sa = *shape_of(a);
        const auto& sb = *shape_of(b);
        if (n.attrs.axis == 1) {
          accumulate(a, matmul(gy, col_selector(sa.cols + sb.cols, 0, sa.cols)));
          accumulate(b, matmul(gy, col_selector(sa.cols + sb.cols, sa.cols, sb.cols)));
        } else {
          std::vector<int> ia(static_cast<std::size_t>(sa.rows));
          std::vector<int> ib(static_cast<std::size_t>(sb.rows));
          for (int i = 0; i < sa.rows; ++i) ia[static_cast<std::size_t>(i)] = i;
          for (int i = 0; i < sb.rows; ++i) ib[static_cast<std::size_t>(i)] = sa.rows + i;
          accumulate(a, select_rows(gy, ia));
          accumulate(b, select_rows(gy, ib));
        }
        break;
      }
      case OpKind::select_rows: {
        const auto& sa = *shape_of(a);
        accumulate(a, matmul(transpose(one_hot_rows(n.attrs.rows, sa.rows)), gy));
        break;
      }
      case OpKind::row_l2_norm: {
        // d = a * (g / norm) broadcast across the row.
        const auto& sa = *shape_of(a);
        const Tensor per_row = mul(gy, exp(neg(log(vy))));
        accumulate(a, mul(val(a), matmul(per_row, ones(1, sa.cols))));
        break;
      }
      case OpKind::leaf: break;
    }
  }

  std::vector<Tensor> result;
  result.reserve(wrt.size());
  for (const Tensor& w : wrt) {
    const int id = w.node();
    if (id <= out_id && adjoint[static_cast<std::size_t>(id)].defined())
      result.push_back(adjoint[static_cast<std::size_t>(id)]);
    else
      result.push_back(Tensor(w.rows(), w.cols()));
  }
  return result;
}

std::vector<double> finite_diff(const std::function<double(const std::vector<double>&)>& f,
                                const std::vector<double>& x, double eps) {
  std::vector<double> g(x.size());
  std::vector<double> p = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    p[i] = x[i] + eps;
    const double hi = f(p);
    p[i] = x[i] - eps;
    const double lo = f(p);
    p[i] = x[i];
    g[i] = (hi - lo) / (2.0 * eps);
  }
  return g;
}

}  // namespace ganlab
