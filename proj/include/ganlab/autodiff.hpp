#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ganlab/tensor.hpp"

namespace ganlab {

// Thrown when an op is fed values outside its numeric domain (log of a
// non-positive number, zero-norm row under row_l2_norm, ...). Trainers treat
// this as divergence; shape errors stay std::invalid_argument and propagate.
struct NumericDomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Primitive operations recorded on the tape. Every vector-Jacobian product in
// the backward pass is itself built from these ops (plus constant tensors),
// which is what makes gradients-of-gradients work.
enum class OpKind {
  leaf,
  add,
  sub,
  mul,          // elementwise
  neg,
  scale,        // c * x
  matmul,
  transpose,
  sum,          // all entries -> 1x1
  mean,         // all entries -> 1x1
  log,
  exp,
  square,
  sqrt,
  abs,
  max_with,     // elementwise max(x, c)
  relu,
  leaky_relu,
  tanh,
  sigmoid,
  log_softmax,  // per row (axis 1) or per column (axis 0)
  concat,       // axis 0 stacks rows, axis 1 widens
  select_rows,  // gather rows by index
  row_l2_norm,  // [n x d] -> [n x 1]
};

const char* op_name(OpKind k);
std::vector<OpKind> all_op_kinds();  // every kind except leaf

struct OpAttrs {
  double c = 0.0;           // scale constant, max_with threshold, leaky slope
  int axis = 1;             // log_softmax / concat
  std::vector<int> rows;    // select_rows indices
};

struct Node {
  OpKind kind = OpKind::leaf;
  std::array<int, 2> in = {-1, -1};
  OpAttrs attrs;
  std::shared_ptr<const TensorData> value;
};

// Append-only record of one computation. Ops record themselves here whenever
// at least one input is attached; constants are folded in as extra leaves so
// the tape replays without outside state. Graphs are single threaded; for
// parallel runs give each thread its own graph.
class Graph : public std::enable_shared_from_this<Graph> {
 public:
  static std::shared_ptr<Graph> create();

  // Record a detached tensor as a leaf and return the attached handle.
  Tensor leaf(const Tensor& t);

  // Attached handle for an existing node.
  Tensor handle(int node_id);

  const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return nodes_.size(); }
  std::uint64_t generation() const { return generation_; }

  // Recompute every non-leaf node from its recorded inputs and compare
  // bit-for-bit with the stored forward value.
  bool replay_matches();

  int record(OpKind kind, int a, int b, OpAttrs attrs, std::shared_ptr<const TensorData> value);

 private:
  std::vector<Node> nodes_;
  std::uint64_t generation_ = 0;
};

// ---- ops ---------------------------------------------------------------
// Elementwise binary ops broadcast a 1x1 operand against anything and a 1xC
// row against an RxC batch. Shape violations throw std::invalid_argument
// naming the op and both shapes; log and sqrt reject non-positive input.

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor neg(const Tensor& a);
Tensor scale(const Tensor& a, double c);
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
Tensor log(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor square(const Tensor& a);
Tensor sqrt(const Tensor& a);
Tensor abs(const Tensor& a);
Tensor max_with(const Tensor& a, double c);
Tensor relu(const Tensor& a);
Tensor leaky_relu(const Tensor& a, double slope);
Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor log_softmax(const Tensor& a, int axis);
Tensor concat(const Tensor& a, const Tensor& b, int axis);
Tensor select_rows(const Tensor& a, const std::vector<int>& rows);
Tensor row_l2_norm(const Tensor& a);

// Generic dispatcher over the enum; used by the gradient-check sweep and by
// tape replay. Unary kinds read inputs[0], binary kinds inputs[0..1].
Tensor apply(OpKind kind, const std::vector<Tensor>& inputs, const OpAttrs& attrs = {});

// Reverse-mode gradient of a scalar output with respect to each tensor in
// wrt (all must live on the same graph). With create_graph the returned
// gradients are themselves attached and can be differentiated again.
// Contributions from multiple consumers accumulate by summation; a wrt entry
// the output does not depend on gets a zero tensor of matching shape.
std::vector<Tensor> grad(const Tensor& output, const std::vector<Tensor>& wrt,
                         bool create_graph = false);

// Central-difference gradient of f at x, the oracle the autodiff tests are
// checked against: df/dx_i ~ (f(x + eps e_i) - f(x - eps e_i)) / (2 eps).
std::vector<double> finite_diff(const std::function<double(const std::vector<double>&)>& f,
                                const std::vector<double>& x, double eps = 1e-6);

}  // namespace ganlab
